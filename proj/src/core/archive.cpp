#include "imrl/core/archive.hpp"

#include "imrl/core/error.hpp"

namespace imrl {

void Archive::add_entry(Entry entry) {
  if (index_.count(entry.name) != 0) {
    throw CheckpointError("archive: duplicate entry '" + entry.name + "'");
  }
  if (static_cast<std::int64_t>(entry.data.size()) != entry.rows * entry.cols) {
    throw CheckpointError("archive: entry '" + entry.name + "' has inconsistent size");
  }
  index_.emplace(entry.name, entries_.size());
  entries_.push_back(std::move(entry));
}

void Archive::put(const std::string& name, const Eigen::MatrixXd& value) {
  Entry e{name, value.rows(), value.cols(),
          std::vector<double>(value.data(), value.data() + value.size())};
  add_entry(std::move(e));
}

void Archive::put(const std::string& name, const std::vector<double>& value) {
  add_entry(Entry{name, static_cast<std::int64_t>(value.size()), 1, value});
}

void Archive::put_scalar(const std::string& name, double value) {
  add_entry(Entry{name, 1, 1, {value}});
}

const Archive::Entry& Archive::entry(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw CheckpointError("archive: missing entry '" + name + "'");
  return entries_[it->second];
}

Eigen::MatrixXd Archive::matrix(const std::string& name) const {
  const Entry& e = entry(name);
  return Eigen::Map<const Eigen::MatrixXd>(e.data.data(), e.rows, e.cols);
}

void Archive::read(const std::string& name, Eigen::MatrixXd& out) const {
  const Entry& e = entry(name);
  if (e.rows != out.rows() || e.cols != out.cols()) {
    throw CheckpointError("archive: entry '" + name + "' shape mismatch");
  }
  out = Eigen::Map<const Eigen::MatrixXd>(e.data.data(), e.rows, e.cols);
}

void Archive::read(const std::string& name, Eigen::VectorXd& out) const {
  const Entry& e = entry(name);
  if (e.rows != out.size() || e.cols != 1) {
    throw CheckpointError("archive: entry '" + name + "' shape mismatch");
  }
  out = Eigen::Map<const Eigen::VectorXd>(e.data.data(), e.rows);
}

std::vector<double> Archive::vector(const std::string& name) const { return entry(name).data; }

double Archive::scalar(const std::string& name) const {
  const Entry& e = entry(name);
  if (e.data.size() != 1) throw CheckpointError("archive: entry '" + name + "' is not a scalar");
  return e.data[0];
}

}  // namespace imrl
