#pragma once

#include <Eigen/Core>
#include <json.hpp>

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace imrl {

/// In-memory bag of named real arrays plus a JSON metadata tree. Components
/// write their state here; the checkpoint file format serializes it.
class Archive {
 public:
  struct Entry {
    std::string name;
    std::int64_t rows = 0;
    std::int64_t cols = 0;
    std::vector<double> data;  // column-major
  };

  void put(const std::string& name, const Eigen::MatrixXd& value);
  void put(const std::string& name, const std::vector<double>& value);
  void put_scalar(const std::string& name, double value);

  bool contains(const std::string& name) const { return index_.count(name) != 0; }
  const Entry& entry(const std::string& name) const;

  Eigen::MatrixXd matrix(const std::string& name) const;
  /// Reads into `out`, requiring the stored shape to match out's shape.
  void read(const std::string& name, Eigen::MatrixXd& out) const;
  void read(const std::string& name, Eigen::VectorXd& out) const;
  std::vector<double> vector(const std::string& name) const;
  double scalar(const std::string& name) const;

  nlohmann::json& meta() { return meta_; }
  const nlohmann::json& meta() const { return meta_; }

  const std::vector<Entry>& entries() const { return entries_; }
  void add_entry(Entry entry);

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  nlohmann::json meta_ = nlohmann::json::object();
};

}  // namespace imrl
