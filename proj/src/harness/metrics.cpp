#include "imrl/harness/metrics.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace imrl::harness {

std::string format_real(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("format_real: conversion failed");
  return std::string(buf, end);
}

std::string train_csv(const std::vector<TrainRow>& rows) {
  std::string out = std::string(kTrainCsvHeader) + "\n";
  for (const TrainRow& r : rows) {
    out += std::to_string(r.step) + "," + std::to_string(r.episode) + "," + format_real(r.episode_return) + "," +
           format_real(r.critic_loss) + "," + format_real(r.actor_loss) + "," + format_real(r.im_loss) + "," +
           format_real(r.wall_ms) + "\n";
  }
  return out;
}

std::string eval_csv(const std::vector<EvalRow>& rows) {
  std::string out = std::string(kEvalCsvHeader) + "\n";
  for (const EvalRow& r : rows) {
    out += std::to_string(r.step) + "," + format_real(r.mean_return) + "," + format_real(r.std_return) + "\n";
  }
  return out;
}

std::vector<EvalRow> parse_eval_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kEvalCsvHeader) {
    throw std::runtime_error("eval.csv: unexpected header '" + line + "'");
  }
  std::vector<EvalRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string step, mean, sd;
    if (!std::getline(fields, step, ',') || !std::getline(fields, mean, ',') || !std::getline(fields, sd)) {
      throw std::runtime_error("eval.csv: malformed row '" + line + "'");
    }
    rows.push_back(EvalRow{std::stoll(step), std::stod(mean), std::stod(sd)});
  }
  return rows;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace imrl::harness
