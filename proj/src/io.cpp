#include "pcab/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcab {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    out.push_back(first == std::string::npos ? std::string() : cell.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw std::runtime_error("dataset line " + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& s, std::size_t line) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) fail(line, "bad number '" + s + "'");
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") != std::string::npos) break;
  }
  const auto header = split_csv(line);
  if (header.size() < 2 || header[0] != "label") fail(lineno, "expected header label,x1,...,xd");
  const std::size_t d = header.size() - 1;

  std::vector<double> pos, neg;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    if (cells.size() != d + 1) fail(lineno, "expected " + std::to_string(d + 1) + " fields");
    std::vector<double>* dst = nullptr;
    if (cells[0] == "+1" || cells[0] == "1") dst = &pos;
    else if (cells[0] == "-1") dst = &neg;
    else fail(lineno, "label must be +1 or -1");
    for (std::size_t j = 1; j <= d; ++j) dst->push_back(parse_double(cells[j], lineno));
  }
  const auto rows = [d](const std::vector<double>& v) { return static_cast<Eigen::Index>(v.size() / d); };
  PointsXd p = Eigen::Map<const PointsXd>(pos.data(), rows(pos), static_cast<Eigen::Index>(d));
  PointsXd q = Eigen::Map<const PointsXd>(neg.data(), rows(neg), static_cast<Eigen::Index>(d));
  return Dataset(std::move(p), std::move(q));
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_dataset_csv(in);
}

void write_dataset_csv(std::ostream& out, const Dataset& ds) {
  out << "label";
  for (Eigen::Index j = 1; j <= ds.dim(); ++j) out << ",x" << j;
  out << '\n';
  auto block = [&](const PointsXd& pts, const char* label) {
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      out << label;
      for (Eigen::Index j = 0; j < pts.cols(); ++j) out << ',' << format_double(pts(i, j));
      out << '\n';
    }
  };
  block(ds.positives(), "+1");
  block(ds.negatives(), "-1");
}

void save_dataset(const std::filesystem::path& path, const Dataset& ds) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_dataset_csv(out, ds);
}

nlohmann::json solution_to_json(const PcabSolution& s, bool with_trace) {
  nlohmann::json hs = nlohmann::json::array();
  for (const auto& h : s.hyperplanes)
    hs.push_back({{"b", h.b}, {"w", std::vector<double>(h.w.data(), h.w.data() + h.w.size())}});
  nlohmann::json j = {{"hyperplanes", hs}, {"error", s.error}};
  if (with_trace) {
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& [t, e] : s.trace) trace.push_back({t, e});
    j["trace"] = trace;
  }
  return j;
}

PcabSolution solution_from_json(const nlohmann::json& j) {
  PcabSolution s;
  for (const auto& h : j.at("hyperplanes")) {
    const auto w = h.at("w").get<std::vector<double>>();
    s.hyperplanes.push_back({h.at("b").get<double>(),
                             Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()))});
  }
  s.error = j.at("error").get<std::int64_t>();
  if (j.contains("trace"))
    for (const auto& ev : j.at("trace")) s.trace.emplace_back(ev.at(0).get<double>(), ev.at(1).get<std::int64_t>());
  return s;
}

void save_solution(const std::filesystem::path& path, const PcabSolution& s, bool with_trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << solution_to_json(s, with_trace).dump(2) << '\n';
}

PcabSolution load_solution(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return solution_from_json(nlohmann::json::parse(in));
}

}  // namespace pcab
