#pragma once

#include <filesystem>
#include <iosfwd>

#include <json.hpp>

#include "pcab/core.hpp"

namespace pcab {

/// Reads the `label,x1,...,xd` CSV format. Labels are `+1`/`1` or `-1`.
/// Throws std::runtime_error with the offending line number on bad input.
Dataset read_dataset_csv(std::istream& in);
Dataset load_dataset(const std::filesystem::path& path);

/// Writes positives first, then negatives, with round-trip exact numbers.
void write_dataset_csv(std::ostream& out, const Dataset& ds);
void save_dataset(const std::filesystem::path& path, const Dataset& ds);

/// `{"hyperplanes":[{"b":..,"w":[..]}],"error":..,"trace":[[t,e],..]}`.
/// Trace stamps are wall-clock, so leave them out for reproducible files.
nlohmann::json solution_to_json(const PcabSolution& s, bool with_trace = true);
PcabSolution solution_from_json(const nlohmann::json& j);
void save_solution(const std::filesystem::path& path, const PcabSolution& s, bool with_trace = true);
PcabSolution load_solution(const std::filesystem::path& path);

/// Shortest text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace pcab
