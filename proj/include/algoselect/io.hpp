#pragma once

// File helpers and the on-disk instance formats.
//
// MWIS:     JSON {"n": 3, "edges": [[0, 1], [1, 2]], "weights": [0.5, 0.25, 1.0]}
// Knapsack: CSV, first line "capacity=C", then one "value,size" row per item
//           (an optional "value,size" header row and '#' comments are skipped)
// Sequences of MWIS instances: JSON lines, one instance object per line.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "algoselect/greedy.hpp"

namespace algoselect::io {

std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Shortest round-trip decimal form of a double.
std::string format_double(double value);

greedy::MwisInstance parse_mwis_json(std::string_view text, const std::string& source = "<mwis>");
std::string mwis_to_json(const greedy::MwisInstance& instance);

greedy::KnapsackInstance parse_knapsack_csv(std::string_view text, const std::string& source = "<knapsack>");
std::string knapsack_to_csv(const greedy::KnapsackInstance& instance);

// Picks the format from the extension: .json / .jsonl for MWIS, .csv for Knapsack.
// A .jsonl file yields one instance per non-empty line. A directory loads every
// such file in it, in name order.
std::vector<greedy::Instance> load_instances(const std::filesystem::path& path);

std::vector<greedy::MwisInstance> parse_mwis_jsonl(std::string_view text, const std::string& source = "<jsonl>");

// Reads a single column (or comma-separated row) of numbers.
std::vector<double> parse_number_csv(std::string_view text, const std::string& source = "<csv>");
// One array per non-empty row; "#" lines are comments. Rows may differ in length.
std::vector<std::vector<double>> parse_array_csv(std::string_view text, const std::string& source = "<csv>");
std::string arrays_to_csv(const std::vector<std::vector<double>>& arrays);

}  // namespace algoselect::io
