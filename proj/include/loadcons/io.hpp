#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "loadcons/model.hpp"

namespace loadcons::io {

// Parsers report malformed input as DataError("<source>:<line>: <reason>").
std::vector<Terminal> read_terminals(std::istream& in, const std::string& source = "terminals.csv");
std::vector<Sort> read_sorts(std::istream& in, const std::string& source = "sorts.csv");
std::vector<Load> read_loads(std::istream& in, const std::string& source = "loads.jsonl");

// One loads.jsonl record. load_from_json throws nlohmann::json exceptions on
// missing or mistyped fields.
nlohmann::ordered_json load_to_json(const Load& load);
Load load_from_json(const nlohmann::json& j);

void write_terminals(std::ostream& out, const std::vector<Terminal>& terminals);
void write_sorts(std::ostream& out, const std::vector<Sort>& sorts);
void write_loads(std::ostream& out, const std::vector<Load>& loads);

// terminals.csv, sorts.csv and loads.jsonl inside `dir`.
Network read_network(const std::filesystem::path& dir);
void write_network(const std::filesystem::path& dir, const Network& network);

// Shortest decimal representation that round-trips.
std::string format_double(double v);

// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

}  // namespace loadcons::io
