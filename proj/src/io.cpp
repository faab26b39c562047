#include "loadcons/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace loadcons::io {

nlohmann::ordered_json load_to_json(const Load& l) {
  nlohmann::ordered_json j;
  j["id"] = l.id;
  j["origin_terminal"] = l.origin.terminal;
  j["origin_sort"] = l.origin.sort;
  j["dest_terminal"] = l.destination.terminal;
  j["dest_sort"] = l.destination.sort;
  j["departure_min"] = l.departure;
  j["due_day"] = l.due_day;
  j["volume"] = l.volume;
  j["capacity"] = l.capacity;
  j["trailer_type"] = l.trailer_type;
  return j;
}

Load load_from_json(const nlohmann::json& j) {
  Load l;
  l.id = j.at("id").get<std::string>();
  l.origin = {j.at("origin_terminal").get<std::string>(), j.at("origin_sort").get<std::string>()};
  l.destination = {j.at("dest_terminal").get<std::string>(), j.at("dest_sort").get<std::string>()};
  l.departure = j.at("departure_min").get<std::int64_t>();
  l.due_day = j.at("due_day").get<std::int64_t>();
  l.volume = j.at("volume").get<double>();
  l.capacity = j.at("capacity").get<double>();
  l.trailer_type = j.at("trailer_type").get<std::string>();
  return l;
}

namespace {

[[noreturn]] void parse_fail(const std::string& source, std::size_t line, const std::string& why) {
  throw DataError(source + ":" + std::to_string(line) + ": " + why);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void strip_cr(std::string& s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
}

double parse_double(const std::string& text, const std::string& source, std::size_t line,
                    const char* field) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    parse_fail(source, line, std::string("bad number in field '") + field + "': '" + text + "'");
  }
  return v;
}

int parse_int(const std::string& text, const std::string& source, std::size_t line,
              const char* field) {
  int v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    parse_fail(source, line, std::string("bad integer in field '") + field + "': '" + text + "'");
  }
  return v;
}

template <class Row>
std::vector<Row> read_csv(std::istream& in, const std::string& source, const std::string& header,
                          std::size_t n_fields,
                          Row (*make)(const std::vector<std::string>&, const std::string&,
                                      std::size_t)) {
  std::vector<Row> rows;
  std::string line;
  std::size_t lineno = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (!seen_header) {
      if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
      if (line != header) parse_fail(source, lineno, "expected header '" + header + "'");
      seen_header = true;
      continue;
    }
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != n_fields) {
      parse_fail(source, lineno,
                 "expected " + std::to_string(n_fields) + " fields, got " +
                     std::to_string(fields.size()));
    }
    rows.push_back(make(fields, source, lineno));
  }
  if (!seen_header) parse_fail(source, 1, "missing header '" + header + "'");
  return rows;
}

Terminal make_terminal(const std::vector<std::string>& f, const std::string& src,
                       std::size_t line) {
  return Terminal{f[0], parse_double(f[1], src, line, "lat"), parse_double(f[2], src, line, "lon")};
}

Sort make_sort(const std::vector<std::string>& f, const std::string& src, std::size_t line) {
  return Sort{f[0], f[1], parse_int(f[2], src, line, "dep_minutes"),
              parse_int(f[3], src, line, "arr_minutes")};
}

}  // namespace

std::vector<Terminal> read_terminals(std::istream& in, const std::string& source) {
  return read_csv<Terminal>(in, source, "id,lat,lon", 3, &make_terminal);
}

std::vector<Sort> read_sorts(std::istream& in, const std::string& source) {
  return read_csv<Sort>(in, source, "terminal,sort_id,dep_minutes,arr_minutes", 4, &make_sort);
}

std::vector<Load> read_loads(std::istream& in, const std::string& source) {
  std::vector<Load> loads;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      parse_fail(source, lineno, std::string("invalid JSON: ") + e.what());
    }
    try {
      Load l = load_from_json(j);
      loads.push_back(std::move(l));
    } catch (const nlohmann::json::exception& e) {
      parse_fail(source, lineno, std::string("bad load record: ") + e.what());
    }
  }
  return loads;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_terminals(std::ostream& out, const std::vector<Terminal>& terminals) {
  out << "id,lat,lon\n";
  for (const auto& t : terminals) {
    out << t.id << ',' << format_double(t.lat) << ',' << format_double(t.lon) << '\n';
  }
}

void write_sorts(std::ostream& out, const std::vector<Sort>& sorts) {
  out << "terminal,sort_id,dep_minutes,arr_minutes\n";
  for (const auto& s : sorts) {
    out << s.terminal << ',' << s.sort_id << ',' << s.dep_minutes << ',' << s.arr_minutes << '\n';
  }
}

void write_loads(std::ostream& out, const std::vector<Load>& loads) {
  for (const auto& l : loads) out << load_to_json(l).dump() << '\n';
}

Network read_network(const std::filesystem::path& dir) {
  auto open = [&](const char* name) {
    std::ifstream in(dir / name);
    if (!in) throw DataError("cannot open " + (dir / name).string());
    return in;
  };
  auto tin = open("terminals.csv");
  auto sin = open("sorts.csv");
  auto lin = open("loads.jsonl");
  return Network(read_terminals(tin, (dir / "terminals.csv").string()),
                 read_sorts(sin, (dir / "sorts.csv").string()),
                 read_loads(lin, (dir / "loads.jsonl").string()));
}

void write_network(const std::filesystem::path& dir, const Network& network) {
  std::filesystem::create_directories(dir);
  std::ostringstream t, s, l;
  write_terminals(t, network.terminals());
  write_sorts(s, network.sorts());
  write_loads(l, network.loads());
  write_file_atomic(dir / "terminals.csv", t.str());
  write_file_atomic(dir / "sorts.csv", s.str());
  write_file_atomic(dir / "loads.jsonl", l.str());
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << content;
    if (!out) throw DataError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace loadcons::io
