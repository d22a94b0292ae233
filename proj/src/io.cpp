#include "algoselect/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "algoselect/error.hpp"

namespace algoselect::io {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error while reading " + path.string());
  return buf.str();
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  const fs::path parent = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::error_code ec;
  if (!parent.empty()) fs::create_directories(parent, ec);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("error while writing " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at " + path.string());
  }
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

greedy::MwisInstance mwis_from_json(const json& j, const std::string& source, std::size_t line) {
  try {
    if (!j.is_object()) throw ParseError(source, line, "expected a JSON object");
    const auto n = j.at("n").get<std::int64_t>();
    if (n < 0) throw ParseError(source, line, "negative vertex count");
    std::vector<greedy::Edge> edges;
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw ParseError(source, line, "each edge must be a pair [u, v]");
      const auto u = e[0].get<std::int64_t>();
      const auto v = e[1].get<std::int64_t>();
      if (u < 0 || v < 0 || u >= n || v >= n)
        throw ParseError(source, line, "edge [" + std::to_string(u) + ", " + std::to_string(v) + "] out of range");
      edges.emplace_back(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v));
    }
    auto weights = j.at("weights").get<std::vector<double>>();
    return greedy::make_mwis(static_cast<std::size_t>(n), edges, std::move(weights));
  } catch (const json::exception& e) {
    throw ParseError(source, line, e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(source, line, e.what());
  }
}

json mwis_json(const greedy::MwisInstance& instance) {
  json edges = json::array();
  for (const auto& [u, v] : instance.graph->edges()) edges.push_back({u, v});
  return json{{"n", instance.size()}, {"edges", std::move(edges)}, {"weights", instance.weights}};
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view field, const std::string& source, std::size_t line) {
  field = trim(field);
  double value = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size() || !std::isfinite(value))
    throw ParseError(source, line, "not a number: '" + std::string(field) + "'");
  return value;
}

// Calls fn(line_number, line) for every non-empty, non-comment line.
template <class Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line = 0;
  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    std::string_view raw = text.substr(0, eol);
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
    ++line;
    raw = trim(raw);
    if (raw.empty() || raw.front() == '#') continue;
    fn(line, raw);
  }
}

}  // namespace

greedy::MwisInstance parse_mwis_json(std::string_view text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source, line_of(text, e.byte == 0 ? 0 : e.byte - 1), e.what());
  }
  return mwis_from_json(j, source, 0);
}

std::string mwis_to_json(const greedy::MwisInstance& instance) { return mwis_json(instance).dump() + "\n"; }

std::vector<greedy::MwisInstance> parse_mwis_jsonl(std::string_view text, const std::string& source) {
  std::vector<greedy::MwisInstance> out;
  for_each_line(text, [&](std::size_t line, std::string_view raw) {
    json j;
    try {
      j = json::parse(raw);
    } catch (const json::parse_error& e) {
      throw ParseError(source, line, e.what());
    }
    out.push_back(mwis_from_json(j, source, line));
  });
  return out;
}

greedy::KnapsackInstance parse_knapsack_csv(std::string_view text, const std::string& source) {
  greedy::KnapsackInstance k;
  bool have_capacity = false;
  for_each_line(text, [&](std::size_t line, std::string_view raw) {
    if (!have_capacity) {
      constexpr std::string_view key = "capacity=";
      if (raw.substr(0, key.size()) != key) throw ParseError(source, line, "expected 'capacity=C' header");
      k.capacity = parse_number(raw.substr(key.size()), source, line);
      if (!(k.capacity > 0.0)) throw ParseError(source, line, "capacity must be positive");
      have_capacity = true;
      return;
    }
    if (raw == "value,size") return;
    const std::size_t comma = raw.find(',');
    if (comma == std::string_view::npos || raw.find(',', comma + 1) != std::string_view::npos)
      throw ParseError(source, line, "expected 'value,size'");
    const double v = parse_number(raw.substr(0, comma), source, line);
    const double s = parse_number(raw.substr(comma + 1), source, line);
    if (!(v > 0.0)) throw ParseError(source, line, "value must be positive");
    if (!(s > 0.0)) throw ParseError(source, line, "size must be positive");
    k.values.push_back(v);
    k.sizes.push_back(s);
  });
  if (!have_capacity) throw ParseError(source, 0, "missing 'capacity=C' header");
  return k;
}

std::string knapsack_to_csv(const greedy::KnapsackInstance& instance) {
  std::string out = "capacity=" + format_double(instance.capacity) + "\nvalue,size\n";
  for (std::size_t i = 0; i < instance.size(); ++i)
    out += format_double(instance.values[i]) + "," + format_double(instance.sizes[i]) + "\n";
  return out;
}

std::vector<double> parse_number_csv(std::string_view text, const std::string& source) {
  std::vector<double> out;
  for_each_line(text, [&](std::size_t line, std::string_view raw) {
    while (true) {
      const std::size_t comma = raw.find(',');
      const std::string_view field = trim(raw.substr(0, comma));
      if (!field.empty()) {
        // A leading non-numeric row is treated as a header.
        if (out.empty() && line == 1 && !(std::isdigit(static_cast<unsigned char>(field.front())) ||
                                          field.front() == '-' || field.front() == '+' || field.front() == '.')) {
          return;
        }
        out.push_back(parse_number(field, source, line));
      }
      if (comma == std::string_view::npos) break;
      raw.remove_prefix(comma + 1);
    }
  });
  return out;
}

std::vector<std::vector<double>> parse_array_csv(std::string_view text, const std::string& source) {
  std::vector<std::vector<double>> out;
  for_each_line(text, [&](std::size_t line, std::string_view raw) {
    std::vector<double> row;
    while (true) {
      const std::size_t comma = raw.find(',');
      const std::string_view field = trim(raw.substr(0, comma));
      if (field.empty()) throw ParseError(source, line, "empty field");
      row.push_back(parse_number(field, source, line));
      if (comma == std::string_view::npos) break;
      raw.remove_prefix(comma + 1);
    }
    out.push_back(std::move(row));
  });
  return out;
}

std::string arrays_to_csv(const std::vector<std::vector<double>>& arrays) {
  std::string out;
  for (const auto& row : arrays) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

namespace {

bool instance_file(const fs::path& p) {
  const auto ext = p.extension();
  return ext == ".json" || ext == ".jsonl" || ext == ".csv";
}

void load_file(const fs::path& path, std::vector<greedy::Instance>& out) {
  const std::string text = read_file(path);
  const std::string source = path.string();
  const auto ext = path.extension();
  if (ext == ".csv") {
    out.emplace_back(parse_knapsack_csv(text, source));
  } else if (ext == ".jsonl") {
    for (auto& m : parse_mwis_jsonl(text, source)) out.emplace_back(std::move(m));
  } else if (ext == ".json") {
    out.emplace_back(parse_mwis_json(text, source));
  } else {
    throw ParseError(source, 0, "unknown instance format (expected .json, .jsonl or .csv)");
  }
}

}  // namespace

std::vector<greedy::Instance> load_instances(const fs::path& path) {
  std::vector<greedy::Instance> out;
  std::error_code ec;
  if (fs::is_directory(path, ec)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path))
      if (entry.is_regular_file() && instance_file(entry.path())) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) load_file(f, out);
  } else {
    if (!fs::exists(path, ec)) throw IoError("no such file or directory: " + path.string());
    load_file(path, out);
  }
  return out;
}

}  // namespace algoselect::io
