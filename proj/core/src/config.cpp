#include "dne/config.hpp"

#include "dne/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace dne {

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

std::optional<double> to_number(std::string_view s) {
  const std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  double value = 0.0;
  const char* begin = t.data();
  if (*begin == '+') ++begin;
  const auto result = std::from_chars(begin, t.data() + t.size(), value);
  if (result.ec != std::errc() || result.ptr != t.data() + t.size()) return std::nullopt;
  return value;
}

std::vector<std::string> split_commas(std::string_view s) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t end = s.find(',', pos);
    parts.push_back(trim(s.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos)));
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return parts;
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

std::string format_number(double value) {
  char buffer[32];
  if (value == std::floor(value) && std::abs(value) < 1e15) {
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), static_cast<long long>(value));
    return std::string(buffer, result.ptr);
  }
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

const std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>>& primitive_arity() {
  static const std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> table{
      {"constant", {1, 1}}, {"affine", {2, 3}}, {"bump", {1, 2}}, {"sin_product", {1, 2}}, {"delta_power", {2, 2}}};
  return table;
}

} // namespace

// ---------------------------------------------------------------------------
// FunctionSpec
// ---------------------------------------------------------------------------

FunctionSpec FunctionSpec::parse(const std::string& text, const std::filesystem::path& base_dir) {
  const std::string t = trim(text);
  const std::size_t open = t.find('(');
  if (open == std::string::npos || t.back() != ')') {
    if (const auto number = to_number(t)) return FunctionSpec{"constant", {*number}, {}};
    throw ParseError("expected a function primitive such as constant(1), got '" + t + "'");
  }
  FunctionSpec spec;
  spec.name = trim(std::string_view(t).substr(0, open));
  const std::string inner = t.substr(open + 1, t.size() - open - 2);
  if (spec.name == "file") {
    const std::string arg = trim(inner);
    if (arg.size() < 2 || arg.front() != '"' || arg.back() != '"') throw ParseError("file(...) expects a quoted path");
    spec.path = arg.substr(1, arg.size() - 2);
    if (spec.path.is_relative()) spec.path = base_dir / spec.path;
    return spec;
  }
  const auto& table = primitive_arity();
  const auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == spec.name; });
  if (it == table.end()) throw ParseError("unknown function primitive '" + spec.name + "'");
  if (!trim(inner).empty())
    for (const std::string& part : split_commas(inner)) {
      const auto number = to_number(part);
      if (!number) throw ParseError("argument '" + part + "' of " + spec.name + " is not a number");
      spec.args.push_back(*number);
    }
  const auto [lo, hi] = it->second;
  if (spec.args.size() < lo || spec.args.size() > hi)
    throw ParseError(spec.name + " takes " + std::to_string(lo) + (lo == hi ? "" : "-" + std::to_string(hi)) +
                     " arguments");
  return spec;
}

std::string FunctionSpec::to_string() const {
  if (name == "file") return "file(\"" + path.string() + "\")";
  std::string out = name + "(";
  for (std::size_t i = 0; i < args.size(); ++i) out += (i ? ", " : "") + format_number(args[i]);
  return out + ")";
}

double FunctionSpec::eval(const Mesh& mesh, const Mesh::Point& x) const {
  const int dim = mesh.dimension();
  auto unit = [&](int i) {
    const auto k = static_cast<std::size_t>(i);
    return (x[k] - mesh.lower()[k]) / (mesh.upper()[k] - mesh.lower()[k]);
  };
  if (name == "constant") return args[0];
  if (name == "affine") return args[0] + args[1] * x[0] + (args.size() > 2 && dim > 1 ? args[2] * x[1] : 0.0);
  if (name == "bump") {
    const double power = args.size() > 1 ? args[1] : 1.0;
    double value = args[0];
    for (int i = 0; i < dim; ++i) value *= std::pow(std::max(0.0, 4.0 * unit(i) * (1.0 - unit(i))), power);
    return value;
  }
  if (name == "sin_product") {
    const double k = args.size() > 1 ? args[1] : 1.0;
    double value = args[0];
    for (int i = 0; i < dim; ++i) value *= std::sin(k * std::numbers::pi * unit(i));
    return value;
  }
  if (name == "delta_power") return args[0] * std::pow(mesh.boundary_distance(x), args[1]);
  throw DomainError("primitive '" + name + "' has no pointwise form");
}

std::vector<double> FunctionSpec::at_vertices(const Mesh& mesh) const {
  if (name == "file") return read_vertex_csv(path, mesh);
  return sample_at_vertices(mesh, [&](const Mesh::Point& x) { return eval(mesh, x); });
}

std::vector<double> FunctionSpec::at_barycenters(const Mesh& mesh) const {
  if (name != "file") return sample_at_barycenters(mesh, [&](const Mesh::Point& x) { return eval(mesh, x); });
  const std::vector<double> nodal = read_vertex_csv(path, mesh);
  std::vector<double> out(mesh.num_elements(), 0.0);
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    for (int v : mesh.element(e)) out[e] += nodal[static_cast<std::size_t>(v)];
    out[e] /= static_cast<double>(mesh.vertices_per_element());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

Config Config::parse(const std::string& text, std::filesystem::path base_dir) {
  Config config;
  config.base_dir_ = std::move(base_dir);
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // Strip comments outside quotes.
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.erase(i);
        break;
      }
    }
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ParseError("unterminated section header", line_no);
      section = trim(std::string_view(t).substr(1, t.size() - 2));
      if (!is_identifier(section)) throw ParseError("invalid section name '" + section + "'", line_no);
      config.entries_[section];
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no);
    if (section.empty()) throw ParseError("key outside of any section", line_no);
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (!is_identifier(key)) throw ParseError("invalid key '" + key + "'", line_no);
    if (value.empty()) throw ParseError("missing value for '" + key + "'", line_no);
    auto& bucket = config.entries_[section];
    if (bucket.count(key)) throw ParseError("duplicate key '" + section + "." + key + "'", line_no);
    bucket[key] = Entry{value, line_no};
  }
  return config;
}

Config Config::load(const std::filesystem::path& path) {
  return parse(read_text(path), path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
}

bool Config::has(const std::string& section, const std::string& key) const { return find(section, key) != nullptr; }

bool Config::has_section(const std::string& section) const { return entries_.count(section) > 0; }

void Config::set(const std::string& section, const std::string& key, const std::string& raw) {
  entries_[section][key] = Entry{raw, 0};
}

const Config::Entry* Config::find(const std::string& section, const std::string& key) const {
  const auto s = entries_.find(section);
  if (s == entries_.end()) return nullptr;
  const auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

void Config::record(const std::string& section, const std::string& key, const std::string& raw) const {
  used_[section][key] = raw;
}

double Config::get_double(const std::string& section, const std::string& key, std::optional<double> fallback) const {
  const Entry* e = find(section, key);
  if (!e) {
    if (!fallback) throw ParseError("missing required key '" + section + "." + key + "'");
    record(section, key, format_number(*fallback));
    return *fallback;
  }
  const auto number = to_number(e->raw);
  if (!number) throw ParseError("'" + section + "." + key + "' must be a number", e->line);
  record(section, key, e->raw);
  return *number;
}

int Config::get_int(const std::string& section, const std::string& key, std::optional<int> fallback) const {
  const double value = get_double(section, key, fallback ? std::optional<double>(*fallback) : std::nullopt);
  if (value != std::floor(value) || std::abs(value) > 2e9) {
    const Entry* e = find(section, key);
    throw ParseError("'" + section + "." + key + "' must be an integer", e ? e->line : 0);
  }
  return static_cast<int>(value);
}

bool Config::get_bool(const std::string& section, const std::string& key, std::optional<bool> fallback) const {
  const Entry* e = find(section, key);
  if (!e) {
    if (!fallback) throw ParseError("missing required key '" + section + "." + key + "'");
    record(section, key, *fallback ? "true" : "false");
    return *fallback;
  }
  if (e->raw != "true" && e->raw != "false")
    throw ParseError("'" + section + "." + key + "' must be true or false", e->line);
  record(section, key, e->raw);
  return e->raw == "true";
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               std::optional<std::string> fallback) const {
  const Entry* e = find(section, key);
  if (!e) {
    if (!fallback) throw ParseError("missing required key '" + section + "." + key + "'");
    record(section, key, *fallback);
    return *fallback;
  }
  record(section, key, e->raw);
  return unquote(e->raw);
}

std::vector<double> Config::get_list(const std::string& section, const std::string& key,
                                     std::optional<std::vector<double>> fallback) const {
  const Entry* e = find(section, key);
  if (!e) {
    if (!fallback) throw ParseError("missing required key '" + section + "." + key + "'");
    std::string raw = "[";
    for (std::size_t i = 0; i < fallback->size(); ++i) raw += (i ? ", " : "") + format_number((*fallback)[i]);
    record(section, key, raw + "]");
    return *fallback;
  }
  std::string raw = e->raw;
  if (raw.front() == '[') {
    if (raw.back() != ']') throw ParseError("unterminated list for '" + section + "." + key + "'", e->line);
    raw = raw.substr(1, raw.size() - 2);
  }
  std::vector<double> values;
  if (!trim(raw).empty())
    for (const std::string& part : split_commas(raw)) {
      const auto number = to_number(part);
      if (!number) throw ParseError("list entry '" + part + "' of '" + section + "." + key + "' is not a number", e->line);
      values.push_back(*number);
    }
  record(section, key, e->raw);
  return values;
}

FunctionSpec Config::get_function(const std::string& section, const std::string& key,
                                  std::optional<std::string> fallback) const {
  const Entry* e = find(section, key);
  if (!e && !fallback) throw ParseError("missing required key '" + section + "." + key + "'");
  const std::string raw = e ? e->raw : *fallback;
  try {
    FunctionSpec spec = FunctionSpec::parse(raw, base_dir_);
    record(section, key, spec.to_string());
    return spec;
  } catch (const ParseError& err) {
    throw ParseError("'" + section + "." + key + "': " + err.what(), e ? e->line : 0);
  }
}

void Config::require_all_used() const {
  for (const auto& [section, keys] : entries_) {
    const auto used = used_.find(section);
    for (const auto& [key, entry] : keys)
      if (used == used_.end() || !used->second.count(key))
        throw ParseError("unknown key '" + section + "." + key + "'", entry.line);
  }
}

std::string Config::echo() const {
  std::string out;
  for (const auto& [section, keys] : used_) {
    out += "[" + section + "]\n";
    for (const auto& [key, raw] : keys) out += key + " = " + raw + "\n";
    out += "\n";
  }
  return out;
}

} // namespace dne
