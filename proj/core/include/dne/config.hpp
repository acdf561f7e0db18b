#ifndef DNE_CONFIG_HPP
#define DNE_CONFIG_HPP

#include "dne/mesh.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dne {

/// Malformed configuration text (syntax, unknown key, wrong value type).
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  int line() const noexcept { return line_; }

private:
  int line_ = 0;
};

/// Named function primitive of the config grammar, e.g. `bump(2, 1.5)` or
/// `file("h.csv")`. Evaluated on a mesh's vertices or element barycenters.
///
///   constant(c)                 c
///   affine(c0, c1[, c2])        c0 + c1 x + c2 y
///   bump(a[, s])                a * prod_i (4 (x_i - lo_i)(hi_i - x_i) / (hi_i - lo_i)^2)^s
///   sin_product(a[, k])         a * prod_i sin(k pi (x_i - lo_i) / (hi_i - lo_i))
///   delta_power(a, s)           a * delta(x)^s, delta the distance to the boundary
///   file(path)                  vertex values read from a field CSV
struct FunctionSpec {
  std::string name;
  std::vector<double> args;
  std::filesystem::path path; // only for file(...)

  static FunctionSpec parse(const std::string& text, const std::filesystem::path& base_dir);
  std::string to_string() const;

  std::vector<double> at_vertices(const Mesh& mesh) const;
  /// Primitives are evaluated at barycenters; file data is averaged over
  /// each element's vertices.
  std::vector<double> at_barycenters(const Mesh& mesh) const;

private:
  double eval(const Mesh& mesh, const Mesh::Point& x) const;
};

/// Sectioned key-value text:
///
///   # comment
///   [section]
///   key = 1.5              number
///   key = true             boolean
///   key = word             bare string
///   key = "text"           quoted string
///   key = [1, 2, 3]        list of numbers
///   key = bump(2, 1.5)     function primitive
///
/// Every typed getter records the value it returned (including defaults), so
/// echo() reproduces the effective configuration of a run.
class Config {
public:
  static Config parse(const std::string& text, std::filesystem::path base_dir = {});
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;
  void set(const std::string& section, const std::string& key, const std::string& raw);

  double get_double(const std::string& section, const std::string& key, std::optional<double> fallback = {}) const;
  int get_int(const std::string& section, const std::string& key, std::optional<int> fallback = {}) const;
  bool get_bool(const std::string& section, const std::string& key, std::optional<bool> fallback = {}) const;
  std::string get_string(const std::string& section, const std::string& key,
                         std::optional<std::string> fallback = {}) const;
  std::vector<double> get_list(const std::string& section, const std::string& key,
                               std::optional<std::vector<double>> fallback = {}) const;
  FunctionSpec get_function(const std::string& section, const std::string& key,
                            std::optional<std::string> fallback = {}) const;

  /// Throws ParseError naming the first key no getter asked for.
  void require_all_used() const;

  /// Effective configuration (values actually read, defaults included) in
  /// the same grammar.
  std::string echo() const;

  const std::filesystem::path& base_dir() const noexcept { return base_dir_; }

private:
  struct Entry {
    std::string raw;
    int line = 0;
  };
  const Entry* find(const std::string& section, const std::string& key) const;
  void record(const std::string& section, const std::string& key, const std::string& raw) const;

  std::map<std::string, std::map<std::string, Entry>> entries_;
  std::filesystem::path base_dir_;
  mutable std::map<std::string, std::map<std::string, std::string>> used_;
};

} // namespace dne

#endif
