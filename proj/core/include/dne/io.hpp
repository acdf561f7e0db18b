#ifndef DNE_IO_HPP
#define DNE_IO_HPP

#include "dne/mesh.hpp"

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace dne {

/// Reported for any file system failure; the message carries the path.
class IoError : public std::runtime_error {
public:
  IoError(const std::filesystem::path& path, const std::string& what)
      : std::runtime_error(path.string() + ": " + what) {}
};

/// Writes `content` to a temporary sibling and renames it over `path`.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_text(const std::filesystem::path& path);

/// Field CSV: header `# columns: x,value` (1D) or `# columns: x,y,value`
/// (2D), one row per vertex in index order, values printed with 17
/// significant digits so a reload is exact.
std::string field_to_csv(const Mesh& mesh, const std::vector<double>& values);
void write_field_csv(const std::filesystem::path& path, const DiscreteField& field);
void write_vertex_csv(const std::filesystem::path& path, const Mesh& mesh, const std::vector<double>& values);

/// Vertex values of a field CSV; rows must match the mesh vertices in order
/// and position.
std::vector<double> read_vertex_csv(const std::filesystem::path& path, const Mesh& mesh);
DiscreteField read_field_csv(const std::filesystem::path& path, const MeshPtr& mesh);

/// Table with a `# columns: ...` header; numbers print with 17 digits.
struct Table {
  using Cell = std::variant<double, std::string>;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  std::string to_csv() const;
};

} // namespace dne

#endif
