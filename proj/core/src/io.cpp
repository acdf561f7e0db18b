#include "dne/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dne {

namespace {

void append_number(std::string& out, double value) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value); // shortest round-trip form
  out.append(buffer, result.ptr);
}

std::string header(const Mesh& mesh) {
  return mesh.dimension() == 1 ? "# columns: x,value\n" : "# columns: x,y,value\n";
}

std::vector<double> parse_row(const std::string& line, const std::filesystem::path& path, int line_no) {
  std::vector<double> row;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t end = line.find(',', pos);
    if (end == std::string::npos) end = line.size();
    std::size_t a = pos, b = end;
    while (a < b && std::isspace(static_cast<unsigned char>(line[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(line[b - 1]))) --b;
    double value = 0.0;
    const auto result = std::from_chars(line.data() + a, line.data() + b, value);
    if (result.ec != std::errc() || result.ptr != line.data() + b)
      throw IoError(path, "line " + std::to_string(line_no) + ": malformed number");
    row.push_back(value);
    pos = end + 1;
  }
  return row;
}

} // namespace

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError(path.parent_path(), "cannot create directory: " + ec.message());
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(tmp, "cannot open for writing");
    out << content;
    out.flush();
    if (!out) throw IoError(tmp, "write failed");
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError(path, "rename failed: " + ec.message());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string field_to_csv(const Mesh& mesh, const std::vector<double>& values) {
  if (values.size() != mesh.num_vertices()) throw DomainError("one value per vertex is required");
  std::string out = header(mesh);
  out.reserve(out.size() + values.size() * 48);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Mesh::Point& x = mesh.vertex(i);
    for (int d = 0; d < mesh.dimension(); ++d) {
      append_number(out, x[static_cast<std::size_t>(d)]);
      out += ',';
    }
    append_number(out, values[i]);
    out += '\n';
  }
  return out;
}

void write_field_csv(const std::filesystem::path& path, const DiscreteField& field) {
  const auto& v = field.values();
  write_vertex_csv(path, field.mesh(), std::vector<double>(v.data(), v.data() + v.size()));
}

void write_vertex_csv(const std::filesystem::path& path, const Mesh& mesh, const std::vector<double>& values) {
  write_text_atomic(path, field_to_csv(mesh, values));
}

std::vector<double> read_vertex_csv(const std::filesystem::path& path, const Mesh& mesh) {
  std::istringstream in(read_text(path));
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line) || line != header(mesh).substr(0, header(mesh).size() - 1))
    throw IoError(path, "expected header '" + header(mesh).substr(0, header(mesh).size() - 1) + "'");
  ++line_no;
  const auto width = static_cast<std::size_t>(mesh.dimension()) + 1;
  const double tol = 1e-9 * std::max(1.0, std::abs(mesh.upper()[0] - mesh.lower()[0]));
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<double> row = parse_row(line, path, line_no);
    if (row.size() != width) throw IoError(path, "line " + std::to_string(line_no) + ": wrong column count");
    if (values.size() >= mesh.num_vertices()) throw IoError(path, "more rows than mesh vertices");
    const Mesh::Point& x = mesh.vertex(values.size());
    for (std::size_t d = 0; d + 1 < width; ++d)
      if (std::abs(row[d] - x[d]) > tol)
        throw IoError(path, "line " + std::to_string(line_no) + ": coordinates do not match mesh vertex");
    values.push_back(row.back());
  }
  if (values.size() != mesh.num_vertices()) throw IoError(path, "fewer rows than mesh vertices");
  return values;
}

DiscreteField read_field_csv(const std::filesystem::path& path, const MeshPtr& mesh) {
  const std::vector<double> values = read_vertex_csv(path, *mesh);
  return DiscreteField(mesh, Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size())));
}

std::string Table::to_csv() const {
  std::string out = "# columns: ";
  for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + columns[c];
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      if (const double* number = std::get_if<double>(&row[c])) append_number(out, *number);
      else out += std::get<std::string>(row[c]);
    }
    out += '\n';
  }
  return out;
}

} // namespace dne
