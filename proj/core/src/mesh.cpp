#include "dne/mesh.hpp"

#include <algorithm>
#include <cmath>

namespace dne {

Mesh Mesh::interval(double a, double b, int cells) {
  if (!(b > a)) throw DomainError("interval must satisfy a < b");
  if (cells < 2) throw DomainError("interval mesh needs at least 2 cells");
  Mesh mesh;
  mesh.dimension_ = 1;
  mesh.lower_ = {a, 0.0};
  mesh.upper_ = {b, 0.0};
  mesh.cells_ = {cells, 0};
  const double h = (b - a) / cells;
  mesh.vertices_.reserve(static_cast<std::size_t>(cells) + 1);
  for (int i = 0; i <= cells; ++i) mesh.vertices_.push_back({i == cells ? b : a + i * h, 0.0});
  for (int i = 0; i < cells; ++i) {
    mesh.connectivity_.push_back(i);
    mesh.connectivity_.push_back(i + 1);
  }
  mesh.finalize();
  return mesh;
}

Mesh Mesh::rectangle(Point lower, Point upper, int cells_x, int cells_y) {
  if (!(upper[0] > lower[0] && upper[1] > lower[1])) throw DomainError("degenerate rectangle");
  if (cells_x < 2 || cells_y < 2) throw DomainError("rectangle mesh needs at least 2 cells per axis");
  Mesh mesh;
  mesh.dimension_ = 2;
  mesh.lower_ = lower;
  mesh.upper_ = upper;
  mesh.cells_ = {cells_x, cells_y};
  const double hx = (upper[0] - lower[0]) / cells_x;
  const double hy = (upper[1] - lower[1]) / cells_y;
  for (int j = 0; j <= cells_y; ++j) {
    for (int i = 0; i <= cells_x; ++i) {
      mesh.vertices_.push_back({i == cells_x ? upper[0] : lower[0] + i * hx,
                                j == cells_y ? upper[1] : lower[1] + j * hy});
    }
  }
  auto id = [cells_x](int i, int j) { return j * (cells_x + 1) + i; };
  for (int j = 0; j < cells_y; ++j) {
    for (int i = 0; i < cells_x; ++i) {
      // lower-right triangle, then upper-left; right angle first
      for (int v : {id(i + 1, j), id(i, j), id(i + 1, j + 1)}) mesh.connectivity_.push_back(v);
      for (int v : {id(i, j + 1), id(i + 1, j + 1), id(i, j)}) mesh.connectivity_.push_back(v);
    }
  }
  mesh.finalize();
  return mesh;
}

void Mesh::finalize() {
  const std::size_t nv = vertices_.size();
  const std::size_t npe = vertices_per_element();
  const std::size_t ne = connectivity_.size() / npe;
  measures_.resize(ne);
  barycenters_.resize(ne);
  shape_gradients_.resize(ne * npe);
  lumped_.assign(nv, 0.0);

  for (std::size_t e = 0; e < ne; ++e) {
    const auto verts = element(e);
    if (dimension_ == 1) {
      const double x0 = vertices_[verts[0]][0];
      const double x1 = vertices_[verts[1]][0];
      const double len = x1 - x0;
      measures_[e] = len;
      barycenters_[e] = {0.5 * (x0 + x1), 0.0};
      Vec g0(1), g1(1);
      g0[0] = -1.0 / len;
      g1[0] = 1.0 / len;
      shape_gradients_[e * npe] = g0;
      shape_gradients_[e * npe + 1] = g1;
    } else {
      const Point& a = vertices_[verts[0]];
      const Point& b = vertices_[verts[1]];
      const Point& c = vertices_[verts[2]];
      const double det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
      measures_[e] = 0.5 * std::abs(det);
      barycenters_[e] = {(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0};
      const std::array<const Point*, 3> p{&a, &b, &c};
      for (std::size_t l = 0; l < 3; ++l) {
        const Point& q1 = *p[(l + 1) % 3];
        const Point& q2 = *p[(l + 2) % 3];
        Vec g(2);
        g[0] = (q1[1] - q2[1]) / det;
        g[1] = (q2[0] - q1[0]) / det;
        shape_gradients_[e * npe + l] = g;
      }
    }
    if (!(measures_[e] > 0.0)) throw DomainError("mesh element with nonpositive measure");
    for (int v : verts) lumped_[v] += measures_[e] / static_cast<double>(npe);
  }

  boundary_.assign(nv, 0);
  dof_.assign(nv, -1);
  interior_.clear();
  for (std::size_t i = 0; i < nv; ++i) {
    const Point& x = vertices_[i];
    bool on = x[0] == lower_[0] || x[0] == upper_[0];
    if (dimension_ == 2) on = on || x[1] == lower_[1] || x[1] == upper_[1];
    boundary_[i] = on ? 1 : 0;
    if (!on) {
      dof_[i] = static_cast<int>(interior_.size());
      interior_.push_back(static_cast<int>(i));
    }
  }
}

double Mesh::spacing(int axis) const {
  if (axis < 0 || axis >= dimension_) throw DomainError("axis out of range");
  return (upper_[axis] - lower_[axis]) / cells_[axis];
}

double Mesh::domain_measure() const {
  double m = upper_[0] - lower_[0];
  if (dimension_ == 2) m *= upper_[1] - lower_[1];
  return m;
}

double Mesh::boundary_distance(const Point& x) const {
  double d = std::min(x[0] - lower_[0], upper_[0] - x[0]);
  if (dimension_ == 2) d = std::min({d, x[1] - lower_[1], upper_[1] - x[1]});
  return std::max(0.0, d);
}

// ----------------------------------------------------------------------------
// DiscreteField
// ----------------------------------------------------------------------------

DiscreteField::DiscreteField(MeshPtr mesh, Vector values) : mesh_(std::move(mesh)), values_(std::move(values)) {
  if (!mesh_) throw DomainError("field without mesh");
  if (static_cast<std::size_t>(values_.size()) != mesh_->num_vertices())
    throw DomainError("field size does not match mesh");
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) throw DomainError("non-finite nodal value");
    if (mesh_->is_boundary(static_cast<std::size_t>(i)) && values_[i] != 0.0)
      throw DomainError("nonzero boundary value violates homogeneous Dirichlet data");
  }
}

DiscreteField DiscreteField::zero(MeshPtr mesh) {
  const auto n = static_cast<Eigen::Index>(mesh->num_vertices());
  return DiscreteField(std::move(mesh), Vector::Zero(n));
}

DiscreteField DiscreteField::interpolate(MeshPtr mesh, const std::function<double(const Mesh::Point&)>& fn) {
  Vector values(static_cast<Eigen::Index>(mesh->num_vertices()));
  for (std::size_t i = 0; i < mesh->num_vertices(); ++i)
    values[static_cast<Eigen::Index>(i)] = mesh->is_boundary(i) ? 0.0 : fn(mesh->vertex(i));
  return DiscreteField(std::move(mesh), std::move(values));
}

Vector DiscreteField::interior_values() const {
  Vector out(static_cast<Eigen::Index>(mesh_->num_dofs()));
  const auto interior = mesh_->interior_vertices();
  for (std::size_t d = 0; d < interior.size(); ++d) out[static_cast<Eigen::Index>(d)] = values_[interior[d]];
  return out;
}

DiscreteField DiscreteField::from_interior(MeshPtr mesh, const Vector& interior) {
  if (static_cast<std::size_t>(interior.size()) != mesh->num_dofs()) throw DomainError("interior size mismatch");
  Vector values = Vector::Zero(static_cast<Eigen::Index>(mesh->num_vertices()));
  const auto ids = mesh->interior_vertices();
  for (std::size_t d = 0; d < ids.size(); ++d) values[ids[d]] = interior[static_cast<Eigen::Index>(d)];
  return DiscreteField(std::move(mesh), std::move(values));
}

DiscreteField DiscreteField::power(double exponent) const {
  Vector out = values_.unaryExpr([exponent](double v) { return v > 0.0 ? std::pow(v, exponent) : 0.0; });
  return DiscreteField(mesh_, std::move(out));
}

DiscreteField DiscreteField::scaled(double factor) const { return DiscreteField(mesh_, values_ * factor); }

// ----------------------------------------------------------------------------
// Integrals and norms
// ----------------------------------------------------------------------------

Vec element_gradient(const Mesh& mesh, std::size_t e, const Vector& nodal) {
  const auto verts = mesh.element(e);
  Vec g = Vec::Zero(mesh.dimension());
  for (std::size_t l = 0; l < verts.size(); ++l) g += nodal[verts[l]] * mesh.shape_gradient(e, l);
  return g;
}

std::vector<Vec> gradient(const DiscreteField& field) {
  const Mesh& mesh = field.mesh();
  std::vector<Vec> out(mesh.num_elements());
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) out[e] = element_gradient(mesh, e, field.values());
  return out;
}

double modular(const DiscreteField& field, const LerayLionsOperator& op) {
  const Mesh& mesh = field.mesh();
  if (op.num_points() != mesh.num_elements()) throw DomainError("operator is not attached to this mesh");
  double total = 0.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const Vec g = element_gradient(mesh, e, field.values());
    total += mesh.measure(e) * op.eval_A(e, g) / op.p(e);
  }
  return total;
}

double lq_integral(const DiscreteField& field, std::span<const double> weight, double exponent) {
  if (!(exponent > 0.0)) throw DomainError("exponent must be positive");
  const Mesh& mesh = field.mesh();
  if (weight.size() != mesh.num_vertices()) throw DomainError("weight must live on vertices");
  double total = 0.0;
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
    const double v = field[i];
    if (v > 0.0) total += mesh.lumped_weight(i) * weight[i] * std::pow(v, exponent);
  }
  return total;
}

double lq_integral(const DiscreteField& field, double exponent) {
  const std::vector<double> ones(field.mesh().num_vertices(), 1.0);
  return lq_integral(field, ones, exponent);
}

double l2_norm_diff_power(const DiscreteField& u, const DiscreteField& v, double power, bool positive_part) {
  if (u.mesh_ptr() != v.mesh_ptr() && u.size() != v.size()) throw DomainError("fields live on different meshes");
  if (u.size() != v.size()) throw DomainError("fields live on different meshes");
  const Mesh& mesh = u.mesh();
  const bool integer_power = power == std::floor(power);
  double sum = 0.0;
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
    if (!integer_power && (u[i] < 0.0 || v[i] < 0.0))
      throw DomainError("non-integer power of a negative value");
    double d = std::pow(u[i], power) - std::pow(v[i], power);
    if (positive_part) d = std::max(d, 0.0);
    sum += mesh.lumped_weight(i) * d * d;
  }
  return std::sqrt(sum);
}

double lumped_norm(const Mesh& mesh, std::span<const double> values, double r) {
  if (values.size() != mesh.num_vertices()) throw DomainError("values must live on vertices");
  if (!(r >= 1.0)) throw DomainError("norm exponent must be >= 1");
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) sum += mesh.lumped_weight(i) * std::pow(std::abs(values[i]), r);
  return std::pow(sum, 1.0 / r);
}

double lumped_norm_positive(const Mesh& mesh, std::span<const double> values) {
  if (values.size() != mesh.num_vertices()) throw DomainError("values must live on vertices");
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = std::max(values[i], 0.0);
    sum += mesh.lumped_weight(i) * v * v;
  }
  return std::sqrt(sum);
}

BoundaryDistance boundary_distance_field(const Mesh& mesh) {
  BoundaryDistance out;
  out.at_vertices.resize(mesh.num_vertices());
  out.at_barycenters.resize(mesh.num_elements());
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i) out.at_vertices[i] = mesh.boundary_distance(mesh.vertex(i));
  for (std::size_t e = 0; e < mesh.num_elements(); ++e)
    out.at_barycenters[e] = mesh.boundary_distance(mesh.barycenter(e));
  return out;
}

std::vector<double> sample_at_vertices(const Mesh& mesh, const std::function<double(const Mesh::Point&)>& fn) {
  std::vector<double> out(mesh.num_vertices());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fn(mesh.vertex(i));
  return out;
}

std::vector<double> sample_at_barycenters(const Mesh& mesh, const std::function<double(const Mesh::Point&)>& fn) {
  std::vector<double> out(mesh.num_elements());
  for (std::size_t e = 0; e < out.size(); ++e) out[e] = fn(mesh.barycenter(e));
  return out;
}

} // namespace dne
