#ifndef DNE_MESH_HPP
#define DNE_MESH_HPP

#include "dne/operator_model.hpp"
#include "dne/types.hpp"

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace dne {

/// Uniform P1 mesh of an interval (segments) or an axis-aligned rectangle
/// (each cell split into two right triangles along the lower-left to
/// upper-right diagonal).
///
/// Two quadrature rules live on the mesh: the one-point barycentric rule on
/// elements, used for the diffusion term (exact, gradients are constant per
/// element), and the lumped vertex rule m_i = sum_{e ∋ i} |e| / (d+1), used
/// for all zeroth-order terms.
class Mesh {
public:
  using Point = std::array<double, 2>;

  static Mesh interval(double a, double b, int cells);
  static Mesh rectangle(Point lower, Point upper, int cells_x, int cells_y);

  int dimension() const noexcept { return dimension_; }
  const Point& lower() const noexcept { return lower_; }
  const Point& upper() const noexcept { return upper_; }
  std::array<int, 2> resolution() const noexcept { return cells_; }
  double spacing(int axis) const;
  double domain_measure() const;

  std::size_t num_vertices() const noexcept { return vertices_.size(); }
  std::size_t num_elements() const noexcept { return measures_.size(); }
  std::size_t vertices_per_element() const noexcept { return static_cast<std::size_t>(dimension_) + 1; }

  const Point& vertex(std::size_t i) const { return vertices_[i]; }
  std::span<const int> element(std::size_t e) const {
    return {connectivity_.data() + e * vertices_per_element(), vertices_per_element()};
  }
  double measure(std::size_t e) const { return measures_[e]; }
  const Point& barycenter(std::size_t e) const { return barycenters_[e]; }
  /// Gradient of the local hat function `local` on element e.
  const Vec& shape_gradient(std::size_t e, std::size_t local) const {
    return shape_gradients_[e * vertices_per_element() + local];
  }

  double lumped_weight(std::size_t i) const { return lumped_[i]; }
  std::span<const double> lumped_weights() const noexcept { return lumped_; }

  bool is_boundary(std::size_t i) const { return boundary_[i] != 0; }
  /// Unknown index of vertex i, or -1 on the boundary.
  int dof(std::size_t i) const { return dof_[i]; }
  std::span<const int> interior_vertices() const noexcept { return interior_; }
  std::size_t num_dofs() const noexcept { return interior_.size(); }

  /// Exact distance to the boundary of the interval or rectangle.
  double boundary_distance(const Point& x) const;

private:
  Mesh() = default;
  void finalize();

  int dimension_ = 1;
  Point lower_{0.0, 0.0};
  Point upper_{1.0, 0.0};
  std::array<int, 2> cells_{1, 0};
  std::vector<Point> vertices_;
  std::vector<int> connectivity_;
  std::vector<double> measures_;
  std::vector<Point> barycenters_;
  std::vector<Vec> shape_gradients_;
  std::vector<double> lumped_;
  std::vector<char> boundary_;
  std::vector<int> dof_;
  std::vector<int> interior_;
};

using MeshPtr = std::shared_ptr<const Mesh>;

/// Nodal values of a continuous P1 function with homogeneous Dirichlet data.
class DiscreteField {
public:
  /// Throws DomainError if values are non-finite or nonzero on the boundary.
  DiscreteField(MeshPtr mesh, Vector values);

  static DiscreteField zero(MeshPtr mesh);
  /// Nodal interpolant of fn; boundary vertices are set to zero.
  static DiscreteField interpolate(MeshPtr mesh, const std::function<double(const Mesh::Point&)>& fn);

  const Mesh& mesh() const noexcept { return *mesh_; }
  const MeshPtr& mesh_ptr() const noexcept { return mesh_; }
  const Vector& values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }

  /// Values at interior vertices, ordered by Mesh::dof.
  Vector interior_values() const;
  /// Field with the given interior values and zero boundary data.
  static DiscreteField from_interior(MeshPtr mesh, const Vector& interior);

  /// Nodal power map v -> (v^+)^power.
  DiscreteField power(double exponent) const;
  DiscreteField scaled(double factor) const;

private:
  MeshPtr mesh_;
  Vector values_;
};

/// Per-element gradient of the P1 interpolant.
Vec element_gradient(const Mesh& mesh, std::size_t e, const Vector& nodal);
std::vector<Vec> gradient(const DiscreteField& field);

/// sum_e |e| A(x_e, grad v) / p(x_e); the operator lives on barycenters.
double modular(const DiscreteField& field, const LerayLionsOperator& op);

/// Lumped sum_i m_i w_i (v_i^+)^exponent; weight lives on vertices.
double lq_integral(const DiscreteField& field, std::span<const double> weight, double exponent);
double lq_integral(const DiscreteField& field, double exponent);

/// Lumped L2 norm of (u^power - v^power), or of its positive part.
double l2_norm_diff_power(const DiscreteField& u, const DiscreteField& v, double power,
                          bool positive_part);

/// Lumped L^r norm of a vertex array (r >= 1).
double lumped_norm(const Mesh& mesh, std::span<const double> values, double r = 2.0);
/// Lumped L2 norm of the positive part of a vertex array.
double lumped_norm_positive(const Mesh& mesh, std::span<const double> values);

struct BoundaryDistance {
  std::vector<double> at_vertices;
  std::vector<double> at_barycenters;
};

BoundaryDistance boundary_distance_field(const Mesh& mesh);

/// Function sampled at every vertex / barycenter.
std::vector<double> sample_at_vertices(const Mesh& mesh, const std::function<double(const Mesh::Point&)>& fn);
std::vector<double> sample_at_barycenters(const Mesh& mesh, const std::function<double(const Mesh::Point&)>& fn);

} // namespace dne

#endif
