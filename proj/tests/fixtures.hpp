#ifndef DNE_TEST_FIXTURES_HPP
#define DNE_TEST_FIXTURES_HPP

#include "dne/elliptic.hpp"
#include "dne/mesh.hpp"
#include "dne/operator_model.hpp"

#include <cmath>
#include <memory>
#include <numbers>

namespace dne::testing {

inline MeshPtr interval(int cells) { return std::make_shared<const Mesh>(Mesh::interval(0.0, 1.0, cells)); }

inline MeshPtr unit_square(int cells) {
  return std::make_shared<const Mesh>(Mesh::rectangle({0.0, 0.0}, {1.0, 1.0}, cells, cells));
}

inline std::shared_ptr<const LerayLionsOperator> isotropic(const MeshPtr& mesh, double p) {
  return std::make_shared<const LerayLionsOperator>(
      LerayLionsOperator::isotropic(ExponentField::constant(p, mesh->num_elements()), mesh->dimension()));
}

/// Isotropic operator with p affine in the first coordinate, p_lo at x = 0 and p_hi at x = 1.
inline std::shared_ptr<const LerayLionsOperator> affine_isotropic(const MeshPtr& mesh, double p_lo, double p_hi) {
  const auto p = sample_at_barycenters(*mesh, [&](const Mesh::Point& x) { return p_lo + (p_hi - p_lo) * x[0]; });
  return std::make_shared<const LerayLionsOperator>(LerayLionsOperator::isotropic(ExponentField(p), mesh->dimension()));
}

inline std::shared_ptr<const SourceTerm> source(const MeshPtr& mesh, double g, double gamma, double beta, double q) {
  return std::make_shared<const SourceTerm>(std::vector<double>(mesh->num_vertices(), g),
                                            boundary_distance_field(*mesh).at_vertices, gamma, beta, q);
}

inline std::vector<double> vertex_values(const MeshPtr& mesh, const std::function<double(const Mesh::Point&)>& fn) {
  return sample_at_vertices(*mesh, fn);
}

/// prod_i sin(pi x_i), scaled.
inline DiscreteField sine_bump(const MeshPtr& mesh, double amplitude) {
  return DiscreteField::interpolate(mesh, [&](const Mesh::Point& x) {
    double v = amplitude;
    for (int i = 0; i < mesh->dimension(); ++i) v *= std::sin(std::numbers::pi * x[static_cast<std::size_t>(i)]);
    return v;
  });
}

inline double max_abs_diff(const DiscreteField& a, const DiscreteField& b) {
  return (a.values() - b.values()).cwiseAbs().maxCoeff();
}

} // namespace dne::testing

#endif
