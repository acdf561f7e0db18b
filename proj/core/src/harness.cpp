#include "dne/harness.hpp"

#include "dne/picone_library.hpp"
#include "dne/sampling.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

namespace dne {

double CheckReport::measurement(const std::string& name) const {
  for (const auto& [key, value] : measurements)
    if (key == name) return value;
  throw DomainError("no measurement named " + name);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTiny = std::numeric_limits<double>::min();

/// Worst margin seen in one chunk, plus an auxiliary minimum (used for
/// strictness) and its sample count.
struct Tracker {
  double worst = kInf;
  std::string location;
  double aux = kInf;
  std::size_t aux_count = 0;

  template <class Describe>
  void note(double margin, Describe&& describe) {
    if (margin < worst || std::isnan(margin)) {
      worst = std::isnan(margin) ? -kInf : margin;
      location = describe();
    }
  }
};

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, count); ++w)
    pool.emplace_back([&, w]() {
      for (std::size_t i = w; i < count; i += workers) body(i);
    });
  for (auto& t : pool) t.join();
}

/// Runs `sample(engine, tracker)` options.samples times in seed-addressed
/// chunks and reduces the trackers in chunk order.
template <class Sample>
Tracker run_sampling(const SamplingOptions& options, Sample&& sample) {
  const std::size_t chunks = (options.samples + sampling::kChunkSize - 1) / sampling::kChunkSize;
  std::vector<Tracker> partial(chunks);
  parallel_for(chunks, options.threads, [&](std::size_t c) {
    auto engine = sampling::chunk_engine(options.seed, c);
    const std::size_t begin = c * sampling::kChunkSize;
    const std::size_t end = std::min(options.samples, begin + sampling::kChunkSize);
    for (std::size_t i = begin; i < end; ++i) sample(engine, partial[c]);
  });
  Tracker total;
  for (const Tracker& t : partial) {
    if (t.worst < total.worst) {
      total.worst = t.worst;
      total.location = t.location;
    }
    total.aux = std::min(total.aux, t.aux);
    total.aux_count += t.aux_count;
  }
  return total;
}

std::string format_vec(const Vec& v) {
  std::ostringstream out;
  out.precision(6);
  out << "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) out << (i ? ", " : "") << v[i];
  out << ")";
  return out.str();
}

std::size_t random_point(std::mt19937_64& engine, const LerayLionsOperator& op) {
  return std::uniform_int_distribution<std::size_t>(0, op.num_points() - 1)(engine);
}

CheckReport finish(std::string name, std::size_t samples, const Tracker& t, double slack_value) {
  CheckReport report;
  report.check_name = std::move(name);
  report.samples = samples;
  report.worst_margin = samples == 0 ? 0.0 : t.worst;
  report.location = t.location;
  report.slack = slack_value;
  report.passed = report.worst_margin >= -slack_value;
  return report;
}

Vec random_interior_point(std::mt19937_64& engine, int dim) {
  Vec x(dim);
  for (int i = 0; i < dim; ++i) x[i] = sampling::uniform(engine, 0.01, 0.99);
  return x;
}

constexpr std::array<double, 2> kUnitLower{0.0, 0.0};
constexpr std::array<double, 2> kUnitUpper{1.0, 1.0};

std::vector<double> interior_gap(const DiscreteField& a, const DiscreteField& b) {
  std::vector<double> out;
  for (int i : a.mesh().interior_vertices())
    out.push_back(b[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(i)]);
  return out;
}

std::vector<double> power_difference(const DiscreteField& a, const DiscreteField& b, double q) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    out[i] = std::pow(std::max(a[i], 0.0), q) - std::pow(std::max(b[i], 0.0), q);
  return out;
}

} // namespace

// ---------------------------------------------------------------------------
// Pointwise algebra
// ---------------------------------------------------------------------------

CheckReport check_homogeneity(const LerayLionsOperator& op, const SamplingOptions& options) {
  const Tracker t = run_sampling(options, [&](std::mt19937_64& engine, Tracker& tr) {
    const std::size_t k = random_point(engine, op);
    const Vec xi = sampling::random_vector(engine, op.dimension());
    const double scale = std::pow(10.0, sampling::uniform(engine, -2.0, 2.0));
    const double lhs = op.eval_A(k, Vec(scale * xi));
    const double rhs = std::pow(scale, op.p(k)) * op.eval_A(k, xi);
    tr.note(-std::abs(lhs - rhs) / std::max(1.0, lhs),
            [&] { return "k=" + std::to_string(k) + " xi=" + format_vec(xi) + " t=" + std::to_string(scale); });
  });
  return finish("homogeneity", options.samples, t, slack::kHomogeneity);
}

CheckReport check_euler(const LerayLionsOperator& op, const SamplingOptions& options) {
  const Tracker t = run_sampling(options, [&](std::mt19937_64& engine, Tracker& tr) {
    const std::size_t k = random_point(engine, op);
    const Vec xi = sampling::random_vector(engine, op.dimension());
    const double a = op.eval_A(k, xi);
    const double ax = op.eval_flux(k, xi).dot(xi);
    tr.note(-std::abs(ax - a) / std::max(a, kTiny), [&] { return "k=" + std::to_string(k) + " xi=" + format_vec(xi); });
  });
  return finish("euler", options.samples, t, slack::kEuler);
}

CheckReport check_growth(const LerayLionsOperator& op, const SamplingOptions& options) {
  const double gamma = op.ellipticity_constant();
  const auto blocks = static_cast<double>(op.num_blocks());
  const Tracker t = run_sampling(options, [&](std::mt19937_64& engine, Tracker& tr) {
    const std::size_t k = random_point(engine, op);
    const Vec xi = sampling::random_vector(engine, op.dimension());
    const double p = op.p(k);
    const double norm_p = std::pow(xi.norm(), p);
    const double a = op.eval_A(k, xi);
    const double lower = gamma / (p - 1.0) * norm_p;
    const double upper = op.weight_ceiling() * std::max(1.0, std::pow(blocks, 1.0 - 0.5 * p)) * norm_p;
    const double margin = std::min((a - lower) / std::max(a, kTiny), (upper - a) / std::max(upper, kTiny));
    tr.note(margin, [&] { return "k=" + std::to_string(k) + " p=" + std::to_string(p) + " xi=" + format_vec(xi); });
  });
  return finish("growth", options.samples, t, slack::kGrowth);
}

CheckReport check_convexity(const LerayLionsOperator& op, const SamplingOptions& options) {
  const Tracker t = run_sampling(options, [&](std::mt19937_64& engine, Tracker& tr) {
    const std::size_t k = random_point(engine, op);
    const auto [xi, eta] = sampling::random_pair(engine, op.dimension());
    const double s = sampling::uniform(engine, 0.0, 1.0);
    const double lhs = op.eval_A(k, Vec(s * xi + (1.0 - s) * eta));
    const double rhs = s * op.eval_A(k, xi) + (1.0 - s) * op.eval_A(k, eta);
    tr.note((rhs - lhs) / std::max(1.0, rhs), [&] {
      return "k=" + std::to_string(k) + " xi=" + format_vec(xi) + " eta=" + format_vec(eta) + " t=" + std::to_string(s);
    });
  });
  return finish("convexity", options.samples, t, slack::kConvexity);
}

CheckReport check_flux_jacobian(const LerayLionsOperator& op, const SamplingOptions& options) {
  const double gamma = op.ellipticity_constant();
  const Tracker t = run_sampling(options, [&](std::mt19937_64& engine, Tracker& tr) {
    const std::size_t k = random_point(engine, op);
    const Vec xi = sampling::random_vector(engine, op.dimension());
    const Mat jac = op.eval_flux_jacobian(k, xi);
    const double size = jac.cwiseAbs().maxCoeff();
    const double asym = (jac - jac.transpose()).cwiseAbs().maxCoeff() / std::max(size, kTiny);
    const Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (jac + jac.transpose()), Eigen::EigenvaluesOnly);
    const double lambda_min = eig.eigenvalues().minCoeff();
    const double floor = gamma * std::pow(xi.norm(), op.p(k) - 2.0);
    const double margin = std::min((lambda_min - floor) / std::max(std::abs(lambda_min), floor), -asym);
    tr.note(margin, [&] {
      return "k=" + std::to_string(k) + " xi=" + format_vec(xi) + " lambda_min=" + std::to_string(lambda_min);
    });
  });
  return finish("flux_jacobian", options.samples, t, slack::kJacobian);
}

CheckReport check_flux_jacobian_fd(const LerayLionsOperator& op, const SamplingOptions& options) {
  const int dim = op.dimension();
  const Tracker t = run_sampling(options, [&](std::mt19937_64& engine, Tracker& tr) {
    const std::size_t k = random_point(engine, op);
    // Keep every block away from zero so the central stencil stays on one side of the kink.
    Vec xi;
    double smallest = 0.0;
    for (int attempt = 0; attempt < 100; ++attempt) {
      xi = sampling::random_vector(engine, dim);
      smallest = kInf;
      for (const auto& block : op.blocks()) {
        double s = 0.0;
        for (int i : block) s += xi[i] * xi[i];
        smallest = std::min(smallest, std::sqrt(s));
      }
      if (smallest >= 1e-2 * xi.norm()) break;
    }
    const double h = 1e-6 * smallest;
    const Mat jac = op.eval_flux_jacobian(k, xi);
    Mat fd(dim, dim);
    for (int i = 0; i < dim; ++i) {
      Vec plus = xi, minus = xi;
      plus[i] += h;
      minus[i] -= h;
      fd.col(i) = (op.eval_flux(k, plus) - op.eval_flux(k, minus)) / (2.0 * h);
    }
    const double err = (fd - jac).cwiseAbs().maxCoeff() / std::max(jac.cwiseAbs().maxCoeff(), kTiny);
    tr.note((slack::kJacobianFd - err) / slack::kJacobianFd,
            [&] { return "k=" + std::to_string(k) + " xi=" + format_vec(xi) + " err=" + std::to_string(err); });
  });
  return finish("flux_jacobian_fd", options.samples, t, 0.0);
}

CheckReport check_monotonicity_gap(const LerayLionsOperator& op, const SamplingOptions& options) {
  const Tracker t = run_sampling(options, [&](std::mt19937_64& engine, Tracker& tr) {
    const std::size_t k = random_point(engine, op);
    const auto [xi, eta] = sampling::random_pair(engine, op.dimension());
    const Gap gap = op.monotonicity_gap(k, xi, eta);
    const double scale = std::max({gap.lhs, gap.rhs, kTiny});
    tr.note((gap.lhs - gap.rhs) / scale,
            [&] { return "k=" + std::to_string(k) + " xi=" + format_vec(xi) + " eta=" + format_vec(eta); });
  });
  CheckReport report = finish("monotonicity_gap", options.samples, t, slack::kMonotonicity);
  report.measurements.emplace_back("gamma0", op.gamma0());
  return report;
}

CheckReport check_picone(const LerayLionsOperator& op, double r, const SamplingOptions& options) {
  if (!(r >= 1.0 && r < op.exponent().p_minus())) throw DomainError("Picone exponent r must lie in [1, p_-)");
  const int dim = op.dimension();
  const Tracker t = run_sampling(options, [&](std::mt19937_64& engine, Tracker& tr) {
    const std::size_t k = random_point(engine, op);
    const TestFunction u = TestFunction::random(engine, dim, kUnitLower, kUnitUpper);
    const TestFunction v = TestFunction::random(engine, dim, kUnitLower, kUnitUpper);
    const Vec x = random_interior_point(engine, dim);
    const double uv = u.value(x), vv = v.value(x);
    const Vec gu = u.gradient(x), gv = v.gradient(x);
    const PiconeTriple triple = picone_triple(uv, gu, vv, gv, r);
    const Gap gap = op.picone_gap(k, triple.grad_u_root, triple.grad_v_root, triple.ratio_grad, r);
    tr.note((gap.rhs - gap.lhs) / std::max(1.0, std::abs(gap.rhs)),
            [&] { return "k=" + std::to_string(k) + " x=" + format_vec(x); });
    if (r > 1.0) {
      const Vec lu = gu / uv, lv = gv / vv;
      const double rel = (lu - lv).norm() / std::max(lu.norm() + lv.norm(), kTiny);
      if (rel >= 1e-2) {
        tr.aux = std::min(tr.aux, (gap.rhs - gap.lhs) / std::max(std::abs(gap.rhs), kTiny));
        ++tr.aux_count;
      }
    }
  });
  CheckReport report = finish("picone", options.samples, t, slack::kPicone);
  report.measurements.emplace_back("r", r);
  if (r > 1.0) {
    report.measurements.emplace_back("strict_samples", static_cast<double>(t.aux_count));
    report.measurements.emplace_back("min_strict_margin", t.aux_count ? t.aux : 0.0);
    if (t.aux_count > 0 && !(t.aux > 0.0)) report.passed = false;
  }
  return report;
}

CheckReport check_lemma21_pointwise(const LerayLionsOperator& op, double r, const SamplingOptions& options) {
  if (!(r >= 1.0 && r < op.exponent().p_minus())) throw DomainError("exponent r must lie in [1, p_-)");
  const int dim = op.dimension();
  const Tracker t = run_sampling(options, [&](std::mt19937_64& engine, Tracker& tr) {
    const std::size_t k = random_point(engine, op);
    const TestFunction w1 = TestFunction::random(engine, dim, kUnitLower, kUnitUpper);
    const TestFunction w2 = TestFunction::random(engine, dim, kUnitLower, kUnitUpper);
    const Vec x = random_interior_point(engine, dim);
    const double v1 = w1.value(x), v2 = w2.value(x);
    const Vec g1 = w1.gradient(x), g2 = w2.gradient(x);
    const Vec a1 = op.eval_flux(k, g1), a2 = op.eval_flux(k, g2);
    const double density = lemma21_density(a1, a2, v1, g1, v2, g2, r);
    const double scale = op.eval_A(k, g1) * (1.0 + (r - 1.0) * std::pow(v2 / v1, r)) +
                         op.eval_A(k, g2) * (1.0 + (r - 1.0) * std::pow(v1 / v2, r)) +
                         r * (std::pow(v2 / v1, r - 1.0) * std::abs(a1.dot(g2)) +
                              std::pow(v1 / v2, r - 1.0) * std::abs(a2.dot(g1)));
    tr.note(density / std::max(scale, kTiny), [&] { return "k=" + std::to_string(k) + " x=" + format_vec(x); });
  });
  CheckReport report = finish("lemma21_pointwise", options.samples, t, slack::kLemma21Pointwise);
  report.measurements.emplace_back("r", r);
  return report;
}

CheckReport check_alg_inequality(double q, const SamplingOptions& options) {
  if (!(q > 1.0)) throw DomainError("q must exceed 1");
  const Tracker t = run_sampling(options, [&](std::mt19937_64& engine, Tracker& tr) {
    const double mode = sampling::uniform(engine, 0.0, 1.0);
    double a = std::pow(10.0, sampling::uniform(engine, -3.0, 3.0));
    double b = std::pow(10.0, sampling::uniform(engine, -3.0, 3.0));
    if (mode < 0.1) b = 0.0;
    else if (mode < 0.2) b = a;
    else if (mode < 0.4) b = a * (1.0 + std::pow(10.0, sampling::uniform(engine, -8.0, 0.0)));
    const double lhs = std::pow(std::abs(a - b), 2.0 * q);
    const double d = std::pow(a, q) - std::pow(b, q);
    const double rhs = d * d;
    tr.note((rhs - lhs) / std::max(1.0, rhs), [&] { return "a=" + std::to_string(a) + " b=" + std::to_string(b); });
  });
  CheckReport report = finish("alg_inequality", options.samples, t, slack::kAlgebraic);
  report.measurements.emplace_back("q", q);
  return report;
}

CheckReport check_source_monotonicity(const SourceTerm& source, const SamplingOptions& options) {
  const Tracker t = run_sampling(options, [&](std::mt19937_64& engine, Tracker& tr) {
    const std::size_t k = std::uniform_int_distribution<std::size_t>(0, source.num_points() - 1)(engine);
    double s1 = std::pow(10.0, sampling::uniform(engine, -6.0, 3.0));
    double s2 = std::pow(10.0, sampling::uniform(engine, -6.0, 3.0));
    if (s1 > s2) std::swap(s1, s2);
    const double r1 = source.ratio(k, s1), r2 = source.ratio(k, s2);
    tr.note((r1 - r2) / std::max(r1, kTiny),
            [&] { return "k=" + std::to_string(k) + " s1=" + std::to_string(s1) + " s2=" + std::to_string(s2); });
  });
  return finish("source_monotonicity", options.samples, t, slack::kSourceRatio);
}

CheckReport check_morawetz(const LerayLionsOperator& op, const SamplingOptions& options) {
  const Tracker t = run_sampling(options, [&](std::mt19937_64& engine, Tracker& tr) {
    const std::size_t k = random_point(engine, op);
    const auto [xi, eta] = sampling::random_pair(engine, op.dimension());
    const Gap gap = op.morawetz_gap(k, xi, eta);
    tr.note((gap.rhs - gap.lhs) / std::max({gap.rhs, gap.lhs, kTiny}),
            [&] { return "k=" + std::to_string(k) + " xi=" + format_vec(xi) + " eta=" + format_vec(eta); });
  });
  CheckReport report = finish("morawetz", options.samples, t, slack::kMorawetz);
  if (!op.exponent().is_constant()) {
    report.measurements.emplace_back("informational", 1.0);
    report.passed = true;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Fields and solves
// ---------------------------------------------------------------------------

CheckReport check_lemma21(const LerayLionsOperator& op, double r, const DiscreteField& w1, const DiscreteField& w2) {
  if (!(r >= 1.0 && r < op.exponent().p_minus())) throw DomainError("exponent r must lie in [1, p_-)");
  if (w1.size() != w2.size()) throw DomainError("fields live on different meshes");
  const Mesh& mesh = w1.mesh();
  if (op.num_points() != mesh.num_elements()) throw DomainError("operator is not attached to this mesh");
  Vector phi1 = Vector::Zero(w1.values().size()), phi2 = Vector::Zero(w1.values().size());
  bool equal = true;
  for (int vi : mesh.interior_vertices()) {
    const auto i = static_cast<std::size_t>(vi);
    const double a = w1[i], b = w2[i];
    if (!(a > 0.0 && b > 0.0)) throw DomainError("fields must be positive at interior vertices");
    equal = equal && a == b;
    const double ar = std::pow(a, r), br = std::pow(b, r);
    phi1[vi] = (ar - br) / std::pow(a, r - 1.0);
    phi2[vi] = (br - ar) / std::pow(b, r - 1.0);
  }
  double value = 0.0, scale = 0.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const Vec a1 = op.eval_flux(e, element_gradient(mesh, e, w1.values()));
    const Vec a2 = op.eval_flux(e, element_gradient(mesh, e, w2.values()));
    const double t1 = a1.dot(element_gradient(mesh, e, phi1));
    const double t2 = a2.dot(element_gradient(mesh, e, phi2));
    value += mesh.measure(e) * (t1 + t2);
    scale += mesh.measure(e) * (std::abs(t1) + std::abs(t2));
  }
  // With w1 = w2 every quotient vanishes; scale by the modulars instead.
  const double ref = std::max(scale, modular(w1, op) + modular(w2, op));
  CheckReport report;
  report.check_name = "lemma21";
  report.samples = 1;
  report.location = equal ? "w1 = w2" : "integrated";
  if (equal) {
    report.worst_margin = (slack::kLemma21Equality * ref - std::abs(value)) / std::max(ref, kTiny);
    report.slack = 0.0;
  } else {
    report.worst_margin = value / std::max(ref, kTiny);
    report.slack = slack::kLemma21Field;
  }
  report.passed = report.worst_margin >= -report.slack;
  report.measurements = {{"value", value}, {"scale", ref}, {"r", r}};
  return report;
}

CheckReport check_contraction_elliptic(const EllipticProblem& first, const EllipticProblem& second,
                                       const SolverOptions& options) {
  if (first.variant() != Variant::Standard || second.variant() != Variant::Standard)
    throw DomainError("contraction compares two Standard problems");
  if (first.model().mesh != second.model().mesh || first.model().op != second.model().op ||
      first.model().source != second.model().source || first.lambda() != second.lambda() ||
      first.q() != second.q())
    throw DomainError("contraction problems must share mesh, operator, source, lambda and q");
  const Mesh& mesh = first.mesh();
  const double q = first.q();
  const DiscreteField v1 = solve(first, DiscreteField::zero(first.model().mesh), options).solution;
  const DiscreteField v2 = solve(second, DiscreteField::zero(second.model().mesh), options).solution;

  const auto& h1 = first.coefficients().h0;
  const auto& h2 = second.coefficients().h0;
  std::vector<double> dh(h1.size());
  bool ordered = true;
  for (std::size_t i = 0; i < dh.size(); ++i) {
    dh[i] = h1[i] - h2[i];
    ordered = ordered && h1[i] <= h2[i];
  }
  // The weights h0 carry lambda; the potentials are h0 / lambda minus v_prev^q, but
  // only their difference enters here.
  const double lhs = l2_norm_diff_power(v1, v2, q, true);
  const double rhs = lumped_norm_positive(mesh, dh);

  CheckReport report;
  report.check_name = "contraction_elliptic";
  report.samples = 1;
  const double floor = slack::kIdenticalRuns * options.tolerance;
  if (rhs > 0.0) {
    report.worst_margin = (rhs - lhs) / rhs;
    report.slack = slack::kContraction;
  } else {
    report.worst_margin = (floor - lhs) / floor;
    report.slack = 0.0;
  }
  report.location = "resolution " + std::to_string(mesh.num_vertices() - 1);
  report.passed = report.worst_margin >= -report.slack;
  report.measurements = {{"lhs", lhs}, {"rhs", rhs}, {"ratio", rhs > 0.0 ? lhs / rhs : 0.0}};
  if (ordered) {
    const std::vector<double> gap = interior_gap(v1, v2);
    const double worst = gap.empty() ? 0.0 : *std::min_element(gap.begin(), gap.end());
    report.measurements.emplace_back("comparison_margin", worst);
    if (worst < -slack::kOrdering) {
      report.passed = false;
      report.location += ", comparison violated";
    }
  }
  return report;
}

void require_compatible(const Trajectory& first, const Trajectory& second) {
  if (first.fields.empty() || second.fields.empty()) throw DomainError("empty trajectory");
  if (first.indices != second.indices || first.dt != second.dt || first.q != second.q)
    throw DomainError("trajectories must share time grid, stride and q");
  if (first.fields.front().size() != second.fields.front().size())
    throw DomainError("trajectories live on different meshes");
}

CheckReport check_contraction_parabolic(const Trajectory& first, const Trajectory& second, const PotentialField& h,
                                        const PotentialField& g, double solver_tolerance) {
  require_compatible(first, second);
  const Mesh& mesh = first.fields.front().mesh();
  const double q = first.q;
  const double dt = first.dt;
  const int last = first.indices.back();

  // Cumulative sum_k dt |h^k - g^k| (two-sided and positive part).
  std::vector<double> two(static_cast<std::size_t>(last) + 1, 0.0), one(two.size(), 0.0);
  for (int k = 1; k <= last; ++k) {
    const std::vector<double> hk = average_potential(h, k, dt);
    const std::vector<double> gk = average_potential(g, k, dt);
    std::vector<double> d(hk.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = hk[i] - gk[i];
    two[static_cast<std::size_t>(k)] = two[static_cast<std::size_t>(k) - 1] + dt * lumped_norm(mesh, d);
    one[static_cast<std::size_t>(k)] = one[static_cast<std::size_t>(k) - 1] + dt * lumped_norm_positive(mesh, d);
  }
  const std::vector<double> d0 = power_difference(first.fields.front(), second.fields.front(), q);
  const double init_two = lumped_norm(mesh, d0);
  const double init_one = lumped_norm_positive(mesh, d0);
  const double floor = slack::kIdenticalRuns * solver_tolerance;

  Tracker tr;
  double worst_ratio = 0.0;
  for (std::size_t s = 0; s < first.fields.size(); ++s) {
    const auto n = static_cast<std::size_t>(first.indices[s]);
    const std::vector<double> d = power_difference(first.fields[s], second.fields[s], q);
    const double lhs_two = lumped_norm(mesh, d), lhs_one = lumped_norm_positive(mesh, d);
    const double rhs_two = init_two + two[n], rhs_one = init_one + one[n];
    for (const auto& [lhs, rhs, label] :
         {std::tuple{lhs_two, rhs_two, "two-sided"}, std::tuple{lhs_one, rhs_one, "positive part"}}) {
      const double margin = rhs > floor ? (rhs - lhs) / rhs : (floor - lhs) / floor;
      if (rhs > floor) worst_ratio = std::max(worst_ratio, lhs / rhs);
      tr.note(margin, [&, label = label] { return std::string(label) + " at t=" + std::to_string(first.times[s]); });
    }
  }
  CheckReport report = finish("contraction_parabolic", first.fields.size(), tr, slack::kContraction);
  report.measurements = {{"worst_ratio", worst_ratio}};
  return report;
}

CheckReport check_sandwich(const Trajectory& trajectory, const DiscreteField& sub, const DiscreteField& super) {
  Tracker tr;
  for (std::size_t s = 0; s < trajectory.fields.size(); ++s) {
    const DiscreteField& v = trajectory.fields[s];
    const std::vector<double> below = interior_gap(sub, v);
    const std::vector<double> above = interior_gap(v, super);
    for (std::size_t i = 0; i < below.size(); ++i)
      tr.note(std::min(below[i], above[i]),
              [&] { return "t=" + std::to_string(trajectory.times[s]) + " interior dof " + std::to_string(i); });
  }
  return finish("sandwich", trajectory.fields.size(), tr, slack::kOrdering);
}

CheckReport check_monotone(const Trajectory& trajectory, Monotonicity direction) {
  Tracker tr;
  tr.worst = 0.0;
  for (std::size_t s = 1; s < trajectory.fields.size(); ++s) {
    const std::vector<double> gap = direction == Monotonicity::Nondecreasing
                                        ? interior_gap(trajectory.fields[s - 1], trajectory.fields[s])
                                        : interior_gap(trajectory.fields[s], trajectory.fields[s - 1]);
    for (std::size_t i = 0; i < gap.size(); ++i)
      tr.note(gap[i], [&] { return "t=" + std::to_string(trajectory.times[s]) + " interior dof " + std::to_string(i); });
  }
  return finish(direction == Monotonicity::Nondecreasing ? "monotone_nondecreasing" : "monotone_nonincreasing",
                trajectory.fields.size(), tr, slack::kMonotoneTrajectory);
}

CheckReport check_boundary_behavior(const Trajectory& trajectory, double c) {
  if (!(c >= 1.0)) throw DomainError("sandwich constant must be >= 1");
  Tracker tr;
  for (std::size_t s = 0; s < trajectory.fields.size(); ++s) {
    const DiscreteField& v = trajectory.fields[s];
    const Mesh& mesh = v.mesh();
    for (int vi : mesh.interior_vertices()) {
      const auto i = static_cast<std::size_t>(vi);
      const double ratio = v[i] / mesh.boundary_distance(mesh.vertex(i));
      tr.note(std::min(ratio * c - 1.0, (c - ratio) / c),
              [&] { return "t=" + std::to_string(trajectory.times[s]) + " vertex " + std::to_string(i); });
    }
  }
  CheckReport report = finish("boundary_behavior", trajectory.fields.size(), tr, 0.0);
  report.measurements = {{"c", c}};
  return report;
}

CheckReport check_dissipation(const Trajectory& trajectory) {
  const DissipationBalance& b = trajectory.dissipation;
  Tracker tr;
  tr.note((b.rhs - b.lhs - b.dissipation) / std::max(std::abs(b.rhs), kTiny), [] { return "summed over all steps"; });
  CheckReport report = finish("dissipation", 1, tr, slack::kDissipation);
  report.measurements = {{"increment_sum", b.lhs},
                         {"dissipation", b.dissipation},
                         {"rhs", b.rhs},
                         {"modular_difference", b.modular_difference}};
  return report;
}

CheckReport check_stabilization(const Trajectory& trajectory, const DiscreteField& v_stat,
                                const std::vector<double>& r_norms, double threshold) {
  if (r_norms.empty()) throw DomainError("at least one norm exponent is required");
  if (!(threshold > 0.0)) throw DomainError("threshold must be positive");
  const Mesh& mesh = v_stat.mesh();
  const double q = trajectory.q;
  const auto burn_in = static_cast<int>(slack::kStabilizationBurnIn * trajectory.steps);
  Tracker tr;
  CheckReport report;
  for (double r : r_norms) {
    std::vector<double> errors;
    for (const auto& field : trajectory.fields) errors.push_back(lumped_norm(mesh, power_difference(field, v_stat, q), r));
    for (std::size_t s = 0; s + 1 < errors.size(); ++s) {
      if (trajectory.indices[s] < burn_in) continue;
      const double allowed = errors[s] * (1.0 + slack::kStabilizationGrowth) + slack::kStabilizationNoiseFloor;
      tr.note((allowed - errors[s + 1]) / std::max(errors[s], slack::kStabilizationNoiseFloor), [&] {
        return "r=" + std::to_string(r) + " growth at t=" + std::to_string(trajectory.times[s + 1]);
      });
    }
    tr.note((threshold - errors.back()) / threshold, [&] { return "r=" + std::to_string(r) + " final error"; });
    std::ostringstream key;
    key << "e_T_r" << r;
    report.measurements.emplace_back(key.str(), errors.back());
  }
  CheckReport out = finish("stabilization", trajectory.fields.size(), tr, 0.0);
  out.measurements = std::move(report.measurements);
  out.measurements.emplace_back("threshold", threshold);
  return out;
}

CheckReport check_lambda_scaling(const MeshPtr& mesh, const std::shared_ptr<const LerayLionsOperator>& op,
                                 const std::vector<double>& lambdas, const std::optional<SolverOptions>& options) {
  if (lambdas.size() < 3) throw DomainError("lambda scaling needs at least 3 lambdas");
  if (!op->exponent().is_constant()) throw DomainError("lambda scaling needs a constant exponent");
  const double p = op->exponent().p_minus();
  std::vector<std::pair<double, DiscreteField>> solutions;
  for (double lambda : lambdas) solutions.emplace_back(lambda, solve_lambda_problem(lambda, mesh, op, options));

  std::vector<double> x, y;
  for (const auto& [lambda, w] : solutions) {
    x.push_back(std::log(lambda));
    y.push_back(std::log(w.values().cwiseAbs().maxCoeff()));
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  const double slope = sxy / sxx;
  const double expected = 1.0 / (p - 1.0);

  std::sort(solutions.begin(), solutions.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  double monotone = kInf;
  for (std::size_t s = 1; s < solutions.size(); ++s) {
    const std::vector<double> gap = interior_gap(solutions[s - 1].second, solutions[s].second);
    for (double g : gap) monotone = std::min(monotone, g);
  }

  CheckReport report;
  report.check_name = "lambda_scaling";
  report.samples = lambdas.size();
  report.worst_margin = slack::kLambdaSlope - std::abs(slope - expected);
  report.slack = 0.0;
  report.location = "slope fit over " + std::to_string(lambdas.size()) + " lambdas";
  report.passed = report.worst_margin >= 0.0;
  if (monotone < -slack::kLambdaMonotone) {
    report.passed = false;
    report.location += ", monotonicity in lambda violated";
  }
  report.measurements = {{"slope", slope}, {"expected_slope", expected}, {"monotone_margin", monotone}};
  return report;
}

CheckReport check_positivity_hopf(const DiscreteField& field, double hopf_floor) {
  const Mesh& mesh = field.mesh();
  double min_interior = kInf;
  std::string interior_location;
  for (int vi : mesh.interior_vertices()) {
    const double v = field[static_cast<std::size_t>(vi)];
    if (v < min_interior) {
      min_interior = v;
      interior_location = "interior vertex " + std::to_string(vi);
    }
  }
  double min_slope = kInf;
  std::string slope_location;
  auto consider = [&](std::size_t inner, double offset, std::size_t boundary) {
    const double slope = field[inner] / offset;
    if (slope < min_slope) {
      min_slope = slope;
      slope_location = "boundary vertex " + std::to_string(boundary);
    }
  };
  const auto res = mesh.resolution();
  if (mesh.dimension() == 1) {
    const auto n = static_cast<std::size_t>(res[0]);
    const double off = 2.0 * mesh.spacing(0);
    if (n >= 4) {
      consider(2, off, 0);
      consider(n - 2, off, n);
    }
  } else {
    const int nx = res[0], ny = res[1];
    auto id = [nx](int i, int j) { return static_cast<std::size_t>(j * (nx + 1) + i); };
    const double offx = 2.0 * mesh.spacing(0), offy = 2.0 * mesh.spacing(1);
    constexpr int band = 3;
    for (int i = band; i <= nx - band; ++i) {
      consider(id(i, 2), offy, id(i, 0));
      consider(id(i, ny - 2), offy, id(i, ny));
    }
    for (int j = band; j <= ny - band; ++j) {
      consider(id(2, j), offx, id(0, j));
      consider(id(nx - 2, j), offx, id(nx, j));
    }
  }
  CheckReport report;
  report.check_name = "positivity_hopf";
  report.samples = mesh.num_dofs();
  const double slope_margin = std::isfinite(min_slope) ? min_slope - hopf_floor : kInf;
  report.worst_margin = std::min(min_interior, slope_margin);
  report.location = min_interior <= slope_margin ? interior_location : slope_location;
  report.slack = 0.0;
  report.passed = min_interior > 0.0 && slope_margin >= 0.0;
  report.measurements = {{"min_interior", min_interior}, {"min_boundary_slope", min_slope}, {"hopf_floor", hopf_floor}};
  return report;
}

CheckReport check_gradient_consistency(const EllipticProblem& problem, const DiscreteField& v) {
  const DiscreteField grad = energy_gradient(problem, v);
  const Mesh& mesh = problem.mesh();
  const MeshPtr& mesh_ptr = problem.model().mesh;
  const double gmax = grad.values().cwiseAbs().maxCoeff();
  double err = 0.0;
  std::string location;
  Vector probe = v.values();
  for (int vi : mesh.interior_vertices()) {
    const double x = probe[vi];
    const double h = 1e-6 * std::max(std::abs(x), 1e-3 * v.values().cwiseAbs().maxCoeff() + kTiny);
    probe[vi] = x + h;
    const double up = energy(problem, DiscreteField(mesh_ptr, probe));
    probe[vi] = x - h;
    const double down = energy(problem, DiscreteField(mesh_ptr, probe));
    probe[vi] = x;
    const double fd = (up - down) / (2.0 * h);
    const double e = std::abs(fd - grad[static_cast<std::size_t>(vi)]) / std::max(gmax, kTiny);
    if (e > err) {
      err = e;
      location = "vertex " + std::to_string(vi);
    }
  }
  CheckReport report;
  report.check_name = "gradient_consistency";
  report.samples = mesh.num_dofs();
  report.worst_margin = (slack::kGradientConsistency - err) / slack::kGradientConsistency;
  report.location = location;
  report.slack = 0.0;
  report.passed = report.worst_margin >= 0.0;
  report.measurements = {{"relative_error", err}};
  return report;
}

CheckReport check_stationary_uniqueness(const Model& model, const std::vector<double>& b,
                                        const DiscreteField& perturbed, const SolverOptions& options) {
  const DiscreteField first = solve_stationary(model, b, options).solution;
  const DiscreteField second = solve_stationary(model, b, options, perturbed).solution;
  const double diff = l2_norm_diff_power(first, second, 1.0, false);
  CheckReport report;
  report.check_name = "stationary_uniqueness";
  report.samples = 2;
  report.worst_margin = (slack::kStationaryUniqueness - diff) / slack::kStationaryUniqueness;
  report.location = "default starts vs perturbed start";
  report.passed = report.worst_margin >= 0.0;
  report.measurements = {{"l2_difference", diff}};
  return report;
}

std::vector<CheckReport> run_checks(const std::vector<std::function<CheckReport()>>& checks, int threads) {
  std::vector<CheckReport> out(checks.size());
  std::vector<std::exception_ptr> errors(checks.size());
  parallel_for(checks.size(), threads, [&](std::size_t i) {
    try {
      out[i] = checks[i]();
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

} // namespace dne
