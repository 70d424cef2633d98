#include "projsmooth/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "projsmooth/bounds.hpp"
#include "projsmooth/bundles.hpp"
#include "projsmooth/calculus.hpp"
#include "projsmooth/field_io.hpp"
#include "projsmooth/grid_field.hpp"
#include "projsmooth/mollifier.hpp"
#include "projsmooth/pipeline.hpp"

namespace projsmooth {

VerifyScope parse_verify_scope(const std::string& name) {
  if (name == "kernel") return VerifyScope::Kernel;
  if (name == "smoothing") return VerifyScope::Smoothing;
  if (name == "calculus") return VerifyScope::Calculus;
  if (name == "bounds") return VerifyScope::Bounds;
  if (name == "bundles") return VerifyScope::Bundles;
  if (name == "pipeline") return VerifyScope::Pipeline;
  if (name == "all") return VerifyScope::All;
  throw ValidationError("unknown verify scope '" + name + "'");
}

std::string to_string(VerifyScope scope) {
  switch (scope) {
    case VerifyScope::Kernel: return "kernel";
    case VerifyScope::Smoothing: return "smoothing";
    case VerifyScope::Calculus: return "calculus";
    case VerifyScope::Bounds: return "bounds";
    case VerifyScope::Bundles: return "bundles";
    case VerifyScope::Pipeline: return "pipeline";
    case VerifyScope::All:
    default: return "all";
  }
}

bool SuiteReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

nlohmann::json SuiteReport::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  std::size_t failed = 0;
  for (const auto& c : checks) {
    if (!c.pass) ++failed;
    nlohmann::json entry{{"name", c.name},           {"scope", c.scope},
                         {"instances", c.instances}, {"worst", c.worst},
                         {"threshold", c.threshold}, {"pass", c.pass}};
    if (!c.detail.empty()) entry["detail"] = c.detail;
    list.push_back(entry);
  }
  return {{"checks", list}, {"total", checks.size()}, {"failed", failed}, {"pass", failed == 0}};
}

namespace {

struct Measurement {
  std::size_t instances = 0;
  double worst = 0.0;
  std::string detail;

  void observe(double value) {
    ++instances;
    worst = std::max(worst, value);
  }
};

class Runner {
 public:
  explicit Runner(SuiteReport& report) : report_(report) {}

  void check(const std::string& scope, const std::string& name, double threshold,
             const std::function<void(Measurement&)>& body) {
    CheckResult result;
    result.scope = scope;
    result.name = scope + "." + name;
    result.threshold = threshold;
    Measurement m;
    try {
      body(m);
      result.pass = m.worst <= threshold && !std::isnan(m.worst);
    } catch (const std::exception& e) {
      m.detail = std::string("exception: ") + e.what();
      result.pass = false;
    }
    result.instances = m.instances;
    result.worst = m.worst;
    result.detail = m.detail;
    report_.checks.push_back(std::move(result));
  }

 private:
  SuiteReport& report_;
};

Matrix random_unitary(std::mt19937_64& rng, int m) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(m, m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) g(r, c) = Complex(normal(rng), normal(rng));
  return g.householderQr().householderQ();
}

double relative_excess(double value, double limit) {
  // How far value exceeds limit, relative to limit (<= 0 means within).
  if (limit == 0.0) return value;
  return (value - limit) / limit;
}

// ---------------------------------------------------------------------------

void kernel_checks(Runner& run) {
  run.check("kernel", "normalization", 1e-8, [](Measurement& m) {
    for (int dim : {1, 2})
      for (double plateau : {0.25, 0.5, 0.75}) {
        const MollifierKernel kernel(dim, plateau);
        m.observe(std::abs(kernel.integral(1 << 16) - 1.0));
      }
  });
  run.check("kernel", "profile", 0.0, [](Measurement& m) {
    for (int dim : {1, 2}) {
      const MollifierKernel kernel(dim, 0.5);
      for (int i = 0; i <= 12000; ++i) {
        const double r = i * 1e-4;
        const double k = kernel(r);
        double violation = k < 0.0 ? -k : 0.0;
        if (r <= 0.5) violation = std::max(violation, std::abs(k - kernel.norm_const()));
        if (r >= 1.0) violation = std::max(violation, std::abs(k));
        m.observe(violation);
      }
    }
  });
}

void smoothing_checks(Runner& run) {
  // Rounding of the square roots can exceed the exact inequality by an ulp.
  run.check("smoothing", "grid_triangle_inequality", 1e-15, [](Measurement& m) {
    std::mt19937_64 rng(11);
    for (const TorusGrid& grid : {TorusGrid::circle(37), TorusGrid({17, 23})}) {
      std::uniform_int_distribution<std::size_t> pick(0, grid.point_count() - 1);
      for (int t = 0; t < 1000; ++t) {
        const std::size_t i = pick(rng), j = pick(rng), k = pick(rng);
        m.observe(std::max(0.0, grid.distance(i, k) - grid.distance(i, j) - grid.distance(j, k)));
      }
    }
  });

  const std::vector<MatrixField> fields = {
      fixture_random_near_projection(21, TorusGrid::circle(32), 2, 0.2),
      fixture_random_near_projection(22, TorusGrid::square(12), 3, 0.1),
      fixture_loring(1, TorusGrid::square(24)),
  };

  run.check("smoothing", "lipschitz_homogeneity", 1e-12, [&](Measurement& m) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> alpha_dist(-3.0, 3.0);
    for (const auto& f : fields) {
      const double alpha = alpha_dist(rng);
      const MatrixField scaled = MatrixField::generate(
          f.grid(), f.matrix_dim(), f.hermitian(), [&](std::size_t i) { return Matrix(alpha * f[i]); });
      const double base = lipschitz_constant(f).value;
      m.observe(std::abs(lipschitz_constant(scaled).value - std::abs(alpha) * base) / base);
    }
  });
  run.check("smoothing", "lipschitz_subadditivity", 1e-12, [&](Measurement& m) {
    for (std::size_t a = 0; a < fields.size(); ++a) {
      const MatrixField& f = fields[a];
      const MatrixField g = fixture_random_near_projection(40 + a, f.grid(), f.matrix_dim(), 0.3);
      const MatrixField sum = MatrixField::generate(
          f.grid(), f.matrix_dim(), true, [&](std::size_t i) { return hermitize(f[i] + g[i]); });
      const double lhs = lipschitz_constant(sum).value;
      const double rhs = lipschitz_constant(f).value + lipschitz_constant(g).value;
      m.observe(std::max(0.0, relative_excess(lhs, rhs)));
    }
  });
  run.check("smoothing", "constant_field_zero", 0.0, [&](Measurement& m) {
    for (const auto& f : fields) {
      const MatrixField c = MatrixField::constant(f.grid(), f[3], f.hermitian());
      m.observe(lipschitz_constant(c).value);
      m.observe(sup_distance(f, f));
    }
  });
  run.check("smoothing", "lipschitz_unitary_invariance", 1e-12, [&](Measurement& m) {
    std::mt19937_64 rng(51);
    for (const auto& f : fields) {
      const Matrix u = random_unitary(rng, f.matrix_dim());
      const double base = lipschitz_constant(f).value;
      m.observe(std::abs(lipschitz_constant(conjugate(f, u)).value - base) / base);
    }
  });

  const MollifierKernel k1(1), k2(2);
  auto kernel_for = [&](const TorusGrid& g) -> const MollifierKernel& { return g.dim() == 1 ? k1 : k2; };

  run.check("smoothing", "constants_exact", 0.0, [&](Measurement& m) {
    for (const auto& f : fields) {
      const MatrixField c = MatrixField::constant(f.grid(), f[5], f.hermitian());
      const DiscreteStencil st = discretize(kernel_for(f.grid()), f.grid(), 4.0 / f.grid().min_size());
      m.observe(sup_distance(smooth(c, st), c));
    }
  });
  run.check("smoothing", "linearity", 1e-13, [&](Measurement& m) {
    const double alpha = -1.7;
    for (const auto& f : fields) {
      const MatrixField g = fixture_random_near_projection(61, f.grid(), f.matrix_dim(), 0.25);
      const MatrixField combo = MatrixField::generate(
          f.grid(), f.matrix_dim(), false, [&](std::size_t i) { return Matrix(alpha * f[i] + g[i]); });
      const DiscreteStencil st = discretize(kernel_for(f.grid()), f.grid(), 3.0 / f.grid().min_size());
      const MatrixField sf = smooth(f, st), sg = smooth(g, st), sc = smooth(combo, st);
      for (std::size_t i = 0; i < f.size(); ++i) {
        const Matrix diff = sc[i] - (alpha * sf[i] + sg[i]);
        m.observe(diff.cwiseAbs().maxCoeff());
      }
    }
  });
  run.check("smoothing", "hermitian_preserved", 1e-13, [&](Measurement& m) {
    for (const auto& f : fields) {
      const DiscreteStencil st = discretize(kernel_for(f.grid()), f.grid(), 3.0 / f.grid().min_size());
      const MatrixField s = smooth(f, st);
      double in = 0.0, out = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) {
        in = std::max(in, hermitian_defect(f[i]));
        out = std::max(out, hermitian_defect(s[i]));
      }
      m.observe(std::max(0.0, out - in));
    }
  });
  run.check("smoothing", "contraction", 1e-12, [&](Measurement& m) {
    for (const auto& f : fields)
      for (double steps : {2.5, 4.0}) {
        const DiscreteStencil st = discretize(kernel_for(f.grid()), f.grid(), steps / f.grid().min_size());
        const double before = lipschitz_constant(f).value;
        const double after = lipschitz_constant(smooth(f, st)).value;
        m.observe(std::max(0.0, relative_excess(after, before)));
      }
  });
  run.check("smoothing", "uniform_approximation", 0.0, [&](Measurement& m) {
    for (const auto& f : fields) {
      const double L = lipschitz_constant(f).value;
      for (double steps : {2.5, 4.0, 5.5}) {
        const double eps = steps / f.grid().min_size();
        const DiscreteStencil st = discretize(kernel_for(f.grid()), f.grid(), eps);
        // Observed excess over the L * eps bound.
        m.observe(std::max(0.0, sup_distance(f, smooth(f, st)) - L * eps));
      }
    }
  });
  run.check("smoothing", "refinement", 0.0, [&](Measurement& m) {
    for (const auto& f : fields) {
      const double L = lipschitz_constant(f).value;
      const double eps = 8.0 / f.grid().min_size();
      const DiscreteStencil half = discretize(kernel_for(f.grid()), f.grid(), eps / 2.0);
      m.observe(std::max(0.0, sup_distance(f, smooth(f, half)) - L * eps / 2.0));
    }
  });
}

void calculus_checks(Runner& run) {
  const std::vector<double> deltas = {0.05, 0.1, 0.2, 0.4};

  auto random_hermitian = [](std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-2.0, 2.0);
    const int size = 1 + static_cast<int>(seed % 6);
    Matrix a(size, size);
    for (int r = 0; r < size; ++r)
      for (int c = 0; c < size; ++c) a(r, c) = Complex(unit(rng), unit(rng));
    return hermitize(a);
  };
  run.check("calculus", "eigen_reconstruction", 1e-10, [&](Measurement& m) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const Matrix a = random_hermitian(seed);
      const EigenDecomposition eig = eigen_hermitian(a);
      const Matrix rebuilt = eig.vectors * eig.values.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
      const Matrix diff = a - rebuilt;
      m.observe(operator_norm(diff) / (1.0 + operator_norm(a)));
    }
  });
  // ||u u* - I|| / m against 1e-12.
  run.check("calculus", "eigen_unitarity", 1e-12, [&](Measurement& m) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const Matrix a = random_hermitian(seed);
      const EigenDecomposition eig = eigen_hermitian(a);
      const Matrix unit = eig.vectors * eig.vectors.adjoint() - Matrix::Identity(a.rows(), a.cols());
      m.observe(operator_norm(unit) / static_cast<double>(a.rows()));
    }
  });
  // max of ||q^2 - q|| / m and ||q - q*|| / m against 1e-12.
  run.check("calculus", "projection_idempotent_selfadjoint", 1e-12, [&](Measurement& m) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const int size = 1 + static_cast<int>(seed % 6);
      const double delta = deltas[seed % deltas.size()];
      const Matrix q = upper_spectral_projection(random_gapped_hermitian(seed, size, delta), delta);
      const Matrix idem = q * q - q;
      m.observe(std::max(operator_norm(idem), hermitian_defect(q)) / size);
    }
  });
  run.check("calculus", "projection_commutes", 1e-11, [&](Measurement& m) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const int size = 1 + static_cast<int>(seed % 6);
      const double delta = deltas[seed % deltas.size()];
      const Matrix a = random_gapped_hermitian(seed, size, delta);
      const Matrix q = upper_spectral_projection(a, delta);
      const Matrix comm = q * a - a * q;
      m.observe(operator_norm(comm) / (1.0 + operator_norm(a)));
    }
  });
  // |tr q - upper_count|; the trace of an exact projection is an integer.
  run.check("calculus", "projection_trace", 1e-9, [&](Measurement& m) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const int size = 1 + static_cast<int>(seed % 6);
      const double delta = deltas[seed % deltas.size()];
      const Matrix a = random_gapped_hermitian(seed, size, delta);
      const Matrix q = upper_spectral_projection(a, delta);
      m.observe(std::abs(q.trace().real() - static_cast<double>(spectral_gap(a, delta).upper_count)));
    }
  });
  run.check("calculus", "cut_point_independence", 0.0, [&](Measurement& m) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const int size = 1 + static_cast<int>(seed % 6);
      const double delta = deltas[seed % deltas.size()];
      const Matrix a = random_gapped_hermitian(seed + 1000, size, delta);
      const Matrix q0 = upper_spectral_projection(a, delta, 0.5);
      const Matrix q1 = upper_spectral_projection(a, delta, (delta + 0.5) / 2.0);
      const Matrix q2 = upper_spectral_projection(a, delta, 1.0 - delta - 1e-9);
      m.observe((q0 != q1 || q0 != q2) ? 1.0 : 0.0);
    }
  });
  run.check("calculus", "contour_eigen_equivalence", 1e-6, [&](Measurement& m) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const int size = 1 + static_cast<int>(seed % 6);
      const double delta = deltas[seed % deltas.size()];
      const Matrix a = random_gapped_hermitian(seed + 2000, size, delta);
      const ContourResult c = contour_projection(a, {10.0, 16, delta});
      const Matrix diff = c.projection - upper_spectral_projection(a, delta);
      m.observe(operator_norm(diff));
    }
  });
  run.check("calculus", "edge_bound_dominance", 1.0 + 1e-10, [&](Measurement& m) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      const int size = 1 + static_cast<int>(seed % 6);
      const double delta = deltas[seed % deltas.size()];
      const Matrix a = random_gapped_hermitian(seed + 3000, size, delta);
      const EdgeBoundAudit audit = audit_edge_bounds(a, {5.0, 16, delta}, 64);
      m.observe(audit.worst_ratio);
      m.instances += audit.nodes - 1;
    }
  });
  run.check("calculus", "distance_to_input", 0.0, [&](Measurement& m) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const int size = 1 + static_cast<int>(seed % 6);
      const double delta = deltas[seed % deltas.size()];
      const Matrix a = random_gapped_hermitian(seed + 4000, size, delta);
      const SpectrumReport gap = spectral_gap(a, delta);
      const Matrix diff = upper_spectral_projection(a, delta) - a;
      m.observe(std::max(0.0, operator_norm(diff) - (delta + gap.R) - 1e-12));
    }
  });
}

void bounds_checks(Runner& run) {
  run.check("bounds", "seminorm_axioms", 1e-12, [](Measurement& m) {
    const TorusGrid grid = TorusGrid::square(12);
    m.observe(lipschitz_constant(fixture_constant(grid, 3, 3)).value);
    const MatrixField a = fixture_random_near_projection(71, grid, 3, 0.2);
    const MatrixField b = fixture_random_near_projection(72, grid, 3, 0.2);
    const double La = lipschitz_constant(a).value, Lb = lipschitz_constant(b).value;
    const MatrixField scaled = MatrixField::generate(grid, 3, true, [&](std::size_t i) { return Matrix(-2.5 * a[i]); });
    m.observe(std::abs(lipschitz_constant(scaled).value - 2.5 * La) / La);
    const MatrixField sum = MatrixField::generate(grid, 3, true, [&](std::size_t i) { return hermitize(a[i] + b[i]); });
    m.observe(std::max(0.0, relative_excess(lipschitz_constant(sum).value, La + Lb)));
  });
  run.check("bounds", "gap_bound_sweep", 1.0 + 1e-9, [](Measurement& m) {
    const std::vector<double> deltas = {0.05, 0.1, 0.2, 0.4};
    for (std::uint64_t seed = 0; seed < 48; ++seed) {
      const int size = 2 + static_cast<int>(seed % 3);
      const double delta = deltas[(seed / 3) % deltas.size()];
      const TorusGrid grid = seed % 2 == 0 ? TorusGrid::circle(32) : TorusGrid::square(12);
      const BoundReport r = proposition_bound_check(fixture_random_near_projection(seed + 500, grid, size, delta), delta);
      m.observe(r.ratio);
    }
  });
  run.check("bounds", "sharpness", 1e-15, [](Measurement& m) {
    for (int i = 1; i <= 9; ++i) {
      const double delta = 0.05 + 0.04 * i - 0.02;  // 9 values in (0.05, 0.45)
      const SharpnessResult s = sharpness_example(delta);
      m.observe(std::abs(s.L_fa / s.bound - 1.0));
      m.observe(std::abs(s.L_a - (1.0 - 2.0 * delta)));
      m.observe(std::abs(s.L_fa - 1.0));
    }
  });
  run.check("bounds", "inverse_seminorm", 1.0 + 1e-9, [](Measurement& m) {
    const TorusGrid line = TorusGrid::circle(64);
    const MatrixField scalar = MatrixField::generate(line, 1, true, [&](std::size_t i) {
      return Matrix::Constant(1, 1, 2.0 + std::sin(2.0 * 3.141592653589793 * line.coordinate(i, 0)));
    });
    m.observe(inverse_seminorm_check(scalar).ratio);
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      const double delta = 0.2;
      const MatrixField a = fixture_random_near_projection(seed + 800, TorusGrid::circle(24), 3, delta);
      const ContourSpec spec{4.0, 16, delta};
      for (const ContourNode& node : contour_nodes(spec, 4)) {
        m.observe(inverse_seminorm_check(resolvent_family(a, node.z)).ratio);
      }
    }
  });
}

void bundles_checks(Runner& run) {
  run.check("bundles", "loring_chern", 0.0, [](Measurement& m) {
    for (int k : {1, 2, 3}) {
      const ChernResult c = chern_number(fixture_loring(k, TorusGrid::square(64)));
      m.observe(std::abs(std::abs(c.chern) - k) + (c.residual < 0.1 ? 0.0 : 1.0));
    }
    m.observe(std::abs(chern_number(fixture_constant(TorusGrid::square(16), 2, 1)).chern));
  });
  run.check("bundles", "conjugation_invariance", 0.0, [](Measurement& m) {
    std::mt19937_64 rng(91);
    for (int k : {1, 2}) {
      const MatrixField p = fixture_loring(k, TorusGrid::square(48));
      const int base = chern_number(p).chern;
      const Matrix u = random_unitary(rng, 2);
      m.observe(std::abs(chern_number(conjugate(p, u)).chern - base));
    }
  });
  run.check("bundles", "additivity", 0.0, [](Measurement& m) {
    const TorusGrid grid = TorusGrid::square(48);
    const MatrixField p1 = fixture_loring(1, grid), p2 = fixture_loring(2, grid);
    const int sum = chern_number(direct_sum(p1, p2)).chern;
    m.observe(std::abs(sum - chern_number(p1).chern - chern_number(p2).chern));
  });
  run.check("bundles", "loring_lipschitz_grid_stability", 0.05, [](Measurement& m) {
    const double coarse = lipschitz_constant(fixture_loring(1, TorusGrid::square(64))).value;
    const double fine = lipschitz_constant(fixture_loring(1, TorusGrid::square(128))).value;
    m.observe(std::abs(fine - coarse) / fine);
  });
}

void pipeline_checks(Runner& run) {
  run.check("pipeline", "loring_certificate", 0.0, [](Measurement& m) {
    PipelineConfig config;
    config.target_eps = 0.1;
    config.check_chern = true;
    for (int k : {1, 2}) {
      const PipelineResult r = smooth_project(fixture_loring(k, TorusGrid::square(96)), config);
      m.observe(r.report.certified() ? 0.0 : 1.0);
    }
  });
  run.check("pipeline", "determinism", 0.0, [](Measurement& m) {
    PipelineConfig config;
    config.target_eps = 0.2;
    const MatrixField p = fixture_loring(1, TorusGrid::square(64));
    const std::string first = dump_json(smooth_project(p, config).report.to_json());
    const std::string second = dump_json(smooth_project(p, config).report.to_json());
    m.observe(first == second ? 0.0 : 1.0);
  });
  run.check("pipeline", "retry_monotonicity", 0.0, [](Measurement& m) {
    PipelineConfig config;
    config.target_eps = 0.2;
    config.delta = 0.05;
    config.epsilon_smooth = 0.2;
    const PipelineResult r = smooth_project(fixture_loring(1, TorusGrid::square(64)), config);
    for (std::size_t i = 1; i < r.report.attempts.size(); ++i)
      m.observe(std::max(0.0, r.report.attempts[i].sup_p_p1 - r.report.attempts[i - 1].sup_p_p1));
    if (r.report.retries_used == 0) m.detail = "no retry was triggered";
  });
  run.check("pipeline", "exact_smooth_projection_fixed", 1e-10, [](Measurement& m) {
    const MatrixField p = fixture_constant(TorusGrid::square(16), 2, 1);
    PipelineConfig config;
    config.target_eps = 0.1;
    const PipelineResult r = smooth_project(p, config);
    m.observe(sup_distance(r.q, p));
  });
}

}  // namespace

SuiteReport verify_suite(VerifyScope scope) {
  SuiteReport report;
  Runner run(report);
  const bool all = scope == VerifyScope::All;
  if (all || scope == VerifyScope::Kernel) kernel_checks(run);
  if (all || scope == VerifyScope::Smoothing) smoothing_checks(run);
  if (all || scope == VerifyScope::Calculus) calculus_checks(run);
  if (all || scope == VerifyScope::Bounds) bounds_checks(run);
  if (all || scope == VerifyScope::Bundles) bundles_checks(run);
  if (all || scope == VerifyScope::Pipeline) pipeline_checks(run);
  return report;
}

}  // namespace projsmooth
