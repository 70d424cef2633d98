#include "projsmooth/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "projsmooth/parallel.hpp"

namespace projsmooth {

namespace {

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 0.5))
    throw ValidationError("gap parameter delta must lie in (0, 1/2), got " + std::to_string(delta));
}

std::string violation_message(std::size_t point, double eigenvalue, double delta) {
  std::ostringstream os;
  os.precision(17);
  os << "spectral gap violated at grid index " << point << ": eigenvalue " << eigenvalue
     << " lies in (" << delta << ", " << 1.0 - delta << ")";
  return os.str();
}

void classify(std::span<const double> values, std::size_t point, SpectrumReport& report) {
  const double delta = report.delta;
  for (double lambda : values) {
    report.eigenvalues.push_back(lambda);
    report.max_distance_to_01 =
        std::max(report.max_distance_to_01, std::min(std::abs(lambda), std::abs(lambda - 1.0)));
    if (lambda <= delta) {
      ++report.lower_count;
    } else if (lambda >= 1.0 - delta) {
      ++report.upper_count;
      report.R = std::max(report.R, lambda - 1.0);
    } else {
      report.violations.push_back({point, lambda});
    }
  }
}

}  // namespace

GapViolation::GapViolation(std::size_t point, double eigenvalue, double delta)
    : CertificationError(violation_message(point, eigenvalue, delta)),
      point_(point),
      eigenvalue_(eigenvalue) {}

EigenDecomposition eigen_hermitian(const Matrix& a) {
  if (a.rows() != a.cols()) throw ValidationError("eigen_hermitian expects a square matrix");
  if (hermitian_defect(a) > 1e-10 * (1.0 + operator_norm(a)))
    throw ValidationError("eigen_hermitian: input is not hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(a));
  if (solver.info() != Eigen::Success)
    throw CertificationError("eigen_hermitian: eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

nlohmann::json SpectrumReport::to_json() const {
  nlohmann::json v = nlohmann::json::array();
  for (const auto& violation : violations)
    v.push_back({{"point", violation.point}, {"eigenvalue", violation.eigenvalue}});
  return {{"delta", delta},
          {"lower_count", lower_count},
          {"upper_count", upper_count},
          {"R", R},
          {"max_distance_to_01", max_distance_to_01},
          {"certified", certified()},
          {"violations", v}};
}

SpectrumReport spectral_gap(const Matrix& a, double delta) {
  check_delta(delta);
  SpectrumReport report;
  report.delta = delta;
  report.matrix_dim = static_cast<int>(a.rows());
  const EigenDecomposition eig = eigen_hermitian(a);
  classify({eig.values.data(), static_cast<std::size_t>(eig.values.size())}, 0, report);
  return report;
}

SpectrumReport spectral_gap(const MatrixField& f, double delta) {
  check_delta(delta);
  const std::size_t m = static_cast<std::size_t>(f.matrix_dim());
  std::vector<double> values(f.size() * m);
  constexpr std::size_t kBlock = 256;
  parallel_for_blocks((f.size() + kBlock - 1) / kBlock, [&](std::size_t b) {
    const std::size_t end = std::min(f.size(), (b + 1) * kBlock);
    for (std::size_t x = b * kBlock; x < end; ++x) {
      const EigenDecomposition eig = eigen_hermitian(f[x]);
      std::copy(eig.values.data(), eig.values.data() + m, values.begin() + x * m);
    }
  });

  SpectrumReport report;
  report.delta = delta;
  report.matrix_dim = f.matrix_dim();
  report.eigenvalues.reserve(values.size());
  for (std::size_t x = 0; x < f.size(); ++x)
    classify({values.data() + x * m, m}, x, report);
  return report;
}

namespace {

Matrix project_upper(const EigenDecomposition& eig, double cut) {
  const auto m = eig.vectors.rows();
  std::vector<Eigen::Index> upper;
  for (Eigen::Index k = 0; k < eig.values.size(); ++k)
    if (eig.values(k) >= cut) upper.push_back(k);
  Matrix frame(m, static_cast<Eigen::Index>(upper.size()));
  for (std::size_t c = 0; c < upper.size(); ++c)
    frame.col(static_cast<Eigen::Index>(c)) = eig.vectors.col(upper[c]);
  return hermitize(frame * frame.adjoint());
}

void require_gap(const EigenDecomposition& eig, double delta, std::size_t point) {
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    const double lambda = eig.values(k);
    if (lambda > delta && lambda < 1.0 - delta) throw GapViolation(point, lambda, delta);
  }
}

}  // namespace

Matrix upper_spectral_projection(const Matrix& a, double delta, double cut) {
  check_delta(delta);
  if (!(cut > delta && cut < 1.0 - delta))
    throw ValidationError("cut point must lie inside (delta, 1 - delta)");
  const EigenDecomposition eig = eigen_hermitian(a);
  require_gap(eig, delta, 0);
  return project_upper(eig, cut);
}

MatrixField apply_calculus(const MatrixField& f, double delta) {
  check_delta(delta);
  std::vector<Matrix> out(f.size());

  constexpr std::size_t kBlock = 256;
  const std::size_t blocks = (f.size() + kBlock - 1) / kBlock;
  // First violation per block, reduced in block order.
  std::vector<std::ptrdiff_t> first_bad(blocks, -1);
  std::vector<double> first_bad_value(blocks, 0.0);
  parallel_for_blocks(blocks, [&](std::size_t b) {
    const std::size_t end = std::min(f.size(), (b + 1) * kBlock);
    for (std::size_t x = b * kBlock; x < end; ++x) {
      const EigenDecomposition eig = eigen_hermitian(f[x]);
      try {
        require_gap(eig, delta, x);
      } catch (const GapViolation& v) {
        first_bad[b] = static_cast<std::ptrdiff_t>(x);
        first_bad_value[b] = v.eigenvalue();
        return;
      }
      out[x] = project_upper(eig, 0.5);
    }
  });
  for (std::size_t b = 0; b < blocks; ++b)
    if (first_bad[b] >= 0)
      throw GapViolation(static_cast<std::size_t>(first_bad[b]), first_bad_value[b], delta);
  return MatrixField(f.grid(), f.matrix_dim(), std::move(out), true);
}

// ---------------------------------------------------------------------------
// Contour machinery

std::vector<ContourNode> contour_nodes(const ContourSpec& spec, int k) {
  if (k < 1) throw ValidationError("contour needs at least one node per edge");
  const double s = spec.s;
  const double width = 0.5 + s;
  const double height = 2.0 * s;
  const Complex i(0.0, 1.0);
  std::vector<ContourNode> nodes;
  nodes.reserve(4 * static_cast<std::size_t>(k));
  for (int n = 0; n < k; ++n) {
    const double u = (n + 0.5) / k;
    const Complex z(0.5 + u * width, -s);
    nodes.push_back({ContourEdge::Bottom, z, Complex(width / k, 0.0), z.real()});
  }
  for (int n = 0; n < k; ++n) {
    const double u = (n + 0.5) / k;
    const Complex z(1.0 + s, -s + u * height);
    nodes.push_back({ContourEdge::Right, z, i * (height / k), z.imag()});
  }
  for (int n = 0; n < k; ++n) {
    const double u = (n + 0.5) / k;
    const Complex z(1.0 + s - u * width, s);
    nodes.push_back({ContourEdge::Top, z, Complex(-width / k, 0.0), z.real()});
  }
  for (int n = 0; n < k; ++n) {
    const double u = (n + 0.5) / k;
    const Complex z(0.5, s - u * height);
    nodes.push_back({ContourEdge::Left, z, -i * (height / k), z.imag()});
  }
  return nodes;
}

namespace {

Matrix resolvent(const Matrix& a, Complex z) {
  Matrix shifted = -a;
  shifted.diagonal().array() += z;
  return shifted.partialPivLu().inverse();
}

Matrix midpoint_estimate(const Matrix& a, const ContourSpec& spec, int k) {
  Matrix sum = Matrix::Zero(a.rows(), a.cols());
  for (const ContourNode& node : contour_nodes(spec, k)) sum += node.dz * resolvent(a, node.z);
  return sum / Complex(0.0, 2.0 * std::numbers::pi);
}

}  // namespace

ContourResult contour_projection(const Matrix& a, const ContourSpec& spec) {
  if (spec.segments < 16) throw ValidationError("contour needs at least 16 segments per edge");
  const SpectrumReport gap = spectral_gap(a, spec.delta);
  if (!gap.certified()) throw GapViolation(0, gap.violations.front().eigenvalue, spec.delta);
  if (!(spec.s > gap.R))
    throw ValidationError("contour half-height s must exceed R = " + std::to_string(gap.R));

  int k = spec.segments;
  Matrix previous = midpoint_estimate(a, spec, k);
  for (int doubling = 0; doubling < 20; ++doubling) {
    k *= 2;
    Matrix current = midpoint_estimate(a, spec, k);
    const Matrix step = current - previous;
    const double change = operator_norm(step);
    if (change < 1e-8) return {std::move(current), k, change};
    previous = std::move(current);
  }
  throw CertificationError("contour quadrature did not converge after 20 doublings");
}

double resolvent_norm(const Matrix& a, Complex z) {
  const EigenDecomposition eig = eigen_hermitian(a);
  for (Eigen::Index k = 0; k < eig.values.size(); ++k)
    if (std::abs(z - eig.values(k)) <= 1e-12)
      throw ValidationError("resolvent_norm: z is within 1e-12 of an eigenvalue");
  return operator_norm(resolvent(a, z));
}

double resolvent_edge_bound(const ContourNode& node, const ContourSpec& spec, double R) {
  const double t = node.t;
  switch (node.edge) {
    case ContourEdge::Bottom:
    case ContourEdge::Top:
      return 1.0 / (spec.s * spec.s);
    case ContourEdge::Left: {
      const double gap = 0.5 - spec.delta;
      return 1.0 / (gap * gap + t * t);
    }
    case ContourEdge::Right:
    default: {
      const double gap = spec.s - R;
      return 1.0 / (gap * gap + t * t);
    }
  }
}

EdgeBoundAudit audit_edge_bounds(const Matrix& a, const ContourSpec& spec, int k) {
  const SpectrumReport gap = spectral_gap(a, spec.delta);
  if (!gap.certified()) throw GapViolation(0, gap.violations.front().eigenvalue, spec.delta);
  if (!(spec.s > gap.R)) throw ValidationError("contour half-height s must exceed R");

  EdgeBoundAudit audit;
  for (const ContourNode& node : contour_nodes(spec, k)) {
    const double norm = resolvent_norm(a, node.z);
    const double ratio = norm * norm / resolvent_edge_bound(node, spec, gap.R);
    audit.worst_ratio = std::max(audit.worst_ratio, ratio);
    ++audit.nodes;
  }
  audit.ok = audit.worst_ratio <= 1.0 + 1e-10;
  return audit;
}

}  // namespace projsmooth
