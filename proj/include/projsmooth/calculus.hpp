#pragma once

#include <cstddef>
#include <vector>

#include <json.hpp>

#include "projsmooth/grid_field.hpp"

namespace projsmooth {

struct EigenDecomposition {
  Eigen::VectorXd values;  // ascending
  Matrix vectors;          // unitary, columns are eigenvectors
};

// Throws ValidationError if ||a - a*|| > 1e-10 (1 + ||a||).
EigenDecomposition eigen_hermitian(const Matrix& a);

// Raised when an eigenvalue falls in the open band (delta, 1 - delta).
class GapViolation : public CertificationError {
 public:
  GapViolation(std::size_t point, double eigenvalue, double delta);
  std::size_t point() const { return point_; }
  double eigenvalue() const { return eigenvalue_; }

 private:
  std::size_t point_;
  double eigenvalue_;
};

struct SpectrumReport {
  struct Violation {
    std::size_t point;
    double eigenvalue;
  };

  double delta = 0.0;
  // Per-point ascending eigenvalues, concatenated in grid order.
  std::vector<double> eigenvalues;
  int matrix_dim = 0;
  std::size_t lower_count = 0;  // eigenvalues <= delta
  std::size_t upper_count = 0;  // eigenvalues >= 1 - delta
  std::vector<Violation> violations;
  double R = 0.0;  // max(0, max upper eigenvalue - 1)
  // Largest distance from an eigenvalue to {0, 1}.
  double max_distance_to_01 = 0.0;

  bool certified() const { return violations.empty(); }
  nlohmann::json to_json() const;  // summary, no per-point eigenvalues
};

SpectrumReport spectral_gap(const Matrix& a, double delta);
SpectrumReport spectral_gap(const MatrixField& f, double delta);

// u diag(chi[lambda >= cut]) u*, returned exactly hermitian. The cut defaults
// to 1/2; any cut inside (delta, 1 - delta) gives the same matrix on gapped
// input. Throws GapViolation when the gap at delta is not certified.
Matrix upper_spectral_projection(const Matrix& a, double delta, double cut = 0.5);

// Pointwise upper_spectral_projection; the GapViolation names the first
// offending grid index.
MatrixField apply_calculus(const MatrixField& f, double delta);

/**
 * Rectangle with vertices 1/2 - si, 1 + s - si, 1 + s + si, 1/2 + si,
 * traversed anti-clockwise. It encloses exactly the eigenvalues >= 1 - delta
 * of a gapped hermitian matrix whose spectrum lies below 1 + s.
 */
struct ContourSpec {
  double s = 10.0;
  int segments = 16;  // initial midpoint nodes per edge
  double delta = 0.25;
};

enum class ContourEdge { Bottom, Right, Top, Left };

struct ContourNode {
  ContourEdge edge;
  Complex z;
  Complex dz;    // node weight times edge direction
  double t;      // imaginary part of z on vertical edges, real part otherwise
};

// Composite-midpoint nodes, edge by edge in ascending parameter order.
std::vector<ContourNode> contour_nodes(const ContourSpec& spec, int segments_per_edge);

struct ContourResult {
  Matrix projection;
  int segments = 0;          // per-edge node count of the accepted estimate
  double last_change = 0.0;  // operator norm of the final doubling step
};

// (2 pi i)^-1 times the contour integral of (z - a)^-1, doubling the node
// count until successive estimates differ by < 1e-8. Throws ValidationError
// if s <= R, GapViolation if the gap is not certified and
// CertificationError after 20 doublings without convergence.
ContourResult contour_projection(const Matrix& a, const ContourSpec& spec);

// ||(z - a)^-1||. Throws ValidationError when z is within 1e-12 of an
// eigenvalue of a.
double resolvent_norm(const Matrix& a, Complex z);

// Bound on ||(z - a)^-1||^2 at a contour node: s^-2 on the horizontal
// edges, ((1/2 - delta)^2 + t^2)^-1 on the left edge and
// ((s - R)^2 + t^2)^-1 on the right edge.
double resolvent_edge_bound(const ContourNode& node, const ContourSpec& spec, double R);

struct EdgeBoundAudit {
  std::size_t nodes = 0;
  double worst_ratio = 0.0;  // max of measured norm^2 / bound
  bool ok = true;
};

EdgeBoundAudit audit_edge_bounds(const Matrix& a, const ContourSpec& spec, int segments_per_edge);

}  // namespace projsmooth
