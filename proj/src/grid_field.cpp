#include "projsmooth/grid_field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "projsmooth/parallel.hpp"

namespace projsmooth {

// ---------------------------------------------------------------------------
// TorusGrid

TorusGrid::TorusGrid(std::vector<int> sizes) : sizes_(std::move(sizes)), point_count_(1) {
  if (sizes_.empty() || sizes_.size() > 2)
    throw ValidationError("torus dimension must be 1 or 2, got " + std::to_string(sizes_.size()));
  for (int n : sizes_) {
    if (n < 2) throw ValidationError("torus grid needs at least 2 points per dimension");
    point_count_ *= static_cast<std::size_t>(n);
  }
}

int TorusGrid::min_size() const { return *std::min_element(sizes_.begin(), sizes_.end()); }

void TorusGrid::check_index(std::size_t index) const {
  if (index >= point_count_)
    throw ValidationError("grid index " + std::to_string(index) + " out of range (" +
                          std::to_string(point_count_) + " points)");
}

std::array<int, 2> TorusGrid::coords(std::size_t index) const {
  check_index(index);
  if (dim() == 1) return {static_cast<int>(index), 0};
  const auto ny = static_cast<std::size_t>(sizes_[1]);
  return {static_cast<int>(index / ny), static_cast<int>(index % ny)};
}

std::size_t TorusGrid::index(std::array<int, 2> c) const {
  for (int d = 0; d < dim(); ++d) {
    if (c[d] < 0 || c[d] >= sizes_[d]) throw ValidationError("grid coordinate out of range");
  }
  if (dim() == 1) return static_cast<std::size_t>(c[0]);
  return static_cast<std::size_t>(c[0]) * static_cast<std::size_t>(sizes_[1]) +
         static_cast<std::size_t>(c[1]);
}

double TorusGrid::coordinate(std::size_t index, int d) const {
  return static_cast<double>(coords(index)[d]) / sizes_[d];
}

std::size_t TorusGrid::translate(std::size_t i, std::array<int, 2> offset) const {
  auto c = coords(i);
  for (int d = 0; d < dim(); ++d) {
    const int n = sizes_[d];
    c[d] = ((c[d] + offset[d]) % n + n) % n;
  }
  return index(c);
}

double TorusGrid::offset_length(std::array<int, 2> steps) const {
  double sq = 0.0;
  for (int d = 0; d < dim(); ++d) {
    const int n = sizes_[d];
    int k = ((steps[d] % n) + n) % n;
    k = std::min(k, n - k);
    const double component = static_cast<double>(k) / n;
    if (dim() == 1) return component;
    sq += component * component;
  }
  return std::sqrt(sq);
}

double TorusGrid::distance(std::size_t i, std::size_t j) const {
  const auto a = coords(i);
  const auto b = coords(j);
  return offset_length({a[0] - b[0], a[1] - b[1]});
}

double geodesic_distance(const TorusGrid& grid, std::size_t i, std::size_t j) {
  return grid.distance(i, j);
}

// ---------------------------------------------------------------------------
// Norms

namespace {

bool all_finite(const Matrix& a) {
  for (Eigen::Index c = 0; c < a.cols(); ++c)
    for (Eigen::Index r = 0; r < a.rows(); ++r)
      if (!std::isfinite(a(r, c).real()) || !std::isfinite(a(r, c).imag())) return false;
  return true;
}

bool exactly_hermitian(const Matrix& a) {
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    if (a(r, r).imag() != 0.0) return false;
    for (Eigen::Index c = r + 1; c < a.cols(); ++c)
      if (a(r, c) != std::conj(a(c, r))) return false;
  }
  return true;
}

// |(a+d)/2| + sqrt(((a-d)/2)^2 + |c|^2): the spectral radius of [[a, c], [c*, d]].
inline double hermitian2_norm(double a, double d, double c_re, double c_im) {
  const double mean = 0.5 * (a + d);
  const double half = 0.5 * (a - d);
  return std::abs(mean) + std::sqrt(half * half + c_re * c_re + c_im * c_im);
}

// sqrt(lambda_max(A* A)) for A = [[a00, a01], [a10, a11]].
inline double general2_norm(Complex a00, Complex a01, Complex a10, Complex a11) {
  const double b00 = std::norm(a00) + std::norm(a10);
  const double b11 = std::norm(a01) + std::norm(a11);
  const Complex b01 = std::conj(a00) * a01 + std::conj(a10) * a11;
  const double mean = 0.5 * (b00 + b11);
  const double half = 0.5 * (b00 - b11);
  const double lambda = mean + std::sqrt(half * half + std::norm(b01));
  return std::sqrt(std::max(lambda, 0.0));
}

}  // namespace

double operator_norm(const Matrix& a) {
  if (a.rows() != a.cols()) throw ValidationError("operator_norm expects a square matrix");
  if (!all_finite(a)) throw ValidationError("operator_norm: non-finite matrix entry");
  const auto m = a.rows();
  if (m == 0) return 0.0;
  if (m == 1) return std::abs(a(0, 0));
  const bool herm = exactly_hermitian(a);
  if (m == 2) {
    if (herm) return hermitian2_norm(a(0, 0).real(), a(1, 1).real(), a(0, 1).real(), a(0, 1).imag());
    return general2_norm(a(0, 0), a(0, 1), a(1, 0), a(1, 1));
  }
  if (herm) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

double frobenius_norm(const Matrix& a) {
  if (!all_finite(a)) throw ValidationError("frobenius_norm: non-finite matrix entry");
  return a.norm();
}

double matrix_norm(const Matrix& a, NormKind kind) {
  return kind == NormKind::Operator ? operator_norm(a) : frobenius_norm(a);
}

double hermitian_defect(const Matrix& a) {
  const Matrix diff = a - a.adjoint();
  return operator_norm(diff);
}

Matrix hermitize(const Matrix& a) {
  Matrix h = 0.5 * (a + a.adjoint());
  for (Eigen::Index r = 0; r < h.rows(); ++r) {
    h(r, r) = Complex(h(r, r).real(), 0.0);
    for (Eigen::Index c = r + 1; c < h.cols(); ++c) h(c, r) = std::conj(h(r, c));
  }
  return h;
}

MatrixField hermitize(const MatrixField& f) {
  return MatrixField::generate(f.grid(), f.matrix_dim(), true,
                               [&](std::size_t i) { return hermitize(f[i]); });
}

// ---------------------------------------------------------------------------
// MatrixField

MatrixField::MatrixField(TorusGrid grid, int m, bool hermitian)
    : grid_(std::move(grid)), m_(m), hermitian_(hermitian) {
  if (m < 1) throw ValidationError("matrix dimension must be >= 1");
  values_.assign(grid_.point_count(), Matrix::Zero(m, m));
}

MatrixField::MatrixField(TorusGrid grid, int m, std::vector<Matrix> values, bool hermitian)
    : grid_(std::move(grid)), m_(m), values_(std::move(values)), hermitian_(hermitian) {
  check_invariants();
}

MatrixField MatrixField::constant(const TorusGrid& grid, const Matrix& value, bool hermitian) {
  return MatrixField(grid, static_cast<int>(value.rows()),
                     std::vector<Matrix>(grid.point_count(), value), hermitian);
}

void MatrixField::check_invariants() const {
  if (m_ < 1) throw ValidationError("matrix dimension must be >= 1");
  if (values_.size() != grid_.point_count())
    throw ValidationError("field has " + std::to_string(values_.size()) + " values for " +
                          std::to_string(grid_.point_count()) + " grid points");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const Matrix& a = values_[i];
    if (a.rows() != m_ || a.cols() != m_)
      throw ValidationError("value " + std::to_string(i) + " is not " + std::to_string(m_) +
                            "x" + std::to_string(m_));
    if (hermitian_ && hermitian_defect(a) > 1e-12 * (1.0 + operator_norm(a)))
      throw ValidationError("value " + std::to_string(i) + " violates the hermitian flag");
  }
}

void MatrixField::set_hermitian(bool flag) {
  hermitian_ = flag;
  if (flag) check_invariants();
}

// ---------------------------------------------------------------------------
// Sup distance and Lipschitz sweep

double sup_distance(const MatrixField& f, const MatrixField& g, NormKind kind) {
  if (!f.same_shape(g)) throw ValidationError("sup_distance: field shapes differ");
  double worst = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Matrix diff = f[i] - g[i];
    worst = std::max(worst, matrix_norm(diff, kind));
  }
  return worst;
}

namespace {

// ||f(i) - f(j)|| over a packed copy of the field. The scalar, 2x2 hermitian
// and 2x2 general layouts evaluate exactly the arithmetic operator_norm uses
// on the difference matrix, so sweep values and lipschitz_quotient agree bit
// for bit.
class PairNorm {
 public:
  PairNorm(const MatrixField& f, NormKind kind) : field_(f), kind_(kind) {
    const int m = f.matrix_dim();
    for (const Matrix& a : f.values())
      if (!all_finite(a)) throw ValidationError("lipschitz_constant: non-finite field value");
    if (kind != NormKind::Operator || m > 2) {
      layout_ = Layout::Generic;
      return;
    }
    const std::size_t p = f.size();
    if (m == 1) {
      layout_ = Layout::Scalar;
      packed_.resize(2 * p);
      for (std::size_t i = 0; i < p; ++i) {
        packed_[2 * i] = f[i](0, 0).real();
        packed_[2 * i + 1] = f[i](0, 0).imag();
      }
      return;
    }
    const bool herm = std::all_of(f.values().begin(), f.values().end(), exactly_hermitian);
    if (herm) {
      layout_ = Layout::Hermitian2;
      packed_.resize(4 * p);
      for (std::size_t i = 0; i < p; ++i) {
        packed_[4 * i] = f[i](0, 0).real();
        packed_[4 * i + 1] = f[i](1, 1).real();
        packed_[4 * i + 2] = f[i](0, 1).real();
        packed_[4 * i + 3] = f[i](0, 1).imag();
      }
    } else {
      layout_ = Layout::General2;
      complex_.resize(4 * p);
      for (std::size_t i = 0; i < p; ++i) {
        complex_[4 * i] = f[i](0, 0);
        complex_[4 * i + 1] = f[i](0, 1);
        complex_[4 * i + 2] = f[i](1, 0);
        complex_[4 * i + 3] = f[i](1, 1);
      }
    }
  }

  double operator()(std::size_t i, std::size_t j) const {
    switch (layout_) {
      case Layout::Scalar: {
        const Complex d(packed_[2 * i] - packed_[2 * j], packed_[2 * i + 1] - packed_[2 * j + 1]);
        return std::abs(d);
      }
      case Layout::Hermitian2: {
        const double* a = &packed_[4 * i];
        const double* b = &packed_[4 * j];
        return hermitian2_norm(a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]);
      }
      case Layout::General2: {
        const Complex* a = &complex_[4 * i];
        const Complex* b = &complex_[4 * j];
        return general2_norm(a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]);
      }
      case Layout::Generic:
      default: {
        const Matrix diff = field_[i] - field_[j];
        return matrix_norm(diff, kind_);
      }
    }
  }

 private:
  enum class Layout { Scalar, Hermitian2, General2, Generic };

  const MatrixField& field_;
  NormKind kind_;
  Layout layout_ = Layout::Generic;
  std::vector<double> packed_;
  std::vector<Complex> complex_;
};

struct BlockBest {
  double value = -1.0;
  std::size_t i = 0;
  std::size_t j = 0;
};

}  // namespace

double lipschitz_quotient(const MatrixField& f, std::size_t i, std::size_t j, NormKind kind) {
  if (i == j) throw ValidationError("lipschitz_quotient needs two distinct points");
  const PairNorm norm(f, kind);
  return norm(i, j) / f.grid().distance(i, j);
}

LipschitzEstimate lipschitz_constant(const MatrixField& f, NormKind kind) {
  const TorusGrid& grid = f.grid();
  const std::size_t p = grid.point_count();
  if (p < 2) throw ValidationError("lipschitz_constant needs at least two grid points");

  const PairNorm norm(f, kind);

  // Wrapped distances indexed by coordinate difference.
  const int nx = grid.size(0);
  const int ny = grid.dim() == 2 ? grid.size(1) : 1;
  std::vector<double> dist_table(static_cast<std::size_t>(nx) * ny);
  for (int kx = 0; kx < nx; ++kx)
    for (int ky = 0; ky < ny; ++ky)
      dist_table[static_cast<std::size_t>(kx) * ny + ky] = grid.offset_length({kx, ky});
  std::vector<int> cx(p), cy(p);
  for (std::size_t i = 0; i < p; ++i) {
    const auto c = grid.coords(i);
    cx[i] = c[0];
    cy[i] = c[1];
  }

  constexpr std::size_t kRowsPerBlock = 32;
  const std::size_t rows = p - 1;
  const std::size_t blocks = (rows + kRowsPerBlock - 1) / kRowsPerBlock;
  std::vector<BlockBest> best(blocks);

  parallel_for_blocks(blocks, [&](std::size_t b) {
    BlockBest local;
    const std::size_t row_end = std::min(rows, (b + 1) * kRowsPerBlock);
    for (std::size_t i = b * kRowsPerBlock; i < row_end; ++i) {
      for (std::size_t j = i + 1; j < p; ++j) {
        int kx = cx[i] - cx[j];
        if (kx < 0) kx += nx;
        int ky = cy[i] - cy[j];
        if (ky < 0) ky += ny;
        const double q = norm(i, j) / dist_table[static_cast<std::size_t>(kx) * ny + ky];
        if (q > local.value) local = {q, i, j};
      }
    }
    best[b] = local;
  });

  BlockBest overall;
  for (const BlockBest& candidate : best)
    if (candidate.value > overall.value) overall = candidate;

  LipschitzEstimate estimate;
  estimate.value = overall.value;
  estimate.witness = {overall.i, overall.j};
  estimate.pair_count = static_cast<std::uint64_t>(p) * (p - 1) / 2;
  return estimate;
}

ProjectionReport is_projection(const MatrixField& f, double tol) {
  ProjectionReport report;
  for (const Matrix& a : f.values()) {
    const Matrix idem = a * a - a;
    report.max_idem_defect = std::max(report.max_idem_defect, operator_norm(idem));
    report.max_sa_defect = std::max(report.max_sa_defect, hermitian_defect(a));
  }
  report.ok = report.max_idem_defect <= tol && report.max_sa_defect <= tol;
  return report;
}

}  // namespace projsmooth
