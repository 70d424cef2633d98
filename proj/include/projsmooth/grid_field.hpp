#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace projsmooth {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

// Bad arguments, shape mismatches and malformed input.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical guarantee that could not be established (spectral gap,
// quadrature convergence, integrality of a Chern sum, ...).
class CertificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * Uniform grid on the flat torus (R/Z)^n, n in {1, 2}, with unit
 * circumferences. Point i of a dimension sits at i/N; points are indexed
 * lexicographically with the first coordinate varying slowest.
 */
class TorusGrid {
 public:
  explicit TorusGrid(std::vector<int> sizes);

  static TorusGrid circle(int n) { return TorusGrid({n}); }
  static TorusGrid square(int n) { return TorusGrid({n, n}); }

  int dim() const { return static_cast<int>(sizes_.size()); }
  std::span<const int> sizes() const { return sizes_; }
  int size(int d) const { return sizes_[static_cast<std::size_t>(d)]; }
  int min_size() const;
  std::size_t point_count() const { return point_count_; }

  // Unused trailing coordinates are zero.
  std::array<int, 2> coords(std::size_t index) const;
  std::size_t index(std::array<int, 2> coords) const;
  double coordinate(std::size_t index, int d) const;

  // Index of the point reached by moving `offset` grid steps, with wrap.
  std::size_t translate(std::size_t index, std::array<int, 2> offset) const;

  // Geodesic distance sqrt(sum_d min(|dx_d|, 1-|dx_d|)^2).
  double distance(std::size_t i, std::size_t j) const;

  // Length of the wrapped displacement given in grid steps. distance(i, j)
  // equals offset_length(coords(i) - coords(j)) bit for bit.
  double offset_length(std::array<int, 2> steps) const;

  bool operator==(const TorusGrid& other) const { return sizes_ == other.sizes_; }

 private:
  void check_index(std::size_t index) const;

  std::vector<int> sizes_;
  std::size_t point_count_;
};

double geodesic_distance(const TorusGrid& grid, std::size_t i, std::size_t j);

/// One m x m complex matrix per grid point.
class MatrixField {
 public:
  MatrixField(TorusGrid grid, int m, bool hermitian = false);
  MatrixField(TorusGrid grid, int m, std::vector<Matrix> values, bool hermitian);

  template <class Fn>
  static MatrixField generate(const TorusGrid& grid, int m, bool hermitian, Fn&& fn) {
    std::vector<Matrix> values;
    values.reserve(grid.point_count());
    for (std::size_t i = 0; i < grid.point_count(); ++i) values.push_back(fn(i));
    return MatrixField(grid, m, std::move(values), hermitian);
  }

  static MatrixField constant(const TorusGrid& grid, const Matrix& value, bool hermitian);

  const TorusGrid& grid() const { return grid_; }
  int matrix_dim() const { return m_; }
  std::size_t size() const { return values_.size(); }
  bool hermitian() const { return hermitian_; }

  Matrix& operator[](std::size_t i) { return values_[i]; }
  const Matrix& operator[](std::size_t i) const { return values_[i]; }
  std::span<const Matrix> values() const { return values_; }

  // Re-validates the shape and, when flagged, the hermitian tolerance
  // ||a - a*|| <= 1e-12 (1 + ||a||). Throws ValidationError.
  void check_invariants() const;
  void set_hermitian(bool flag);

  bool same_shape(const MatrixField& other) const {
    return grid_ == other.grid_ && m_ == other.m_;
  }

 private:
  TorusGrid grid_;
  int m_;
  std::vector<Matrix> values_;
  bool hermitian_;
};

enum class NormKind { Operator, Frobenius };

// Largest singular value. Throws ValidationError on non-finite entries.
double operator_norm(const Matrix& a);
double frobenius_norm(const Matrix& a);
double matrix_norm(const Matrix& a, NormKind kind);

// ||a - a*|| in operator norm.
double hermitian_defect(const Matrix& a);
// (a + a*)/2 with the lower triangle written as the exact conjugate of the
// upper one and a real diagonal.
Matrix hermitize(const Matrix& a);
MatrixField hermitize(const MatrixField& f);

// max_x ||f(x) - g(x)||.
double sup_distance(const MatrixField& f, const MatrixField& g,
                    NormKind kind = NormKind::Operator);

struct LipschitzEstimate {
  double value = 0.0;
  std::pair<std::size_t, std::size_t> witness{0, 0};
  std::uint64_t pair_count = 0;
};

// Exact maximum of ||f(x)-f(y)|| / rho(x, y) over all unordered grid pairs.
// The witness is the lexicographically lowest pair attaining the maximum.
LipschitzEstimate lipschitz_constant(const MatrixField& f,
                                     NormKind kind = NormKind::Operator);

// The quotient lipschitz_constant maximizes, for a single pair.
double lipschitz_quotient(const MatrixField& f, std::size_t i, std::size_t j,
                          NormKind kind = NormKind::Operator);

struct ProjectionReport {
  bool ok = false;
  double max_idem_defect = 0.0;
  double max_sa_defect = 0.0;
};

ProjectionReport is_projection(const MatrixField& f, double tol);

}  // namespace projsmooth
