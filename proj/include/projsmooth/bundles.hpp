#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "projsmooth/grid_field.hpp"

namespace projsmooth {

/**
 * Two-band clutching projection on T^2 representing the line bundle of
 * winding k:
 *
 *   p(x, y) = [[f(x), c], [conj(c), 1 - f(x)]],   f(x) = (1 + cos 2 pi x) / 2,
 *   c(x, y) = g(x) + h(x) exp(2 pi i k y),
 *
 * with h(x) = sin(2 pi x) / 2 on [0, 1/2] (0 elsewhere) and
 * g(x) = -sin(2 pi x) / 2 on [1/2, 1] (0 elsewhere). Since |c|^2 = f(1 - f)
 * every value is an exact rank-one projection. The field is Lipschitz but has
 * derivative jumps along x = 0 and x = 1/2.
 *
 * Orientation: with plaquettes traversed (x, y) anti-clockwise,
 * chern_number(fixture_loring(k, ...)) == -k.
 */
MatrixField fixture_loring(int k, const TorusGrid& grid);

// Hermitian field u(x) diag(lambda(x)) u(x)* where u(x) = exp(i H(x)) for a
// trigonometric hermitian H and every lambda_j(x) stays inside
// [-0.9 delta, 0.9 delta] or [1 - 0.9 delta, 1 + 0.9 delta]. Deterministic in
// the seed.
MatrixField fixture_random_near_projection(std::uint64_t seed, const TorusGrid& grid, int m,
                                           double delta);

// Single gapped hermitian matrix u diag(lambda) u* with a Haar-like random
// unitary u and eigenvalues in [-0.9 delta, 0.9 delta] or
// [1 - 0.9 delta, 1 + 0.9 delta]; at least one eigenvalue in each band when
// m >= 2.
Matrix random_gapped_hermitian(std::uint64_t seed, int m, double delta);

// Constant diag(1, ..., 1, 0, ..., 0) with `rank` ones.
MatrixField fixture_constant(const TorusGrid& grid, int m, int rank);

enum class FixtureName { LoringK, Random, Constant };

struct FixtureSpec {
  FixtureName name = FixtureName::LoringK;
  int k = 1;  // winding for loring_k, rank for constant
  TorusGrid grid = TorusGrid::square(64);
  int m = 2;
  std::uint64_t seed = 0;
  double delta = 0.2;
};

FixtureName parse_fixture_name(const std::string& name);
MatrixField make_fixture(const FixtureSpec& spec);

struct ChernResult {
  int chern = 0;
  double raw = 0.0;       // plaquette phase sum / 2 pi
  double residual = 0.0;  // |raw - chern|
  int rank = 0;

  nlohmann::json to_json() const { return {{"chern", chern}, {"residual", residual}}; }
};

// Lattice first Chern number from plaquette products of link variables
// det(V(a)* V(b)) between orthonormal range frames. Requires a 2-D grid of
// at least 16 x 16 and is_projection(p, 1e-8); throws CertificationError on
// a rank change, a degenerate link or a rounding residual >= 0.1.
ChernResult chern_number(const MatrixField& p);

// Orthonormal basis of the range of the projection p (columns), from pivoted
// Gram-Schmidt on the columns of p.
Matrix range_frame(const Matrix& p, int rank);

MatrixField direct_sum(const MatrixField& p, const MatrixField& q);
MatrixField conjugate(const MatrixField& p, const Matrix& u);

}  // namespace projsmooth
