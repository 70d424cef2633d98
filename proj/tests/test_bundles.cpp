#include <doctest.h>

#include <random>

#include "projsmooth/bundles.hpp"
#include "projsmooth/calculus.hpp"

using namespace projsmooth;

namespace {

// Continuum Chern integral (1 / 2 pi i) * integral of tr(p [dp/dx, dp/dy])
// with periodic central differences; no frames or phases involved.
double curvature_integral(const MatrixField& p) {
  const TorusGrid& g = p.grid();
  const int nx = g.size(0), ny = g.size(1);
  Complex total = 0.0;
  for (int ix = 0; ix < nx; ++ix)
    for (int iy = 0; iy < ny; ++iy) {
      auto at = [&](int a, int b) -> const Matrix& {
        return p[g.index({(a % nx + nx) % nx, (b % ny + ny) % ny})];
      };
      const Matrix dx = (at(ix + 1, iy) - at(ix - 1, iy)) * (nx / 2.0);
      const Matrix dy = (at(ix, iy + 1) - at(ix, iy - 1)) * (ny / 2.0);
      total += (at(ix, iy) * (dx * dy - dy * dx)).trace();
    }
  total /= static_cast<double>(nx) * ny;
  return (total / Complex(0.0, 2 * M_PI)).real();
}

Matrix random_unitary(std::uint64_t seed, int m) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix a(m, m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) a(r, c) = Complex(g(rng), g(rng));
  return Eigen::HouseholderQR<Matrix>(a).householderQ() * Matrix::Identity(m, m);
}

bool same_values(const MatrixField& a, const MatrixField& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

Matrix diag2(double a, double b) {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = a;
  d(1, 1) = b;
  return d;
}

}  // namespace

TEST_CASE("Loring fixture values") {
  const TorusGrid grid = TorusGrid::square(64);
  for (int k : {1, 2, 5}) {
    const MatrixField p = fixture_loring(k, grid);
    CHECK(p.hermitian());
    CHECK(p.matrix_dim() == 2);
    for (int iy = 0; iy < 64; iy += 7) {
      CHECK(p[grid.index({0, iy})] == diag2(1, 0));
      CHECK(p[grid.index({32, iy})] == diag2(0, 1));
    }
    CHECK(is_projection(p, 1e-12).ok);
  }
  // Off the seams the closed formula holds.
  const MatrixField p = fixture_loring(1, grid);
  const Matrix& v = p[grid.index({16, 16})];
  CHECK(v(0, 0).real() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(v(0, 1) - Complex(0.0, 0.5)) <= 1e-15);
  CHECK_THROWS_AS(fixture_loring(1, TorusGrid::circle(64)), ValidationError);
}

TEST_CASE("Loring Chern numbers") {
  const auto c64 = chern_number(fixture_loring(1, TorusGrid::square(64)));
  const auto c128 = chern_number(fixture_loring(1, TorusGrid::square(128)));
  CHECK(std::abs(c64.chern) == 1);
  CHECK(c64.chern == c128.chern);
  CHECK(c64.chern == -1);
  CHECK(c64.residual < 1e-10);
  CHECK(c64.rank == 1);

  const auto c3 = chern_number(fixture_loring(3, TorusGrid::square(128)));
  CHECK(c3.chern == -3);
  CHECK(c3.residual < 1e-10);
  CHECK(chern_number(fixture_loring(0, TorusGrid::square(32))).chern == 0);
  CHECK(chern_number(fixture_loring(-2, TorusGrid::square(64))).chern == 2);

  // Anisotropic grids see the same class.
  CHECK(chern_number(fixture_loring(2, TorusGrid({48, 96}))).chern == -2);
}

TEST_CASE("Chern sign agrees with the continuum curvature integral") {
  for (int k : {1, 2}) {
    const MatrixField p = fixture_loring(k, TorusGrid::square(128));
    const double continuum = curvature_integral(p);
    CAPTURE(continuum);
    CHECK(std::abs(continuum - chern_number(p).chern) < 0.1);
  }
}

TEST_CASE("Chern number invariances") {
  const TorusGrid grid = TorusGrid::square(32);
  CHECK(chern_number(fixture_constant(grid, 3, 2)).chern == 0);
  CHECK(chern_number(fixture_constant(grid, 2, 1)).rank == 1);

  const MatrixField p = fixture_loring(1, grid);
  for (std::uint64_t seed = 0; seed < 4; ++seed)
    CHECK(chern_number(conjugate(p, random_unitary(seed, 2))).chern == -1);

  const MatrixField q = fixture_loring(2, grid);
  const MatrixField pq = direct_sum(p, q);
  CHECK(pq.matrix_dim() == 4);
  const auto sum = chern_number(pq);
  CHECK(sum.chern == -3);
  CHECK(sum.rank == 2);
  CHECK(chern_number(direct_sum(p, fixture_constant(grid, 2, 1))).chern == -1);
  CHECK(chern_number(direct_sum(fixture_loring(1, grid), fixture_loring(-1, grid))).chern == 0);
}

TEST_CASE("Chern number errors") {
  CHECK_THROWS_AS(chern_number(fixture_loring(1, TorusGrid::square(8))), ValidationError);
  CHECK_THROWS_AS(chern_number(fixture_constant(TorusGrid::circle(32), 2, 1)), ValidationError);

  MatrixField not_proj = fixture_loring(1, TorusGrid::square(16));
  not_proj[5] *= 0.9;
  CHECK_THROWS_AS(chern_number(not_proj), ValidationError);

  MatrixField rank_jump = fixture_constant(TorusGrid::square(16), 2, 1);
  rank_jump[40] = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(chern_number(rank_jump), CertificationError);

}

TEST_CASE("range frames") {
  const Matrix p = upper_spectral_projection(random_gapped_hermitian(9, 5, 0.1), 0.1);
  const int rank = static_cast<int>(std::lround(p.trace().real()));
  const Matrix v = range_frame(p, rank);
  CHECK(v.cols() == rank);
  CHECK(operator_norm(v.adjoint() * v - Matrix::Identity(rank, rank)) <= 1e-12);
  CHECK(operator_norm(v * v.adjoint() - p) <= 1e-12);
}

TEST_CASE("random near-projection fixture") {
  const TorusGrid grid = TorusGrid::square(12);
  for (std::uint64_t seed : {0u, 1u, 99u}) {
    const MatrixField a = fixture_random_near_projection(seed, grid, 3, 0.2);
    const MatrixField b = fixture_random_near_projection(seed, grid, 3, 0.2);
    CHECK(same_values(a, b));
    CHECK(a.hermitian());
    const auto gap = spectral_gap(a, 0.2);
    CHECK(gap.certified());
    CHECK(gap.max_distance_to_01 <= 0.18 + 1e-12);
    CHECK(gap.upper_count > 0);
    CHECK(gap.lower_count > 0);
    CHECK(std::isfinite(lipschitz_constant(a).value));
  }
  CHECK_FALSE(same_values(fixture_random_near_projection(0, grid, 3, 0.2),
                          fixture_random_near_projection(1, grid, 3, 0.2)));
  CHECK_THROWS_AS(fixture_random_near_projection(0, grid, 3, 0.5), ValidationError);
}

TEST_CASE("random gapped matrices") {
  for (int m = 1; m <= 6; ++m) {
    const Matrix a = random_gapped_hermitian(static_cast<std::uint64_t>(m), m, 0.1);
    CHECK(hermitian_defect(a) <= 1e-15);
    CHECK(spectral_gap(a, 0.1).certified());
  }
}

TEST_CASE("fixture names") {
  CHECK(parse_fixture_name("loring_k") == FixtureName::LoringK);
  CHECK(parse_fixture_name("loring") == FixtureName::LoringK);
  CHECK(parse_fixture_name("random_near_projection") == FixtureName::Random);
  CHECK(parse_fixture_name("constant") == FixtureName::Constant);
  CHECK_THROWS_AS(parse_fixture_name("bott"), ValidationError);

  FixtureSpec spec;
  spec.k = 2;
  spec.grid = TorusGrid::square(16);
  CHECK(same_values(make_fixture(spec), fixture_loring(2, spec.grid)));
  spec.name = FixtureName::Constant;
  spec.m = 3;
  spec.k = 1;
  CHECK(make_fixture(spec)[0].trace().real() == 1.0);
  spec.name = FixtureName::LoringK;
  CHECK_THROWS_AS(make_fixture(spec), ValidationError);
}

TEST_CASE("Loring Lipschitz constant is grid-stable") {
  const double l64 = lipschitz_constant(fixture_loring(1, TorusGrid::square(64))).value;
  const double l128 = lipschitz_constant(fixture_loring(1, TorusGrid::square(128))).value;
  CHECK(std::abs(l64 - l128) <= 0.05 * l128);
  CHECK(l128 < M_PI + 1e-9);
}
