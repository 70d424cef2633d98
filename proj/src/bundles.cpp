#include "projsmooth/bundles.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace projsmooth {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// sin(2 pi x) and cos(2 pi x) with exact zeros at the quarter turns.
double sin_turns(double x) {
  const double r = x - std::floor(x);
  if (r == 0.0 || r == 0.5) return 0.0;
  return std::sin(kTwoPi * r);
}

double cos_turns(double x) {
  const double r = x - std::floor(x);
  if (r == 0.25 || r == 0.75) return 0.0;
  return std::cos(kTwoPi * r);
}

Matrix random_hermitian(int m, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix h(m, m);
  for (int r = 0; r < m; ++r) {
    h(r, r) = Complex(normal(rng), 0.0);
    for (int c = r + 1; c < m; ++c) {
      h(r, c) = Complex(normal(rng), normal(rng));
      h(c, r) = std::conj(h(r, c));
    }
  }
  return h;
}

}  // namespace

MatrixField fixture_loring(int k, const TorusGrid& grid) {
  if (grid.dim() != 2) throw ValidationError("loring fixture needs a 2-D torus grid");
  return MatrixField::generate(grid, 2, true, [&](std::size_t i) {
    const double x = grid.coordinate(i, 0);
    const double f = 0.5 * (1.0 + cos_turns(x));
    const double half_sin = 0.5 * sin_turns(x);
    Complex c;
    if (x <= 0.5) {
      // k * y reduced mod 1 keeps the phase argument small.
      const double phase = static_cast<double>(static_cast<long long>(k) *
                                               grid.coords(i)[1] % grid.size(1)) /
                           grid.size(1);
      c = half_sin * Complex(cos_turns(phase), sin_turns(phase));
    } else {
      c = Complex(-half_sin, 0.0);
    }
    Matrix p(2, 2);
    p << Complex(f, 0.0), c, std::conj(c), Complex(1.0 - f, 0.0);
    return p;
  });
}

MatrixField fixture_random_near_projection(std::uint64_t seed, const TorusGrid& grid, int m,
                                           double delta) {
  if (!(delta > 0.0 && delta < 0.5)) throw ValidationError("delta must lie in (0, 1/2)");
  if (m < 1) throw ValidationError("matrix dimension must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  const int dim = grid.dim();
  std::vector<Matrix> cos_part, sin_part;
  for (int d = 0; d < dim; ++d) {
    cos_part.push_back(random_hermitian(m, 0.5, rng));
    sin_part.push_back(random_hermitian(m, 0.5, rng));
  }

  int rank;
  if (m == 1) {
    rank = std::uniform_int_distribution<int>(0, 1)(rng);
  } else {
    rank = std::uniform_int_distribution<int>(1, m - 1)(rng);
  }
  struct Band {
    double center;
    double amplitude;
    std::array<int, 2> wave;
    double phase;
  };
  std::vector<Band> bands;
  for (int j = 0; j < m; ++j) {
    Band b;
    b.center = j < m - rank ? 0.0 : 1.0;
    b.amplitude = 0.9 * delta * unit(rng);
    b.wave = {std::uniform_int_distribution<int>(0, 2)(rng),
              dim == 2 ? std::uniform_int_distribution<int>(0, 2)(rng) : 0};
    b.phase = unit(rng);
    bands.push_back(b);
  }

  return MatrixField::generate(grid, m, true, [&](std::size_t i) {
    std::array<double, 2> x{0.0, 0.0};
    for (int d = 0; d < dim; ++d) x[d] = grid.coordinate(i, d);

    Matrix h = Matrix::Zero(m, m);
    for (int d = 0; d < dim; ++d)
      h += cos_turns(x[d]) * cos_part[d] + sin_turns(x[d]) * sin_part[d];
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(h));
    const Eigen::VectorXcd phases =
        (Complex(0.0, 1.0) * solver.eigenvalues().cast<Complex>()).array().exp();
    const Matrix u = solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();

    Eigen::VectorXd lambda(m);
    for (int j = 0; j < m; ++j) {
      const Band& b = bands[j];
      const double arg = b.wave[0] * x[0] + b.wave[1] * x[1] + 0.5 * b.phase;
      lambda(j) = b.center + b.amplitude * sin_turns(arg);
    }
    return hermitize(u * lambda.cast<Complex>().asDiagonal() * u.adjoint());
  });
}

Matrix random_gapped_hermitian(std::uint64_t seed, int m, double delta) {
  if (!(delta > 0.0 && delta < 0.5)) throw ValidationError("delta must lie in (0, 1/2)");
  if (m < 1) throw ValidationError("matrix dimension must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  Matrix g(m, m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) g(r, c) = Complex(normal(rng), normal(rng));
  const Matrix u = g.householderQr().householderQ();

  const int rank = m == 1 ? std::uniform_int_distribution<int>(0, 1)(rng)
                          : std::uniform_int_distribution<int>(1, m - 1)(rng);
  Eigen::VectorXd lambda(m);
  for (int j = 0; j < m; ++j) lambda(j) = (j < m - rank ? 0.0 : 1.0) + 0.9 * delta * unit(rng);
  return hermitize(u * lambda.cast<Complex>().asDiagonal() * u.adjoint());
}

MatrixField fixture_constant(const TorusGrid& grid, int m, int rank) {
  if (m < 1 || rank < 0 || rank > m) throw ValidationError("constant fixture: need 0 <= rank <= m");
  Matrix p = Matrix::Zero(m, m);
  for (int j = 0; j < rank; ++j) p(j, j) = 1.0;
  return MatrixField::constant(grid, p, true);
}

FixtureName parse_fixture_name(const std::string& name) {
  if (name == "loring_k" || name == "loring") return FixtureName::LoringK;
  if (name == "random" || name == "random_near_projection") return FixtureName::Random;
  if (name == "constant") return FixtureName::Constant;
  throw ValidationError("unknown fixture name '" + name + "'");
}

MatrixField make_fixture(const FixtureSpec& spec) {
  switch (spec.name) {
    case FixtureName::LoringK:
      if (spec.m != 2) throw ValidationError("loring_k fixture requires m = 2");
      return fixture_loring(spec.k, spec.grid);
    case FixtureName::Random:
      return fixture_random_near_projection(spec.seed, spec.grid, spec.m, spec.delta);
    case FixtureName::Constant:
    default:
      return fixture_constant(spec.grid, spec.m, spec.k);
  }
}

// ---------------------------------------------------------------------------
// Chern number

Matrix range_frame(const Matrix& p, int rank) {
  const auto m = p.rows();
  Matrix frame(m, rank);
  for (int r = 0; r < rank; ++r) {
    Eigen::Index best = -1;
    double best_norm = -1.0;
    Eigen::VectorXcd best_vec;
    for (Eigen::Index c = 0; c < m; ++c) {
      Eigen::VectorXcd v = p.col(c);
      for (int pass = 0; pass < 2; ++pass)
        for (int q = 0; q < r; ++q) v -= frame.col(q) * frame.col(q).dot(v);
      const double n = v.norm();
      if (n > best_norm) {
        best_norm = n;
        best = c;
        best_vec = std::move(v);
      }
    }
    if (best < 0 || best_norm < 1e-8) throw CertificationError("range_frame: rank deficient projection");
    frame.col(r) = best_vec / best_norm;
  }
  return frame;
}

ChernResult chern_number(const MatrixField& p) {
  const TorusGrid& grid = p.grid();
  if (grid.dim() != 2) throw ValidationError("chern_number needs a 2-D torus grid");
  if (grid.size(0) < 16 || grid.size(1) < 16)
    throw ValidationError("chern_number needs a grid of at least 16 x 16");
  if (!is_projection(p, 1e-8).ok) throw ValidationError("chern_number input is not a projection field");

  const int rank = static_cast<int>(std::lround(p[0].trace().real()));
  std::vector<Matrix> frames;
  frames.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (std::lround(p[i].trace().real()) != rank)
      throw CertificationError("chern_number: projection rank changes at grid index " +
                               std::to_string(i));
    frames.push_back(range_frame(p[i], rank));
  }

  auto link = [&](std::size_t a, std::size_t b) {
    const Matrix overlap = frames[a].adjoint() * frames[b];
    const Complex det = rank == 0 ? Complex(1.0, 0.0) : overlap.determinant();
    const double mag = std::abs(det);
    if (mag < 1e-12) throw CertificationError("chern_number: degenerate link; grid too coarse");
    return det / mag;
  };

  // Row-major accumulation over plaquettes n, n+x, n+x+y, n+y.
  double total = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) {
    const std::size_t nx = grid.translate(n, {1, 0});
    const std::size_t nxy = grid.translate(n, {1, 1});
    const std::size_t ny = grid.translate(n, {0, 1});
    const Complex loop = link(n, nx) * link(nx, nxy) * link(nxy, ny) * link(ny, n);
    total += std::arg(loop);
  }

  ChernResult result;
  result.rank = rank;
  result.raw = total / (2.0 * std::numbers::pi);
  result.chern = static_cast<int>(std::lround(result.raw));
  result.residual = std::abs(result.raw - result.chern);
  if (result.residual >= 0.1)
    throw CertificationError("chern_number: rounding residual " + std::to_string(result.residual) +
                             " >= 0.1");
  return result;
}

MatrixField direct_sum(const MatrixField& p, const MatrixField& q) {
  if (!(p.grid() == q.grid())) throw ValidationError("direct_sum: grids differ");
  const int m = p.matrix_dim() + q.matrix_dim();
  return MatrixField::generate(p.grid(), m, p.hermitian() && q.hermitian(), [&](std::size_t i) {
    Matrix out = Matrix::Zero(m, m);
    out.topLeftCorner(p.matrix_dim(), p.matrix_dim()) = p[i];
    out.bottomRightCorner(q.matrix_dim(), q.matrix_dim()) = q[i];
    return out;
  });
}

MatrixField conjugate(const MatrixField& p, const Matrix& u) {
  if (u.rows() != p.matrix_dim() || u.cols() != p.matrix_dim())
    throw ValidationError("conjugate: unitary has the wrong size");
  return MatrixField::generate(p.grid(), p.matrix_dim(), p.hermitian(), [&](std::size_t i) {
    const Matrix c = u * p[i] * u.adjoint();
    return p.hermitian() ? hermitize(c) : c;
  });
}

}  // namespace projsmooth
