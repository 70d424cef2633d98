#include "projsmooth/bounds.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace projsmooth {

namespace {

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 0.5))
    throw ValidationError("gap parameter delta must lie in (0, 1/2)");
}

BoundReport make_report(double delta, double L_a, double L_fa) {
  BoundReport r;
  r.delta = delta;
  r.L_a = L_a;
  r.L_fa = L_fa;
  r.bound = L_a / (1.0 - 2.0 * delta);
  if (r.bound > 0.0) {
    r.ratio = L_fa / r.bound;
  } else {
    r.ratio = L_fa == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  r.ok = r.ratio <= 1.0 + 1e-9;
  return r;
}

}  // namespace

double lipschitz_constant(const TwoPointSpace& space) {
  if (!(space.distance > 0.0)) throw ValidationError("two-point distance must be positive");
  const Matrix diff = space.first - space.second;
  return operator_norm(diff) / space.distance;
}

nlohmann::json BoundReport::to_json() const {
  return {{"delta", delta}, {"L_a", L_a},     {"L_fa", L_fa},
          {"bound", bound}, {"ratio", ratio}, {"ok", ok}};
}

BoundReport proposition_bound_check(const MatrixField& a, double delta) {
  check_delta(delta);
  const double L_a = lipschitz_constant(a).value;
  const MatrixField fa = apply_calculus(a, delta);
  return make_report(delta, L_a, lipschitz_constant(fa).value);
}

BoundReport proposition_bound_check(const TwoPointSpace& a, double delta) {
  check_delta(delta);
  const TwoPointSpace fa{a.distance, upper_spectral_projection(a.first, delta),
                         upper_spectral_projection(a.second, delta)};
  return make_report(delta, lipschitz_constant(a), lipschitz_constant(fa));
}

InverseSeminormReport inverse_seminorm_check(const MatrixField& b) {
  std::vector<Matrix> inverses;
  inverses.reserve(b.size());
  double sup_inverse = 0.0;
  for (std::size_t x = 0; x < b.size(); ++x) {
    Eigen::JacobiSVD<Matrix> svd(b[x]);
    const double smallest = svd.singularValues()(svd.singularValues().size() - 1);
    if (!(smallest > 1e-8))
      throw ValidationError("inverse_seminorm_check: near-singular value at grid index " +
                            std::to_string(x));
    inverses.push_back(b[x].inverse());
    sup_inverse = std::max(sup_inverse, operator_norm(inverses.back()));
  }
  const MatrixField inv(b.grid(), b.matrix_dim(), std::move(inverses), false);

  InverseSeminormReport r;
  r.lhs = lipschitz_constant(inv).value;
  r.rhs = sup_inverse * sup_inverse * lipschitz_constant(b).value;
  if (r.rhs > 0.0) {
    r.ratio = r.lhs / r.rhs;
  } else {
    r.ratio = r.lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  r.ok = r.lhs <= r.rhs * (1.0 + 1e-9);
  return r;
}

MatrixField resolvent_family(const MatrixField& a, Complex z) {
  return MatrixField::generate(a.grid(), a.matrix_dim(), false, [&](std::size_t x) {
    Matrix shifted = -a[x];
    shifted.diagonal().array() += z;
    return shifted;
  });
}

SharpnessResult sharpness_example(double delta) {
  check_delta(delta);
  SharpnessResult result;
  result.a = {1.0, Matrix::Constant(1, 1, delta), Matrix::Constant(1, 1, 1.0 - delta)};
  result.fa = {1.0, upper_spectral_projection(result.a.first, delta),
               upper_spectral_projection(result.a.second, delta)};
  result.L_a = lipschitz_constant(result.a);
  result.L_fa = lipschitz_constant(result.fa);
  result.bound = result.L_a / (1.0 - 2.0 * delta);
  result.bound_attained = std::abs(result.L_fa - result.bound) <= 1e-15;
  return result;
}

}  // namespace projsmooth
