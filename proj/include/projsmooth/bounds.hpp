#pragma once

#include <json.hpp>

#include "projsmooth/calculus.hpp"
#include "projsmooth/grid_field.hpp"

namespace projsmooth {

// Two points at the given distance carrying one matrix each.
struct TwoPointSpace {
  double distance = 1.0;
  Matrix first;
  Matrix second;
};

double lipschitz_constant(const TwoPointSpace& space);

struct BoundReport {
  double delta = 0.0;
  double L_a = 0.0;
  double L_fa = 0.0;
  double bound = 0.0;  // L_a / (1 - 2 delta)
  double ratio = 0.0;  // L_fa / bound (0 when both vanish)
  bool ok = false;     // ratio <= 1 + 1e-9

  nlohmann::json to_json() const;
};

// Compares L(f(a)) against L(a) / (1 - 2 delta), with f the characteristic
// function of [1 - delta, inf). Throws GapViolation / ValidationError.
BoundReport proposition_bound_check(const MatrixField& a, double delta);
BoundReport proposition_bound_check(const TwoPointSpace& a, double delta);

struct InverseSeminormReport {
  double lhs = 0.0;  // L(b^-1)
  double rhs = 0.0;  // sup ||b^-1||^2 * L(b)
  double ratio = 0.0;
  bool ok = false;   // lhs <= rhs (1 + 1e-9)
};

// Throws ValidationError naming the first point whose smallest singular
// value is <= 1e-8.
InverseSeminormReport inverse_seminorm_check(const MatrixField& b);

// x -> z - a(x).
MatrixField resolvent_family(const MatrixField& a, Complex z);

struct SharpnessResult {
  TwoPointSpace a;
  TwoPointSpace fa;
  double L_a = 0.0;
  double L_fa = 0.0;
  double bound = 0.0;
  bool bound_attained = false;  // |L_fa - bound| <= 1e-15
};

// The two-point element a(x1) = delta, a(x2) = 1 - delta at distance 1.
SharpnessResult sharpness_example(double delta);

}  // namespace projsmooth
