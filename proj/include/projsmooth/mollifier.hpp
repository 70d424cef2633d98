#pragma once

#include <array>
#include <vector>

#include <json.hpp>

#include "projsmooth/grid_field.hpp"

namespace projsmooth {

// C-infinity step: 1 for t <= 0, 0 for t >= 1, built from exp(-1/t).
double smooth_transition(double t);

/**
 * Radial bump kappa(r) on R^n: equal to norm_const on [0, plateau], decaying
 * smoothly to 0 at r = 1, and normalized so that the integral of
 * kappa(|v|) over R^n is 1. The constant comes from composite Simpson
 * quadrature of the radial integral (>= 4096 panels, doubled until the
 * relative change drops below 1e-10).
 */
class MollifierKernel {
 public:
  explicit MollifierKernel(int dim, double plateau = 0.5);

  int dim() const { return dim_; }
  double plateau() const { return plateau_; }
  double norm_const() const { return norm_const_; }

  double operator()(double r) const { return norm_const_ * shape(r); }

  // Unnormalized profile with shape(0) = 1.
  double shape(double r) const;

  // Simpson estimate of the integral of kappa(|v|) over R^n.
  double integral(int panels) const;

 private:
  int dim_;
  double plateau_;
  double norm_const_ = 1.0;
};

/// Quadrature weights for f_eps on a particular grid.
struct DiscreteStencil {
  TorusGrid grid;
  double epsilon;
  // Offsets in grid steps, sorted lexicographically; every wrapped length is
  // strictly below epsilon.
  std::vector<std::array<int, 2>> offsets;
  // kappa(|v| / epsilon) renormalized to sum to 1.
  std::vector<double> weights;

  std::size_t size() const { return offsets.size(); }
  nlohmann::json to_json() const;
};

// Throws ValidationError when epsilon is outside (0, 1/2) or when the ball of
// radius epsilon contains no grid offset besides zero.
DiscreteStencil discretize(const MollifierKernel& kernel, const TorusGrid& grid, double epsilon);

// f_eps(x) = sum_v w_v f(x + v), evaluated as f(x) + sum_v w_v (f(x+v) - f(x))
// so that constant fields are reproduced exactly.
MatrixField smooth(const MatrixField& f, const DiscreteStencil& stencil);

// max over points and axes of ||f(x + h e_d) - 2 f(x) + f(x - h e_d)|| / h^2.
// A smoothness diagnostic only.
double second_difference_diagnostic(const MatrixField& f);

}  // namespace projsmooth
