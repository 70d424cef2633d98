#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "projsmooth/bundles.hpp"
#include "projsmooth/calculus.hpp"
#include "projsmooth/grid_field.hpp"
#include "projsmooth/mollifier.hpp"

namespace projsmooth {

struct PipelineConfig {
  double target_eps = 0.1;
  std::optional<double> delta;           // empty: auto
  std::optional<double> epsilon_smooth;  // empty: auto
  double kernel_plateau = 0.5;
  int max_retries = 8;
  bool check_chern = false;

  void validate() const;
  nlohmann::json to_json() const;
};

// Upper end of the automatic smoothing radius.
inline constexpr double kMaxAutoSmoothingRadius = 0.25;

// min(0.1, target_eps / 4).
double auto_delta(double target_eps);
// delta / (2 L): the largest radius with L * radius <= delta / 2. Infinite
// for L == 0.
double auto_smoothing_radius(double delta, double lipschitz);

struct ChosenParameters {
  double delta = 0.0;
  double epsilon_smooth = 0.0;
  // delta / (2 L(p)) before clamping (infinity for constant p).
  double epsilon_smooth_unclamped = 0.0;
  bool clamped = false;
  LipschitzEstimate L_p;
};

/**
 * Auto rules: delta = min(0.1, eps/4); epsilon_smooth = delta / (2 L(p)) so
 * that L(p) epsilon_smooth <= delta/2, then clamped into
 * [2 grid steps, kMaxAutoSmoothingRadius]. Throws ValidationError when p is
 * not a projection at 1e-8 or the clamp interval is empty.
 */
ChosenParameters choose_parameters(const PipelineConfig& config, const MatrixField& p);

struct PipelineAttempt {
  double epsilon_smooth = 0.0;
  double sup_p_p1 = 0.0;
  bool gap_certified = false;
};

struct PipelineReport {
  PipelineConfig config;
  std::vector<int> grid_sizes;
  int matrix_dim = 0;

  double delta_used = 0.0;
  double epsilon_smooth_used = 0.0;
  double epsilon_smooth_unclamped = 0.0;
  bool epsilon_smooth_clamped = false;

  LipschitzEstimate L_p, L_p1, L_q;
  double sup_p_p1 = 0.0;
  double sup_q_p1 = 0.0;
  double sup_q_p = 0.0;
  double idem_defect_q = 0.0;
  double sa_defect_q = 0.0;

  double bound = 0.0;        // L_p1 / (1 - 2 delta)
  bool projection_ok = false;  // is_projection(q, 1e-10)
  bool bound_ok = false;     // L_q <= bound (1 + 1e-9)
  bool eps_ok = false;       // sup_q_p < target_eps
  bool twodelta_ok = false;  // sup_q_p <= 2 delta (1 + 1e-12)
  bool lip_target_ok = false;  // L_q < L_p + target_eps

  std::optional<ChernResult> chern_p, chern_q;

  SpectrumReport spectrum_p1;
  nlohmann::json stencil;
  double second_difference_p = 0.0;
  double second_difference_q = 0.0;

  int retries_used = 0;
  std::vector<PipelineAttempt> attempts;

  // Certified flags; eps_ok only counts when 2 delta < target_eps, and chern
  // equality only when it was requested.
  bool certified() const;
  nlohmann::json to_json(bool include_timestamp = false) const;
};

struct PipelineResult {
  PipelineReport report;
  MatrixField p1;
  MatrixField q;
};

// smooth -> gap check -> spectral projection -> certify. Each failed gap
// check (or sup ||p - p1|| >= delta) halves epsilon_smooth, up to
// max_retries times; afterwards CertificationError is thrown.
PipelineResult smooth_project(const MatrixField& p, const PipelineConfig& config);

}  // namespace projsmooth
