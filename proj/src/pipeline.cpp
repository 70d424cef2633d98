#include "projsmooth/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <sstream>
#include <string>

#include "projsmooth/bundles.hpp"

namespace projsmooth {

void PipelineConfig::validate() const {
  if (!(target_eps > 0.0)) throw ValidationError("target epsilon must be positive");
  if (delta && !(*delta > 0.0 && *delta < 0.5))
    throw ValidationError("delta must lie in (0, 1/2)");
  if (epsilon_smooth && !(*epsilon_smooth > 0.0 && *epsilon_smooth < 0.5))
    throw ValidationError("epsilon_smooth must lie in (0, 1/2)");
  if (!(kernel_plateau > 0.0 && kernel_plateau < 1.0))
    throw ValidationError("kernel plateau must lie in (0, 1)");
  if (max_retries < 1) throw ValidationError("max_retries must be >= 1");
}

nlohmann::json PipelineConfig::to_json() const {
  nlohmann::json j{{"target_eps", target_eps},
                   {"kernel_plateau", kernel_plateau},
                   {"max_retries", max_retries},
                   {"check_chern", check_chern}};
  j["delta"] = delta ? nlohmann::json(*delta) : nlohmann::json("auto");
  j["epsilon_smooth"] = epsilon_smooth ? nlohmann::json(*epsilon_smooth) : nlohmann::json("auto");
  return j;
}

double auto_delta(double target_eps) { return std::min(0.1, target_eps / 4.0); }

double auto_smoothing_radius(double delta, double lipschitz) {
  return lipschitz > 0.0 ? delta / (2.0 * lipschitz) : std::numeric_limits<double>::infinity();
}

ChosenParameters choose_parameters(const PipelineConfig& config, const MatrixField& p) {
  config.validate();
  if (!is_projection(p, 1e-8).ok) throw ValidationError("pipeline input is not a projection field");

  ChosenParameters chosen;
  chosen.delta = config.delta.value_or(auto_delta(config.target_eps));
  chosen.L_p = lipschitz_constant(p);

  if (config.epsilon_smooth) {
    chosen.epsilon_smooth = *config.epsilon_smooth;
    chosen.epsilon_smooth_unclamped = *config.epsilon_smooth;
    return chosen;
  }

  const double lower = 2.0 / p.grid().min_size();
  const double upper = kMaxAutoSmoothingRadius;
  if (lower > upper)
    throw ValidationError("grid too coarse: two grid steps exceed the largest smoothing radius");
  chosen.epsilon_smooth_unclamped = auto_smoothing_radius(chosen.delta, chosen.L_p.value);
  chosen.epsilon_smooth = std::clamp(chosen.epsilon_smooth_unclamped, lower, upper);
  chosen.clamped = chosen.epsilon_smooth != chosen.epsilon_smooth_unclamped;
  return chosen;
}

bool PipelineReport::certified() const {
  const bool eps_required = 2.0 * delta_used < config.target_eps;
  bool ok = projection_ok && bound_ok && twodelta_ok && (!eps_required || eps_ok);
  if (config.check_chern && chern_p && chern_q) ok = ok && chern_p->chern == chern_q->chern;
  return ok;
}

namespace {

nlohmann::json lipschitz_json(const LipschitzEstimate& e) {
  return {{"value", e.value},
          {"witness", {e.witness.first, e.witness.second}},
          {"pair_count", e.pair_count}};
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

nlohmann::json PipelineReport::to_json(bool include_timestamp) const {
  nlohmann::json attempts_json = nlohmann::json::array();
  for (const auto& a : attempts)
    attempts_json.push_back({{"epsilon_smooth", a.epsilon_smooth},
                             {"sup_p_p1", a.sup_p_p1},
                             {"gap_certified", a.gap_certified}});

  nlohmann::json j{
      {"format", "projsmooth-report v1"},
      {"config", config.to_json()},
      {"grid_sizes", grid_sizes},
      {"matrix_dim", matrix_dim},
      {"delta_used", delta_used},
      {"epsilon_smooth_used", epsilon_smooth_used},
      {"epsilon_smooth_unclamped", std::isfinite(epsilon_smooth_unclamped)
                                       ? nlohmann::json(epsilon_smooth_unclamped)
                                       : nlohmann::json("inf")},
      {"epsilon_smooth_clamped", epsilon_smooth_clamped},
      {"L_p", lipschitz_json(L_p)},
      {"L_p1", lipschitz_json(L_p1)},
      {"L_q", lipschitz_json(L_q)},
      {"sup_p_p1", sup_p_p1},
      {"sup_q_p1", sup_q_p1},
      {"sup_q_p", sup_q_p},
      {"idem_defect_q", idem_defect_q},
      {"sa_defect_q", sa_defect_q},
      {"bound", bound},
      {"projection_ok", projection_ok},
      {"bound_ok", bound_ok},
      {"eps_ok", eps_ok},
      {"twodelta_ok", twodelta_ok},
      {"lip_target_ok", lip_target_ok},
      {"certified", certified()},
      {"spectrum_p1", spectrum_p1.to_json()},
      {"stencil", stencil},
      {"second_difference_p", second_difference_p},
      {"second_difference_q", second_difference_q},
      {"retries_used", retries_used},
      {"attempts", attempts_json},
  };
  j["chern_p"] = chern_p ? chern_p->to_json() : nlohmann::json(nullptr);
  j["chern_q"] = chern_q ? chern_q->to_json() : nlohmann::json(nullptr);
  if (include_timestamp) j["timestamp"] = utc_timestamp();
  return j;
}

PipelineResult smooth_project(const MatrixField& p, const PipelineConfig& config) {
  const ChosenParameters chosen = choose_parameters(config, p);
  const double delta = chosen.delta;
  const MollifierKernel kernel(p.grid().dim(), config.kernel_plateau);
  const MatrixField ph = hermitize(p);

  PipelineReport report;
  report.config = config;
  report.grid_sizes.assign(p.grid().sizes().begin(), p.grid().sizes().end());
  report.matrix_dim = p.matrix_dim();
  report.delta_used = delta;
  report.epsilon_smooth_unclamped = chosen.epsilon_smooth_unclamped;
  report.epsilon_smooth_clamped = chosen.clamped;
  report.L_p = chosen.L_p;

  double radius = chosen.epsilon_smooth;
  std::optional<MatrixField> p1;
  std::optional<DiscreteStencil> stencil;
  for (int attempt = 0;; ++attempt) {
    try {
      stencil = discretize(kernel, p.grid(), radius);
    } catch (const ValidationError& e) {
      throw CertificationError(std::string("gap never certified before the stencil degenerated: ") +
                               e.what());
    }
    MatrixField candidate = smooth(ph, *stencil);
    const double sup = sup_distance(p, candidate);
    SpectrumReport spectrum = spectral_gap(candidate, delta);
    const bool accepted = spectrum.certified() && sup < delta;
    report.attempts.push_back({radius, sup, spectrum.certified()});
    if (accepted) {
      report.epsilon_smooth_used = radius;
      report.retries_used = attempt;
      report.sup_p_p1 = sup;
      report.spectrum_p1 = std::move(spectrum);
      p1 = std::move(candidate);
      break;
    }
    if (attempt >= config.max_retries) {
      std::ostringstream os;
      os.precision(17);
      os << "spectral gap at delta = " << delta << " not certified after " << attempt
         << " retries (last epsilon_smooth = " << radius << ", sup ||p - p1|| = " << sup << ")";
      throw CertificationError(os.str());
    }
    radius *= 0.5;
  }
  report.stencil = stencil->to_json();

  MatrixField q = apply_calculus(*p1, delta);

  report.L_p1 = lipschitz_constant(*p1);
  report.L_q = lipschitz_constant(q);
  report.sup_q_p1 = sup_distance(q, *p1);
  report.sup_q_p = sup_distance(q, p);
  const ProjectionReport proj = is_projection(q, 1e-10);
  report.idem_defect_q = proj.max_idem_defect;
  report.sa_defect_q = proj.max_sa_defect;
  report.projection_ok = proj.ok;

  report.bound = report.L_p1.value / (1.0 - 2.0 * delta);
  report.bound_ok = report.L_q.value <= report.bound * (1.0 + 1e-9);
  report.eps_ok = report.sup_q_p < config.target_eps;
  report.twodelta_ok = report.sup_q_p <= 2.0 * delta * (1.0 + 1e-12);
  report.lip_target_ok = report.L_q.value < report.L_p.value + config.target_eps;

  if (config.check_chern && p.grid().dim() == 2) {
    report.chern_p = chern_number(p);
    report.chern_q = chern_number(q);
  }
  report.second_difference_p = second_difference_diagnostic(p);
  report.second_difference_q = second_difference_diagnostic(q);

  return {std::move(report), std::move(*p1), std::move(q)};
}

}  // namespace projsmooth
