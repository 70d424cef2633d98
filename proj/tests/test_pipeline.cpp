#include <doctest.h>

#include <limits>

#include "projsmooth/field_io.hpp"
#include "projsmooth/pipeline.hpp"

using namespace projsmooth;

namespace {

// Scalar 0/1 step on T^1: 1 on the first half of the circle.
MatrixField step(int n) {
  return MatrixField::generate(TorusGrid::circle(n), 1, true, [n](std::size_t i) {
    return Matrix::Constant(1, 1, static_cast<int>(i) < n / 2 ? 1.0 : 0.0);
  });
}

}  // namespace

TEST_CASE("automatic parameter rules") {
  CHECK(auto_delta(0.1) == 0.025);
  CHECK(auto_delta(1.0) == 0.1);
  CHECK(auto_delta(0.4) == 0.1);
  CHECK(auto_smoothing_radius(0.025, 4.0) == 0.003125);
  CHECK(auto_smoothing_radius(0.025, 0.0) == std::numeric_limits<double>::infinity());
}

TEST_CASE("parameter choice") {
  PipelineConfig config;
  config.target_eps = 0.2;
  const MatrixField p = fixture_loring(1, TorusGrid::square(64));
  const auto chosen = choose_parameters(config, p);
  CHECK(chosen.delta == 0.05);
  CHECK(chosen.epsilon_smooth_unclamped == doctest::Approx(0.05 / (2 * chosen.L_p.value)));
  CHECK(chosen.clamped);
  CHECK(chosen.epsilon_smooth == 2.0 / 64);

  // A constant field asks for an unbounded radius; the upper clamp applies.
  const auto flat = choose_parameters(config, fixture_constant(TorusGrid::square(64), 2, 1));
  CHECK(flat.epsilon_smooth == kMaxAutoSmoothingRadius);
  CHECK(flat.clamped);

  config.delta = 0.3;
  config.epsilon_smooth = 0.07;
  const auto explicit_choice = choose_parameters(config, p);
  CHECK(explicit_choice.delta == 0.3);
  CHECK(explicit_choice.epsilon_smooth == 0.07);
  CHECK_FALSE(explicit_choice.clamped);
}

TEST_CASE("parameter errors") {
  PipelineConfig config;
  // Two grid steps on N = 4 exceed the upper clamp.
  CHECK_THROWS_AS(choose_parameters(config, step(4)), ValidationError);
  MatrixField almost = step(32);
  almost[3] *= 0.9;
  CHECK_THROWS_AS(choose_parameters(config, almost), ValidationError);

  PipelineConfig bad;
  bad.target_eps = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = PipelineConfig{};
  bad.delta = 0.5;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = PipelineConfig{};
  bad.epsilon_smooth = 0.5;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = PipelineConfig{};
  bad.max_retries = 0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("an exact smooth projection passes through unchanged") {
  const MatrixField p = fixture_constant(TorusGrid::square(32), 3, 2);
  PipelineConfig config;
  config.delta = 0.05;
  const auto result = smooth_project(p, config);
  CHECK(sup_distance(result.q, p) <= 1e-10);
  CHECK(result.report.L_q.value <= result.report.L_p.value * (1 + 1e-9) / (1 - 2 * 0.05));
  CHECK(result.report.certified());
  CHECK(result.report.retries_used == 0);
}

TEST_CASE("Loring k=1 at 128 squared, target 0.1") {
  PipelineConfig config;
  config.target_eps = 0.1;
  config.check_chern = true;
  const auto result = smooth_project(fixture_loring(1, TorusGrid::square(128)), config);
  const auto& r = result.report;
  CHECK(r.delta_used == 0.025);
  CHECK(r.eps_ok);
  CHECK(r.bound_ok);
  CHECK(r.twodelta_ok);
  CHECK(r.projection_ok);
  CHECK(r.idem_defect_q <= 1e-10);
  REQUIRE(r.chern_p);
  REQUIRE(r.chern_q);
  CHECK(r.chern_p->chern == -1);
  CHECK(r.chern_q->chern == r.chern_p->chern);
  CHECK(r.certified());
  // Reported flags follow from reported numbers.
  CHECK(r.sup_q_p <= r.sup_q_p1 + r.sup_p_p1 + 1e-15);
  CHECK(r.sup_p_p1 < r.delta_used);
  CHECK(r.bound == doctest::Approx(r.L_p1.value / (1 - 2 * r.delta_used)).epsilon(1e-15));
  CHECK(r.L_p1.value <= r.L_p.value * (1 + 1e-12));
  CHECK(r.spectrum_p1.certified());
  CHECK(r.spectrum_p1.max_distance_to_01 <= r.sup_p_p1 + 1e-14);
  // Homotopy stability on this pair.
  CHECK(r.sup_q_p < 0.5);
}

TEST_CASE("adversarial step approaches the sharp constant") {
  // Smoothing with three equal weights turns the jump into levels 1/3 and
  // 2/3, which sit inside the bands at delta = 0.34 and snap back to 0/1.
  const int n = 48;
  PipelineConfig config;
  config.target_eps = 1.0;
  config.delta = 0.34;
  config.epsilon_smooth = 2.0 / n;
  const auto result = smooth_project(step(n), config);
  const auto& r = result.report;
  CHECK(r.L_p1.value == doctest::Approx(n / 3.0).epsilon(1e-13));
  CHECK(r.L_q.value == doctest::Approx(static_cast<double>(n)).epsilon(1e-13));
  const double ratio = r.L_q.value / r.L_p1.value;
  CHECK(ratio == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(ratio <= 1.0 / (1 - 2 * 0.34));
  CHECK(ratio >= 0.95 / (1 - 2 * 0.34));
  CHECK(r.bound_ok);
  CHECK(r.sup_q_p == 0.0);
}

TEST_CASE("reports are deterministic") {
  PipelineConfig config;
  config.target_eps = 0.2;
  const MatrixField p = fixture_loring(2, TorusGrid::square(64));
  const std::string a = dump_json(smooth_project(p, config).report.to_json(false));
  const std::string b = dump_json(smooth_project(p, config).report.to_json(false));
  CHECK(a == b);
  CHECK(a.find("timestamp") == std::string::npos);
  CHECK(smooth_project(p, config).report.to_json(true).contains("timestamp"));
}

TEST_CASE("report layout") {
  PipelineConfig config;
  config.target_eps = 0.2;
  const auto j = smooth_project(fixture_loring(1, TorusGrid::square(64)), config).report.to_json(false);
  CHECK(j["format"] == "projsmooth-report v1");
  for (const char* key : {"delta_used", "epsilon_smooth_used", "L_p", "L_p1", "L_q", "sup_p_p1", "sup_q_p1",
                          "sup_q_p", "idem_defect_q", "bound_ok", "eps_ok", "twodelta_ok", "chern_p", "chern_q",
                          "retries_used", "stencil", "config"})
    CHECK_MESSAGE(j.contains(key), key);
  CHECK(j["config"]["kernel_plateau"] == 0.5);
  CHECK(j["chern_p"].is_null());
}

TEST_CASE("retries halve the radius and never increase the distance") {
  PipelineConfig config;
  config.target_eps = 0.2;
  config.delta = 0.05;
  config.epsilon_smooth = 0.2;
  const auto r = smooth_project(fixture_loring(1, TorusGrid::square(64)), config).report;
  REQUIRE(r.attempts.size() >= 2);
  CHECK(r.retries_used == static_cast<int>(r.attempts.size()) - 1);
  for (std::size_t a = 1; a < r.attempts.size(); ++a) {
    CHECK(r.attempts[a].epsilon_smooth == r.attempts[a - 1].epsilon_smooth / 2);
    CHECK(r.attempts[a].sup_p_p1 <= r.attempts[a - 1].sup_p_p1);
  }
  CHECK(r.attempts.back().gap_certified);
  CHECK(r.certified());
}

TEST_CASE("retries run out") {
  PipelineConfig config;
  config.delta = 0.1;
  config.epsilon_smooth = 0.2;
  config.max_retries = 1;
  CHECK_THROWS_AS(smooth_project(step(64), config), CertificationError);
  // With room to shrink the stencil all the way the gap is never reached either.
  config.max_retries = 20;
  CHECK_THROWS_AS(smooth_project(step(64), config), CertificationError);
}

TEST_CASE("Loring k=1 at 256 squared, target 0.2") {
  PipelineConfig config;
  config.target_eps = 0.2;
  const auto r = smooth_project(fixture_loring(1, TorusGrid::square(256)), config).report;
  CHECK(r.certified());
  CHECK(r.eps_ok);
}
