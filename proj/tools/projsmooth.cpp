// projsmooth: smoothing of Lipschitz projection fields on flat tori.
//
// Exit codes: 0 success, 1 certification failure, 2 I/O or validation error.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "projsmooth/bundles.hpp"
#include "projsmooth/calculus.hpp"
#include "projsmooth/field_io.hpp"
#include "projsmooth/grid_field.hpp"
#include "projsmooth/mollifier.hpp"
#include "projsmooth/pipeline.hpp"
#include "projsmooth/verify.hpp"

namespace {

using namespace projsmooth;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitCertification = 1;
constexpr int kExitValidation = 2;

std::optional<double> parse_auto(const std::string& text, const char* what) {
  if (text == "auto") return std::nullopt;
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw ValidationError(std::string("--") + what + " expects a number or 'auto', got '" + text + "'");
  }
}

json matrix_json(const Matrix& a) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < a.cols(); ++c) row.push_back({a(r, c).real(), a(r, c).imag()});
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Smooth Lipschitz projection-valued fields on flat tori into projection fields"};
  app.require_subcommand(1);

  // fixture
  auto* fixture = app.add_subcommand("fixture", "Write a fixture field in mfield-json format");
  std::string fixture_name = "loring_k";
  int fixture_k = 1, fixture_grid = 64, fixture_dim = 2, fixture_m = 2;
  std::uint64_t fixture_seed = 0;
  double fixture_delta = 0.2;
  std::string fixture_output;
  fixture->add_option("--name", fixture_name, "loring_k | random | constant")->required();
  fixture->add_option("--k", fixture_k, "winding (loring_k) or rank (constant)");
  fixture->add_option("--grid", fixture_grid, "points per dimension");
  fixture->add_option("--dim", fixture_dim, "torus dimension (1 or 2)");
  fixture->add_option("--m", fixture_m, "matrix dimension");
  fixture->add_option("--seed", fixture_seed, "seed for the random fixture");
  fixture->add_option("--delta", fixture_delta, "band half-width for the random fixture");
  fixture->add_option("--output", fixture_output, "output field file")->required();

  // smooth
  auto* smooth_cmd = app.add_subcommand("smooth", "Mollify a field");
  std::string smooth_input, smooth_output;
  double smooth_eps = 0.0, smooth_plateau = 0.5;
  smooth_cmd->add_option("--input", smooth_input)->required();
  smooth_cmd->add_option("--epsilon-smooth", smooth_eps, "smoothing radius in (0, 1/2)")->required();
  smooth_cmd->add_option("--kernel-plateau", smooth_plateau, "plateau radius of the kernel");
  smooth_cmd->add_option("--output", smooth_output)->required();

  // lipschitz
  auto* lip_cmd = app.add_subcommand("lipschitz", "Exact grid Lipschitz constant of a field");
  std::string lip_input;
  bool lip_frobenius = false;
  lip_cmd->add_option("--input", lip_input)->required();
  lip_cmd->add_flag("--frobenius", lip_frobenius, "diagnostic: Frobenius instead of operator norm");

  // chern
  auto* chern_cmd = app.add_subcommand("chern", "First Chern number of a projection field on T^2");
  std::string chern_input;
  chern_cmd->add_option("--input", chern_input)->required();

  // pipeline
  auto* pipe_cmd = app.add_subcommand("pipeline", "Smooth, gap-check, project and certify");
  std::string pipe_input, pipe_report, pipe_output, pipe_delta = "auto", pipe_eps_smooth = "auto";
  PipelineConfig config;
  bool no_timestamp = false;
  pipe_cmd->add_option("--input", pipe_input)->required();
  pipe_cmd->add_option("--target-eps", config.target_eps, "uniform distance target")->required();
  pipe_cmd->add_option("--delta", pipe_delta, "gap parameter in (0, 1/2) or 'auto'");
  pipe_cmd->add_option("--epsilon-smooth", pipe_eps_smooth, "smoothing radius or 'auto'");
  pipe_cmd->add_option("--kernel-plateau", config.kernel_plateau);
  pipe_cmd->add_option("--max-retries", config.max_retries);
  pipe_cmd->add_flag("--check-chern", config.check_chern);
  pipe_cmd->add_flag("--no-timestamp", no_timestamp, "omit the timestamp from the report");
  pipe_cmd->add_option("--report", pipe_report)->required();
  pipe_cmd->add_option("--output", pipe_output)->required();

  // contour
  auto* contour_cmd = app.add_subcommand("contour", "Contour-integral spectral projection of one matrix");
  std::string contour_input;
  std::size_t contour_point = 0;
  ContourSpec spec;
  contour_cmd->add_option("--input", contour_input)->required();
  contour_cmd->add_option("--point", contour_point, "grid index of the matrix to use");
  contour_cmd->add_option("--delta", spec.delta)->required();
  contour_cmd->add_option("--s", spec.s)->required();
  contour_cmd->add_option("--segments", spec.segments, "initial nodes per edge (>= 16)");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "Run the invariant suite");
  std::string verify_scope = "all", verify_json;
  verify_cmd->add_option("--scope", verify_scope, "kernel|smoothing|calculus|bounds|bundles|pipeline|all");
  verify_cmd->add_option("--json", verify_json, "write the suite report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*fixture) {
      FixtureSpec fs;
      fs.name = parse_fixture_name(fixture_name);
      fs.k = fixture_k;
      fs.grid = fixture_dim == 1 ? TorusGrid::circle(fixture_grid) : TorusGrid::square(fixture_grid);
      fs.m = fixture_m;
      fs.seed = fixture_seed;
      fs.delta = fixture_delta;
      write_field(make_fixture(fs), fixture_output);
      return kExitOk;
    }

    if (*smooth_cmd) {
      const MatrixField f = read_field(smooth_input);
      const MollifierKernel kernel(f.grid().dim(), smooth_plateau);
      write_field(smooth(f, discretize(kernel, f.grid(), smooth_eps)), smooth_output);
      return kExitOk;
    }

    if (*lip_cmd) {
      const MatrixField f = read_field(lip_input);
      const LipschitzEstimate e =
          lipschitz_constant(f, lip_frobenius ? NormKind::Frobenius : NormKind::Operator);
      std::cout << dump_json({{"value", e.value},
                              {"witness", {e.witness.first, e.witness.second}},
                              {"pair_count", e.pair_count}});
      return kExitOk;
    }

    if (*chern_cmd) {
      std::cout << dump_json(chern_number(read_field(chern_input)).to_json());
      return kExitOk;
    }

    if (*pipe_cmd) {
      config.delta = parse_auto(pipe_delta, "delta");
      config.epsilon_smooth = parse_auto(pipe_eps_smooth, "epsilon-smooth");
      const MatrixField p = read_field(pipe_input);
      const PipelineResult result = smooth_project(p, config);
      write_json(result.report.to_json(!no_timestamp), pipe_report);
      write_field(result.q, pipe_output);
      if (!result.report.certified()) {
        std::cerr << "certification failed; see " << pipe_report << "\n";
        return kExitCertification;
      }
      return kExitOk;
    }

    if (*contour_cmd) {
      const MatrixField f = read_field(contour_input);
      if (contour_point >= f.size()) throw ValidationError("--point is out of range");
      const Matrix& a = f[contour_point];
      const ContourResult c = contour_projection(a, spec);
      const Matrix diff = c.projection - upper_spectral_projection(a, spec.delta);
      std::cout << dump_json({{"projection", matrix_json(c.projection)},
                              {"segments", c.segments},
                              {"last_change", c.last_change},
                              {"distance_to_eigen", operator_norm(diff)}});
      return kExitOk;
    }

    if (*verify_cmd) {
      const SuiteReport report = verify_suite(parse_verify_scope(verify_scope));
      for (const auto& c : report.checks) {
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "  instances=" << c.instances
                  << " worst=" << c.worst << " threshold=" << c.threshold;
        if (!c.detail.empty()) std::cout << "  (" << c.detail << ")";
        std::cout << "\n";
      }
      if (!verify_json.empty()) write_json(report.to_json(), verify_json);
      return report.all_pass() ? kExitOk : kExitCertification;
    }
  } catch (const CertificationError& e) {
    std::cerr << "certification error: " << e.what() << "\n";
    return kExitCertification;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
