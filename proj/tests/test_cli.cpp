#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "projsmooth/field_io.hpp"

using namespace projsmooth;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(PROJSMOOTH_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("projsmooth_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("fixture, lipschitz and chern") {
  TempDir dir;
  const std::string p = dir / "p.json";
  REQUIRE(run("fixture --name loring_k --k 2 --grid 32 --output " + p).code == 0);
  const MatrixField f = read_field(p);
  CHECK(f.grid() == TorusGrid::square(32));

  const auto chern = run("chern --input " + p);
  CHECK(chern.code == 0);
  CHECK(nlohmann::json::parse(chern.out)["chern"] == -2);

  const auto lip = run("lipschitz --input " + p);
  CHECK(lip.code == 0);
  const auto j = nlohmann::json::parse(lip.out);
  CHECK(j["value"].get<double>() == lipschitz_constant(f).value);
  CHECK(j["pair_count"] == 1024 * 1023 / 2);
  const auto frob = nlohmann::json::parse(run("lipschitz --frobenius --input " + p).out);
  CHECK(frob["value"].get<double>() >= j["value"].get<double>());

  const std::string r = dir / "r.json";
  CHECK(run("fixture --name random --dim 1 --grid 16 --m 3 --seed 4 --delta 0.1 --output " + r).code == 0);
  CHECK(read_field(r).matrix_dim() == 3);
  CHECK(run("chern --input " + r).code == 2);
}

TEST_CASE("smooth and contour") {
  TempDir dir;
  const std::string p = dir / "p.json", s = dir / "s.json";
  REQUIRE(run("fixture --name constant --k 1 --m 2 --grid 8 --output " + p).code == 0);
  CHECK(run("smooth --input " + p + " --epsilon-smooth 0.3 --output " + s).code == 0);
  CHECK(slurp(p) == slurp(s));
  CHECK(run("smooth --input " + p + " --epsilon-smooth 0.6 --output " + s).code == 2);

  const auto c = run("contour --input " + p + " --point 3 --delta 0.25 --s 10");
  CHECK(c.code == 0);
  const auto j = nlohmann::json::parse(c.out);
  CHECK(j["distance_to_eigen"].get<double>() <= 1e-6);
  CHECK(j["last_change"].get<double>() < 1e-8);
  CHECK(run("contour --input " + p + " --point 64 --delta 0.25 --s 10").code == 2);
}

TEST_CASE("pipeline") {
  TempDir dir;
  const std::string p = dir / "p.json";
  REQUIRE(run("fixture --name loring_k --k 1 --grid 64 --output " + p).code == 0);
  const std::string args = "pipeline --input " + p + " --target-eps 0.2 --check-chern --no-timestamp";
  REQUIRE(run(args + " --report " + (dir / "r1.json") + " --output " + (dir / "q1.json")).code == 0);
  REQUIRE(run(args + " --report " + (dir / "r2.json") + " --output " + (dir / "q2.json")).code == 0);
  CHECK(slurp(dir / "r1.json") == slurp(dir / "r2.json"));
  CHECK(slurp(dir / "q1.json") == slurp(dir / "q2.json"));
  const auto report = nlohmann::json::parse(slurp(dir / "r1.json"));
  CHECK(report["certified"] == true);
  CHECK(report["chern_q"]["chern"] == -1);
  CHECK_FALSE(report.contains("timestamp"));
  CHECK(is_projection(read_field(dir / "q1.json"), 1e-10).ok);

  REQUIRE(run("pipeline --input " + p + " --target-eps 0.2 --delta auto --epsilon-smooth 0.05 --report " +
              (dir / "r3.json") + " --output " + (dir / "q3.json"))
              .code == 0);
  CHECK(nlohmann::json::parse(slurp(dir / "r3.json")).contains("timestamp"));

  // Retries exhausted.
  CHECK(run("pipeline --input " + p + " --target-eps 0.2 --delta 0.01 --epsilon-smooth 0.3 --max-retries 1" +
            " --report " + (dir / "r4.json") + " --output " + (dir / "q4.json"))
            .code == 1);
}

TEST_CASE("usage and input errors") {
  TempDir dir;
  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("fixture --name loring_k").code == 2);
  CHECK(run("fixture --name bott --output " + (dir / "x.json")).code == 2);
  CHECK(run("chern --input " + (dir / "missing.json")).code == 2);
  {
    std::ofstream(dir / "junk.json") << "{ not json";
  }
  CHECK(run("lipschitz --input " + (dir / "junk.json")).code == 2);
  const std::string p = dir / "p.json";
  REQUIRE(run("fixture --name loring_k --k 1 --grid 32 --output " + p).code == 0);
  CHECK(run("pipeline --input " + p + " --target-eps 0.2 --delta sometimes --report " + (dir / "r.json") +
            " --output " + (dir / "q.json"))
            .code == 2);
  CHECK(run("pipeline --input " + p + " --target-eps 0.2 --delta 0.7 --report " + (dir / "r.json") +
            " --output " + (dir / "q.json"))
            .code == 2);
  CHECK(run("--help").code == 0);
}

TEST_CASE("verify subcommand") {
  TempDir dir;
  const auto v = run("verify --scope kernel --json " + (dir / "v.json"));
  CHECK(v.code == 0);
  CHECK(v.out.find("PASS kernel.") != std::string::npos);
  CHECK(v.out.find("FAIL") == std::string::npos);
  CHECK(nlohmann::json::parse(slurp(dir / "v.json"))["pass"] == true);
  CHECK(run("verify --scope nothing").code == 2);
}
