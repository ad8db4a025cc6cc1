#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "cli.hpp"
#include "doctest.h"
#include "nlok/error.hpp"
#include "json.hpp"

using namespace nlok;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

const std::string kData = NLOK_TEST_DATA_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::path(NLOK_WORK_DIR) / "cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int exit_status(const std::string& args) {
  const std::string cmd = std::string("\"") + NLOK_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("config text populates the parameters") {
  cli::RunConfig cfg;
  std::istringstream in("# comment\ns=0.5\nalpha = 0.5\n\neps=1e-3  # trailing\ncommand=energy\n");
  cli::parse_config(cfg, in);
  CHECK(cfg.params.s == 0.5);
  CHECK(cfg.params.alpha == 0.5);
  CHECK(cfg.params.eps == Approx(1e-3));
  CHECK(cfg.command == "energy");
}

TEST_CASE("config errors carry line and key") {
  cli::RunConfig cfg;
  std::istringstream bad("s=0.5\ns=1.5\n");
  try {
    cli::parse_config(cfg, bad);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 2);
    CHECK(e.key() == "s");
    CHECK(std::string(e.what()).find("(0,1)") != std::string::npos);
  }
  std::istringstream unknown("s=0.5\nfoo=1\n");
  try {
    cli::parse_config(cfg, unknown);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 2);
    CHECK(e.key() == "foo");
  }
  std::istringstream noeq("s 0.5\n");
  CHECK_THROWS_AS(cli::parse_config(cfg, noeq), ConfigError);
  std::istringstream notnum("eps=abc\n");
  CHECK_THROWS_AS(cli::parse_config(cfg, notnum), ConfigError);
  CHECK_THROWS_AS(cli::load_config("/nonexistent/run.cfg"), FileNotFound);
}

TEST_CASE("load_config reads a file and list-valued keys") {
  const auto cfg = cli::load_config(kData + "/sweep.cfg");
  CHECK(cfg.command == "onedim-sweep");
  CHECK(cfg.sweep_count == 7);
  cli::RunConfig c;
  cli::apply_setting(c, "identities", "Au2,Lal");
  CHECK(c.identities.size() == 2);
  cli::apply_setting(c, "points", "0.1 0.2; 0.3 0.4");
  REQUIRE(c.points.size() == 2);
  CHECK(c.points[1][0] == 0.3);
  cli::apply_setting(c, "radii", "1,2");
  CHECK(c.radii.size() == 2);
  CHECK_THROWS_AS(cli::apply_setting(c, "identities", "Au9"), ConfigError);
}

TEST_CASE("validation rejects unknown commands and missing inputs") {
  cli::RunConfig cfg;
  cfg.command = "fly";
  CHECK_THROWS_AS(cli::validate(cfg), ConfigError);
  cfg.command = "energy";
  CHECK_THROWS_AS(cli::validate(cfg), ConfigError);
  cfg.input = kData + "/missing.json";
  CHECK_THROWS_AS(cli::validate(cfg), FileNotFound);
}

TEST_CASE("run_command writes CSV and sidecar") {
  const auto dir = fresh_dir("lib_curvature");
  cli::RunConfig cfg;
  cfg.command = "curvature";
  cfg.input = kData + "/two_intervals.json";
  cfg.output_dir = dir.string();
  cfg.params.eps = 1e-3;
  std::ostringstream err;
  REQUIRE(cli::run_command(cfg, err) == 0);
  const auto csv = slurp(dir / "curvature.csv");
  CHECK(csv.rfind("node,x", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  const auto meta = nlohmann::json::parse(slurp(dir / "curvature.json"));
  CHECK(meta["status"] == 0);
  CHECK(meta["params"]["eps"].get<double>() == Approx(1e-3));
  CHECK(meta.contains("wall_time_s"));
}

TEST_CASE("exit codes of every command") {
  const std::string d = kData;
  struct Case {
    std::string args;
    int status;
  };
  const Case cases[] = {
      {"energy --input " + d + "/two_intervals.json --eps 1e-3", 0},
      {"curvature --input " + d + "/mode3_star.json --resolution 64", 0},
      {"potential --input " + d + "/unit_disk.json --set \"points=0 0;0.1 0.2\"", 0},
      {"diagnose --input " + d + "/unit_disk.json --eps 1e-3 --resolution 64", 0},
      {"onedim-root --s 0.5 --alpha 0.5 --eps 1e-3", 0},
      {"onedim-sweep -c " + d + "/sweep.cfg --set sweep_count=4", 0},
      {"optimize2d --eps 1e-3 --resolution 64 --modes 8 --tol 5e-3", 0},
      {"calibrate --n 2 --s 0.5 --resolution 64", 0},
      {"onedim-root --s 0.5 --alpha 0.5 --eps 5", 1},
      {"optimize2d --eps 1e-3 --resolution 64 --max-iter 1 --tol 1e-9", 1},
      {"energy --input " + d + "/two_intervals.json --s 1.5", 2},
      {"energy --input " + d + "/nope.json", 2},
      {"bogus", 2},
      {"energy --set nokey=1 --input " + d + "/two_intervals.json", 2},
      {"diagnose -c " + d + "/does_not_exist.cfg", 2},
  };
  int i = 0;
  for (const auto& c : cases) {
    const auto dir = fresh_dir("exit_" + std::to_string(i++));
    CAPTURE(c.args);
    CHECK(exit_status(c.args + " --out " + dir.string()) == c.status);
  }
}

TEST_CASE("sweep summary and ball diagnostics through the binary") {
  const auto dir = fresh_dir("sweep");
  REQUIRE(exit_status("-c " + kData + "/sweep.cfg --out " + dir.string()) == 0);
  const auto csv = slurp(dir / "onedim-sweep.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') >= 5);
  const auto meta = nlohmann::json::parse(slurp(dir / "onedim-sweep.json"));
  CHECK(meta["summary"]["slope"].get<double>() == Approx(1.0).epsilon(0.03));

  const auto ddir = fresh_dir("ball");
  REQUIRE(exit_status("diagnose --input " + kData + "/unit_disk.json --eps 1e-3 --out " + ddir.string()) == 0);
  const auto dj = nlohmann::json::parse(slurp(ddir / "diagnose.json"));
  CHECK(dj["summary"]["report"]["rho"].get<double>() == Approx(0.0).epsilon(1e-12));
}

TEST_CASE("repeated runs give byte-identical CSV") {
  const auto a = fresh_dir("det_a");
  const auto b = fresh_dir("det_b");
  const std::string args = "curvature --input " + kData + "/mode3_star.json --resolution 64 --eps 1e-3 --out ";
  REQUIRE(exit_status(args + a.string()) == 0);
  REQUIRE(exit_status(args + b.string()) == 0);
  CHECK(slurp(a / "curvature.csv") == slurp(b / "curvature.csv"));
}
