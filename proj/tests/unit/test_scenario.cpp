#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"
#include "foc/errors.hpp"
#include "foc/scenario.hpp"
#include "json.hpp"

using namespace foc;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> errors_of(const std::string& text) {
  try {
    (void)parse_config(text);
  } catch (const ConfigError& e) {
    return e.errors();
  }
  return {};
}

bool mentions(const std::vector<std::string>& errors, const std::string& needle) {
  return std::any_of(errors.begin(), errors.end(), [&](const std::string& e) { return e.find(needle) != std::string::npos; });
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct TempDir {
  fs::path path = fs::temp_directory_path() / fmt::format("foc_unit_{}", std::random_device{}());
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("defaults are filled in") {
  const auto cfg = parse_config(R"({"problem": {"builtin": "example1"}})");
  CHECK(cfg.mode.empty());
  CHECK(cfg.seed == 1);
  CHECK(cfg.solver.N == 512);
  CHECK(cfg.solver.z_points == 801);
  CHECK(cfg.solver.eta == std::vector<double>{0.1, 0.05, 0.01});
  CHECK(cfg.solver.diameters.size() == 3);
  CHECK(cfg.solver.interp == Interpolation::Cubic);
  CHECK(cfg.problem.alpha == 0.5);
  CHECK(cfg.problem.theta == 1.0);
}

TEST_CASE("field-level rejections") {
  const auto alpha = errors_of(R"({"problem": {"builtin": "example1", "alpha": 1.2}})");
  REQUIRE(alpha.size() == 1);
  CHECK(alpha[0] == "problem.alpha: alpha out of (0,1)");

  const auto dup = errors_of(R"({"problem": {"builtin": "example1"}, "seed": 1, "seed": 2})");
  REQUIRE(dup.size() == 1);
  CHECK(dup[0] == "duplicate key 'seed'");

  const auto unknown = errors_of(R"({"problem": {"builtin": "example1"}, "solver": {"Nsteps": 100}})");
  CHECK(mentions(unknown, "solver.Nsteps: unknown key"));

  const auto several = errors_of(R"({"mode": "nope", "solver": {"N": 2, "eta": [2.0]}})");
  CHECK(mentions(several, "mode"));
  CHECK(mentions(several, "solver.N"));
  CHECK(mentions(several, "solver.eta"));

  CHECK(mentions(errors_of("{not json"), "malformed document"));
  CHECK(mentions(errors_of(R"({"problem": {"builtin": "example9"}})"), "problem.builtin"));
  CHECK(mentions(errors_of(R"({"problem": {"builtin": "example1", "x0": [3.0, 0.0]}})"), "x0"));
  CHECK(mentions(errors_of(R"({"problem": {"builtin": "example3"}, "solver": {"u_bar": [0.3, 0.1]}})"), "u_bar"));
  CHECK(mentions(errors_of(R"({"problem": {"builtin": "example1", "params": {"c1": 1.0}}})"), "params"));
}

TEST_CASE("hash is FNV-1a over the canonical form") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");

  const auto a = parse_config(R"({"seed": 3, "problem": {"builtin": "example2", "params": {"c1": 0.5}}})");
  const auto b = parse_config(R"({"problem": {"params": {"c1": 0.5}, "builtin": "example2"}, "seed": 3})");
  const auto c = parse_config(R"({"seed": 4, "problem": {"builtin": "example2", "params": {"c1": 0.5}}})");
  CHECK(canonical_json(a) == canonical_json(b));
  CHECK(canonical_json(a) != canonical_json(c));
  CHECK(nlohmann::json::parse(canonical_json(a))["solver"]["N"] == 512);
}

TEST_CASE("built problems") {
  auto cfg = parse_config(R"({"problem": {"builtin": "example4", "params": {"q": 0.2}}})");
  const auto P = build_problem(cfg.problem, 16);
  CHECK(P.dim() == 2);
  REQUIRE(P.reduction.has_value());
  CHECK(P.reduction->K.rows() == 1);
  CHECK(initial_state(cfg.problem, P).norm() == 0.0);

  const auto custom = parse_config(R"({"problem": {"builtin": "custom", "A": [[-1.0]], "B": [[1.0]], "d": [0.0],
      "sigma": {"type": "quadratic", "K": [[1.0]], "c": [0.5]}, "chi": {"q": 0.5},
      "controls": {"lower": [-1.0], "upper": [1.0], "samples": [5]}}})");
  const auto Q = build_problem(custom.problem, 16);
  CHECK(Q.dim() == 1);
  CHECK(Q.controls.size() == 5);
  CHECK(Q.sigma(Vec::Constant(1, 1.5)) == doctest::Approx(1.0));
  CHECK(Q.chi(0.0, Vec::Constant(1, 2.0)) == doctest::Approx(2.0));
}

TEST_CASE("fundamental run writes CSV and summary") {
  TempDir tmp;
  const auto cfg = parse_config(R"({"mode": "fundamental", "problem": {"builtin": "example1"}, "solver": {"N": 16}})");
  REQUIRE(run_scenario(cfg, "fundamental", tmp.path) == kExitOk);

  const std::string csv = slurp(tmp.path / "fundamental.csv");
  CHECK(csv.find('\r') == std::string::npos);
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  CHECK(header.rfind("tau,", 0) == 0);
  std::string row;
  std::getline(lines, row);
  CHECK(row.rfind("0,", 0) == 0);
  CHECK(csv.back() == '\n');

  auto cfg_hashed = cfg;
  cfg_hashed.mode = "fundamental";
  const std::string hash = fnv1a_hex(canonical_json(cfg_hashed));
  CHECK(csv.find("# config_hash=" + hash + "\n") == csv.size() - hash.size() - 15);

  // Numbers round-trip exactly.
  std::istringstream cells(row);
  std::string cell;
  while (std::getline(cells, cell, ',')) CHECK(fmt::format("{:.17g}", std::stod(cell)) == cell);

  const auto summary = nlohmann::json::parse(slurp(tmp.path / "summary.json"));
  CHECK(summary["mode"] == "fundamental");
  CHECK(summary["status"] == "ok");
  CHECK(summary["config_hash"] == hash);
  CHECK(summary["files"][0] == "fundamental.csv");
  for (const auto& check : summary["checks"]) CHECK(check["ok"] == true);
}

TEST_CASE("exit codes") {
  TempDir tmp;
  const auto nu = parse_config(R"({"problem": {"builtin": "example3"}, "solver": {"N": 16, "strategy": "nu"}})");
  CHECK(run_scenario(nu, "feedback", tmp.path / "nu") == kExitConfig);

  const auto coarse = parse_config(R"({"problem": {"builtin": "example1"}, "solver": {"N": 8}})");
  CHECK(run_scenario(coarse, "openloop", tmp.path / "coarse") == kExitViolation);
  const auto summary = nlohmann::json::parse(slurp(tmp.path / "coarse" / "summary.json"));
  CHECK(summary["status"] == "violation");

  CHECK(run_scenario(coarse, "bogus", tmp.path / "bogus") == kExitConfig);
}

TEST_CASE("repeated runs are byte-identical") {
  TempDir tmp;
  const auto cfg = parse_config(slurp(fs::path(FOC_SCENARIO_DIR) / "example1_simulate.json"));
  REQUIRE(run_scenario(cfg, cfg.mode, tmp.path / "a") == kExitOk);
  REQUIRE(run_scenario(cfg, cfg.mode, tmp.path / "b") == kExitOk);
  for (const auto& e : fs::directory_iterator(tmp.path / "a")) {
    CHECK(slurp(e.path()) == slurp(tmp.path / "b" / e.path().filename()));
  }
}
