#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "foc/builtins.hpp"
#include "foc/linalg.hpp"
#include "foc/open_loop.hpp"

namespace foc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitConfig = 2;

inline const std::vector<std::string> kModes = {"fundamental", "simulate", "openloop", "feedback", "sweep"};

struct ProblemConfig {
  std::string builtin = "example1";  ///< example1..example4 | custom
  double alpha = 0.5;
  double t0 = 0.0;
  double theta = 1.0;
  double c1 = 1.0;  ///< examples 2 and 3
  double q = 0.0;   ///< example 4 running-cost weight
  Mat K;            ///< example 4 reduction, default [[1, 0]]
  Vec c;            ///< example 4 target, default (1, 0)
  std::size_t control_samples = 0;  ///< 0: builtin default
  Vec x0;                           ///< empty: origin
  std::optional<double> R_x;
  CustomSpec custom;
};

struct SolverConfig {
  std::size_t N = 512;
  std::size_t z_points = 801;
  std::vector<double> eta = {0.1, 0.05, 0.01};
  std::vector<double> diameters = {1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0};
  std::optional<double> kappa;  ///< empty: kappa = eta
  Interpolation interp = Interpolation::Cubic;
  double epsilon = 0.1;
  std::vector<std::size_t> N_list = {128, 256, 512};
  std::size_t random_controls = 10;
  std::size_t random_x0 = 0;
  std::size_t audit_every = 16;
  std::size_t nu_radial = 41;
  std::size_t nu_angular = 16;
  std::string strategy = "auto";  ///< auto | extremal_shift | closed_form | nu
  Vec u_bar;                       ///< empty: minimize chi(theta, .), then ||f(theta, .)||
};

struct ScenarioConfig {
  std::string mode;  ///< empty: taken from the command line
  ProblemConfig problem;
  SolverConfig solver;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
};

/// Parses a JSON document. Throws ConfigError with every field-level problem found.
ScenarioConfig parse_config(const std::string& text);

/// Canonical JSON of a config (defaults filled in, keys sorted).
std::string canonical_json(const ScenarioConfig& config);

/// 64-bit FNV-1a of text, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

/// Builds the original problem with N steps.
OriginalProblem build_problem(const ProblemConfig& problem, std::size_t N);

/// Initial state of the scenario (origin when unset).
Vec initial_state(const ProblemConfig& problem, const OriginalProblem& built);

/// Runs one mode, writes CSV traces and summary.json into out_dir, returns the exit status.
int run_scenario(const ScenarioConfig& config, const std::string& mode, const std::filesystem::path& out_dir);

}  // namespace foc
