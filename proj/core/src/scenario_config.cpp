#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include "foc/errors.hpp"
#include "foc/scenario.hpp"
#include "json.hpp"

namespace foc {

namespace {

using nlohmann::json;

class Reader {
 public:
  std::vector<std::string> errors;

  void fail(const std::string& path, const std::string& what) { errors.push_back(path + ": " + what); }

  bool object(const json& j, const std::string& path) {
    if (j.is_object()) return true;
    fail(path, "expected an object");
    return false;
  }

  void allow(const json& j, const std::string& path, const std::vector<std::string>& keys) {
    for (const auto& [k, v] : j.items()) {
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) fail(join(path, k), "unknown key");
    }
  }

  void number(const json& j, const std::string& path, const char* key, double& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_number()) return fail(join(path, key), "expected a number");
    out = v.get<double>();
    if (!std::isfinite(out)) fail(join(path, key), "must be finite");
  }

  void count(const json& j, const std::string& path, const char* key, std::size_t& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_number_unsigned()) return fail(join(path, key), "expected a non-negative integer");
    out = v.get<std::size_t>();
  }

  void text(const json& j, const std::string& path, const char* key, std::string& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_string()) return fail(join(path, key), "expected a string");
    out = v.get<std::string>();
  }

  bool numbers(const json& v, const std::string& path, std::vector<double>& out) {
    if (!v.is_array()) {
      fail(path, "expected an array of numbers");
      return false;
    }
    out.clear();
    for (const auto& e : v) {
      if (!e.is_number()) {
        fail(path, "expected an array of numbers");
        return false;
      }
      out.push_back(e.get<double>());
    }
    return true;
  }

  void vec(const json& j, const std::string& path, const char* key, Vec& out) {
    if (!j.contains(key)) return;
    std::vector<double> vals;
    if (!numbers(j.at(key), join(path, key), vals)) return;
    out = Eigen::Map<const Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
  }

  void mat(const json& j, const std::string& path, const char* key, Mat& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    const std::string p = join(path, key);
    if (!v.is_array() || v.empty()) return fail(p, "expected a non-empty array of rows");
    std::vector<std::vector<double>> rows;
    for (const auto& r : v) {
      std::vector<double> row;
      if (!numbers(r, p, row)) return;
      rows.push_back(std::move(row));
    }
    const std::size_t cols = rows.front().size();
    if (cols == 0) return fail(p, "rows must be non-empty");
    for (const auto& r : rows) {
      if (r.size() != cols) return fail(p, "rows must have equal length");
    }
    out.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t k = 0; k < cols; ++k) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    }
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }
};

json parse_strict(const std::string& text) {
  std::vector<std::set<std::string>> open;
  std::vector<std::string> duplicates;
  const json::parser_callback_t cb = [&](int, json::parse_event_t event, json& parsed) {
    switch (event) {
      case json::parse_event_t::object_start:
        open.emplace_back();
        break;
      case json::parse_event_t::object_end:
        if (!open.empty()) open.pop_back();
        break;
      case json::parse_event_t::key: {
        const std::string key = parsed.get<std::string>();
        if (!open.empty() && !open.back().insert(key).second) duplicates.push_back(key);
        break;
      }
      default:
        break;
    }
    return true;
  };
  json doc;
  try {
    doc = json::parse(text, cb);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("malformed document: ") + e.what()});
  }
  if (!duplicates.empty()) {
    std::vector<std::string> errors;
    for (const auto& k : duplicates) errors.push_back("duplicate key '" + k + "'");
    throw ConfigError(errors);
  }
  return doc;
}

void read_problem(Reader& r, const json& j, ProblemConfig& p) {
  const std::string path = "problem";
  if (!r.object(j, path)) return;
  r.text(j, path, "builtin", p.builtin);
  const bool custom = p.builtin == "custom";
  const std::vector<std::string> builtins = {"example1", "example2", "example3", "example4", "custom"};
  if (std::find(builtins.begin(), builtins.end(), p.builtin) == builtins.end()) {
    r.fail(path + ".builtin", "unknown builtin '" + p.builtin + "'");
    return;
  }
  std::vector<std::string> keys = {"builtin", "alpha", "t0", "theta", "x0", "R_x", "controls"};
  if (custom) {
    keys.insert(keys.end(), {"A", "B", "d", "sigma", "chi"});
  } else {
    keys.push_back("params");
  }
  r.allow(j, path, keys);

  r.number(j, path, "alpha", p.alpha);
  r.number(j, path, "t0", p.t0);
  r.number(j, path, "theta", p.theta);
  r.vec(j, path, "x0", p.x0);
  if (j.contains("R_x")) {
    double R = 0.0;
    r.number(j, path, "R_x", R);
    p.R_x = R;
  }

  if (j.contains("params")) {
    const json& q = j.at("params");
    const std::string pp = path + ".params";
    if (r.object(q, pp)) {
      if (p.builtin == "example2" || p.builtin == "example3") {
        r.allow(q, pp, {"c1"});
        r.number(q, pp, "c1", p.c1);
      } else if (p.builtin == "example4") {
        r.allow(q, pp, {"K", "c", "q"});
        r.mat(q, pp, "K", p.K);
        r.vec(q, pp, "c", p.c);
        r.number(q, pp, "q", p.q);
      } else {
        r.allow(q, pp, {});
      }
    }
  }

  if (j.contains("controls")) {
    const json& c = j.at("controls");
    const std::string cp = path + ".controls";
    if (r.object(c, cp)) {
      if (custom) {
        r.allow(c, cp, {"lower", "upper", "samples"});
        r.vec(c, cp, "lower", p.custom.lower);
        r.vec(c, cp, "upper", p.custom.upper);
        if (c.contains("samples")) {
          const json& s = c.at("samples");
          if (s.is_array() && std::all_of(s.begin(), s.end(), [](const json& e) { return e.is_number_unsigned(); })) {
            p.custom.samples = s.get<std::vector<std::size_t>>();
          } else {
            r.fail(cp + ".samples", "expected an array of non-negative integers");
          }
        }
      } else {
        r.allow(c, cp, {"samples"});
        r.count(c, cp, "samples", p.control_samples);
      }
    }
  } else if (custom) {
    r.fail(path + ".controls", "required for custom problems");
  }

  if (custom) {
    if (!j.contains("A")) r.fail(path + ".A", "required for custom problems");
    if (!j.contains("B")) r.fail(path + ".B", "required for custom problems");
    r.mat(j, path, "A", p.custom.A);
    r.mat(j, path, "B", p.custom.B);
    r.vec(j, path, "d", p.custom.d);
    if (j.contains("sigma")) {
      const json& s = j.at("sigma");
      const std::string sp = path + ".sigma";
      if (r.object(s, sp)) {
        r.allow(s, sp, {"type", "K", "c", "weight"});
        r.text(s, sp, "type", p.custom.sigma.type);
        r.mat(s, sp, "K", p.custom.sigma.K);
        r.vec(s, sp, "c", p.custom.sigma.c);
        r.number(s, sp, "weight", p.custom.sigma.weight);
        const std::vector<std::string> types = {"quadratic", "norm", "linear", "zero"};
        if (std::find(types.begin(), types.end(), p.custom.sigma.type) == types.end()) {
          r.fail(sp + ".type", "unknown sigma type '" + p.custom.sigma.type + "'");
        }
      }
    }
    if (j.contains("chi")) {
      const json& c = j.at("chi");
      const std::string cp = path + ".chi";
      if (r.object(c, cp)) {
        r.allow(c, cp, {"q"});
        r.number(c, cp, "q", p.custom.chi_q);
      }
    }
  }
}

void read_solver(Reader& r, const json& j, SolverConfig& s) {
  const std::string path = "solver";
  if (!r.object(j, path)) return;
  r.allow(j, path,
          {"N", "z_points", "eta", "diameters", "kappa", "interpolation", "epsilon", "N_list", "random_controls",
           "random_x0", "audit_every", "nu_radial", "nu_angular", "strategy", "u_bar"});
  r.count(j, path, "N", s.N);
  r.count(j, path, "z_points", s.z_points);
  if (j.contains("eta")) r.numbers(j.at("eta"), path + ".eta", s.eta);
  if (j.contains("diameters")) r.numbers(j.at("diameters"), path + ".diameters", s.diameters);
  if (j.contains("kappa")) {
    const json& k = j.at("kappa");
    if (k.is_string() && k.get<std::string>() == "eta") {
      s.kappa.reset();
    } else if (k.is_number()) {
      s.kappa = k.get<double>();
    } else {
      r.fail(path + ".kappa", "expected \"eta\" or a number");
    }
  }
  if (j.contains("interpolation")) {
    std::string name;
    r.text(j, path, "interpolation", name);
    if (name == "cubic") {
      s.interp = Interpolation::Cubic;
    } else if (name == "linear") {
      s.interp = Interpolation::Linear;
    } else {
      r.fail(path + ".interpolation", "expected \"cubic\" or \"linear\"");
    }
  }
  r.number(j, path, "epsilon", s.epsilon);
  if (j.contains("N_list")) {
    const json& v = j.at("N_list");
    if (v.is_array() && std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number_unsigned(); })) {
      s.N_list = v.get<std::vector<std::size_t>>();
    } else {
      r.fail(path + ".N_list", "expected an array of positive integers");
    }
  }
  r.count(j, path, "random_controls", s.random_controls);
  r.count(j, path, "random_x0", s.random_x0);
  r.count(j, path, "audit_every", s.audit_every);
  r.count(j, path, "nu_radial", s.nu_radial);
  r.count(j, path, "nu_angular", s.nu_angular);
  r.text(j, path, "strategy", s.strategy);
  r.vec(j, path, "u_bar", s.u_bar);
}

void validate(Reader& r, const ScenarioConfig& c) {
  const ProblemConfig& p = c.problem;
  const SolverConfig& s = c.solver;
  try {
    FracOrder alpha(p.alpha);
    (void)alpha;
  } catch (const DomainError& e) {
    r.fail("problem.alpha", e.what());
  }
  if (!(p.t0 < p.theta)) r.fail("problem.theta", "theta must exceed t0");
  if (p.R_x && !(*p.R_x > 0.0)) r.fail("problem.R_x", "must be positive");
  if (s.N < 4) r.fail("solver.N", "must be at least 4");
  if (s.z_points < 5) r.fail("solver.z_points", "must be at least 5");
  const double horizon = p.theta - p.t0;
  if (s.eta.empty()) r.fail("solver.eta", "must be non-empty");
  for (double e : s.eta) {
    if (!(e > 0.0 && e < horizon)) r.fail("solver.eta", "every eta must lie in (0, theta - t0)");
  }
  for (double d : s.diameters) {
    if (!(d > 0.0 && d <= horizon)) r.fail("solver.diameters", "every diameter must lie in (0, theta - t0]");
  }
  if (s.kappa && !(*s.kappa > 0.0 && *s.kappa < horizon)) r.fail("solver.kappa", "must lie in (0, theta - t0)");
  if (!(s.epsilon > 0.0)) r.fail("solver.epsilon", "must be positive");
  for (std::size_t n : s.N_list) {
    if (n < 4) r.fail("solver.N_list", "every entry must be at least 4");
  }
  if (s.nu_radial < 2) r.fail("solver.nu_radial", "must be at least 2");
  if (s.nu_angular < 3) r.fail("solver.nu_angular", "must be at least 3");
  const std::vector<std::string> strategies = {"auto", "extremal_shift", "closed_form", "nu"};
  if (std::find(strategies.begin(), strategies.end(), s.strategy) == strategies.end()) {
    r.fail("solver.strategy", "unknown strategy '" + s.strategy + "'");
  }
  if (s.strategy == "closed_form" && p.builtin != "example3") {
    r.fail("solver.strategy", "the closed-form strategy exists only for example3");
  }
  if (!c.mode.empty() && std::find(kModes.begin(), kModes.end(), c.mode) == kModes.end()) {
    r.fail("mode", "unknown mode '" + c.mode + "'");
  }
  if (r.errors.empty()) {
    try {
      const OriginalProblem built = build_problem(p, 8);
      (void)initial_state(p, built);
      if (s.u_bar.size() > 0 && (s.u_bar.size() != static_cast<Eigen::Index>(built.controls.dim()) ||
                                 !built.controls.contains(s.u_bar))) {
        r.fail("solver.u_bar", "must be a point of the control set");
      }
    } catch (const DomainError& e) {
      r.fail("problem", e.what());
    }
  }
}

json matrix_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(row);
  }
  return rows;
}

json vector_json(const Vec& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  const json doc = parse_strict(text);
  Reader r;
  ScenarioConfig c;
  if (!r.object(doc, "document")) throw ConfigError(r.errors);
  r.allow(doc, "", {"mode", "seed", "problem", "solver", "output"});
  r.text(doc, "", "mode", c.mode);
  if (doc.contains("seed")) {
    if (doc.at("seed").is_number_unsigned()) {
      c.seed = doc.at("seed").get<std::uint64_t>();
    } else {
      r.fail("seed", "expected a non-negative integer");
    }
  }
  if (doc.contains("problem")) {
    read_problem(r, doc.at("problem"), c.problem);
  } else {
    r.fail("problem", "required");
  }
  if (doc.contains("solver")) read_solver(r, doc.at("solver"), c.solver);
  if (doc.contains("output")) {
    const json& o = doc.at("output");
    if (r.object(o, "output")) {
      r.allow(o, "output", {"dir"});
      r.text(o, "output", "dir", c.out_dir);
    }
  }
  validate(r, c);
  if (!r.errors.empty()) throw ConfigError(r.errors);
  return c;
}

std::string canonical_json(const ScenarioConfig& c) {
  const ProblemConfig& p = c.problem;
  const SolverConfig& s = c.solver;
  json problem = {{"builtin", p.builtin}, {"alpha", p.alpha}, {"t0", p.t0}, {"theta", p.theta}};
  if (p.builtin == "example2" || p.builtin == "example3") problem["params"] = {{"c1", p.c1}};
  if (p.builtin == "example4") {
    json params = {{"q", p.q}};
    if (p.K.size() > 0) params["K"] = matrix_json(p.K);
    if (p.c.size() > 0) params["c"] = vector_json(p.c);
    problem["params"] = params;
  }
  if (p.builtin == "custom") {
    problem["A"] = matrix_json(p.custom.A);
    problem["B"] = matrix_json(p.custom.B);
    problem["d"] = vector_json(p.custom.d);
    json sigma = {{"type", p.custom.sigma.type}, {"weight", p.custom.sigma.weight}};
    if (p.custom.sigma.K.size() > 0) sigma["K"] = matrix_json(p.custom.sigma.K);
    if (p.custom.sigma.c.size() > 0) sigma["c"] = vector_json(p.custom.sigma.c);
    problem["sigma"] = sigma;
    problem["chi"] = {{"q", p.custom.chi_q}};
    problem["controls"] = {{"lower", vector_json(p.custom.lower)},
                           {"upper", vector_json(p.custom.upper)},
                           {"samples", p.custom.samples}};
  } else {
    problem["controls"] = {{"samples", p.control_samples}};
  }
  if (p.x0.size() > 0) problem["x0"] = vector_json(p.x0);
  if (p.R_x) problem["R_x"] = *p.R_x;

  json solver = {{"N", s.N},
                 {"z_points", s.z_points},
                 {"eta", s.eta},
                 {"diameters", s.diameters},
                 {"interpolation", s.interp == Interpolation::Cubic ? "cubic" : "linear"},
                 {"epsilon", s.epsilon},
                 {"N_list", s.N_list},
                 {"random_controls", s.random_controls},
                 {"random_x0", s.random_x0},
                 {"audit_every", s.audit_every},
                 {"nu_radial", s.nu_radial},
                 {"nu_angular", s.nu_angular},
                 {"strategy", s.strategy}};
  if (s.u_bar.size() > 0) solver["u_bar"] = vector_json(s.u_bar);
  if (s.kappa) {
    solver["kappa"] = *s.kappa;
  } else {
    solver["kappa"] = "eta";
  }
  json doc = {{"mode", c.mode}, {"seed", c.seed}, {"problem", problem}, {"solver", solver}};
  return doc.dump();
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

OriginalProblem build_problem(const ProblemConfig& p, std::size_t N) {
  const FracOrder alpha(p.alpha);
  OriginalProblem out;
  if (p.builtin == "example1") {
    out = p.control_samples ? example1_problem(alpha, p.t0, p.theta, N, p.control_samples)
                            : example1_problem(alpha, p.t0, p.theta, N);
  } else if (p.builtin == "example2") {
    out = p.control_samples ? example2_problem(alpha, p.t0, p.theta, N, p.c1, p.control_samples)
                            : example2_problem(alpha, p.t0, p.theta, N, p.c1);
  } else if (p.builtin == "example3") {
    out = p.control_samples ? example3_problem(alpha, p.t0, p.theta, N, p.c1, p.control_samples)
                            : example3_problem(alpha, p.t0, p.theta, N, p.c1);
  } else if (p.builtin == "example4") {
    Mat K = p.K;
    if (K.size() == 0) {
      K = Mat::Zero(1, 2);
      K(0, 0) = 1.0;
    }
    Vec c = p.c;
    if (c.size() == 0) {
      c = Vec::Zero(2);
      c(0) = 1.0;
    }
    out = p.control_samples ? example4_problem(alpha, p.t0, p.theta, N, K, c, p.q, p.control_samples)
                            : example4_problem(alpha, p.t0, p.theta, N, K, c, p.q);
  } else if (p.builtin == "custom") {
    out = custom_problem(alpha, p.t0, p.theta, N, p.custom);
  } else {
    throw DomainError("unknown builtin '" + p.builtin + "'");
  }
  if (p.R_x) out.R_x = *p.R_x;
  return out;
}

Vec initial_state(const ProblemConfig& p, const OriginalProblem& built) {
  const auto n = static_cast<Eigen::Index>(built.dim());
  if (p.x0.size() == 0) return Vec::Zero(n);
  if (p.x0.size() != n) throw DomainError("x0 has the wrong dimension");
  if (p.x0.norm() > built.R_x) throw DomainError("x0 lies outside B(R_x)");
  return p.x0;
}

}  // namespace foc
