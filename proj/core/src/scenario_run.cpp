#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "foc/auxiliary_problem.hpp"
#include "foc/errors.hpp"
#include "foc/feedback.hpp"
#include "foc/informational_image.hpp"
#include "foc/open_loop.hpp"
#include "foc/scenario.hpp"
#include "output.hpp"

namespace foc {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;
using detail::CsvWriter;
using detail::extend;
using detail::numbered;

using FieldPtr = std::shared_ptr<const FundamentalMatrixField>;
using AuxPtr = std::shared_ptr<const AuxiliaryProblem>;

class Run {
 public:
  Run(const ScenarioConfig& cfg, std::string mode, fs::path dir)
      : cfg_(cfg), mode_(std::move(mode)), dir_(std::move(dir)) {
    ScenarioConfig hashed = cfg;
    hashed.mode = mode_;
    hash_ = fnv1a_hex(canonical_json(hashed));
    summary_["mode"] = mode_;
    summary_["builtin"] = cfg.problem.builtin;
    summary_["config_hash"] = hash_;
    summary_["seed"] = cfg.seed;
    summary_["status"] = "ok";
    results_ = ojson::object();
    checks_ = ojson::array();
    files_ = ojson::array();
  }

  const ScenarioConfig& cfg() const { return cfg_; }
  ojson& results() { return results_; }

  std::unique_ptr<CsvWriter> csv(const std::string& name, const std::vector<std::string>& header) {
    files_.push_back(name);
    return std::make_unique<CsvWriter>(dir_ / name, header, hash_);
  }

  void write_json_file(const std::string& name, const ojson& doc) {
    files_.push_back(name);
    detail::write_json(dir_ / name, doc);
  }

  /// Records value <= limit.
  void check(const std::string& name, double value, double limit) {
    const bool ok = std::isfinite(value) && value <= limit;
    checks_.push_back(ojson{{"name", name}, {"value", value}, {"limit", limit}, {"ok", ok}});
    if (!ok) violated_ = true;
  }

  void check_flag(const std::string& name, bool ok) {
    checks_.push_back(ojson{{"name", name}, {"value", ok}, {"ok", ok}});
    if (!ok) violated_ = true;
  }

  int finish(const std::string& error = {}) {
    if (!error.empty()) {
      summary_["status"] = "error";
      summary_["error"] = error;
    } else if (violated_) {
      summary_["status"] = "violation";
    }
    summary_["results"] = results_;
    summary_["checks"] = checks_;
    files_.push_back("summary.json");
    summary_["files"] = files_;
    detail::write_json(dir_ / "summary.json", summary_);
    return (!error.empty() || violated_) ? kExitViolation : kExitOk;
  }

 private:
  const ScenarioConfig& cfg_;
  std::string mode_;
  fs::path dir_;
  std::string hash_;
  ojson summary_;
  ojson results_;
  ojson checks_;
  ojson files_;
  bool violated_ = false;
};

struct Setup {
  OriginalProblem problem;
  FieldPtr F;
  Vec x0;
};

Setup setup(const ScenarioConfig& cfg, std::size_t N) {
  Setup s;
  s.problem = build_problem(cfg.problem, N);
  s.F = std::make_shared<const FundamentalMatrixField>(solve_fundamental(s.problem.A, s.problem.grid, s.problem.alpha));
  s.x0 = initial_state(cfg.problem, s.problem);
  return s;
}

Vec random_in_ball(std::mt19937_64& rng, std::size_t dim, double radius) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vec v(static_cast<Eigen::Index>(dim));
  double n2 = 0.0;
  do {
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
    n2 = v.squaredNorm();
  } while (n2 == 0.0);
  const double r = radius * std::pow(unit(rng), 1.0 / static_cast<double>(dim));
  return v * (r / std::sqrt(n2));
}

Vec random_control_value(std::mt19937_64& rng, const ControlSet& U) {
  if (U.is_box()) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vec v(U.lower().size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double s = unit(rng);
      v(i) = U.lower()(i) * (1.0 - s) + U.upper()(i) * s;
    }
    return v;
  }
  std::uniform_int_distribution<std::size_t> pick(0, U.size() - 1);
  return U[pick(rng)];
}

/// Piecewise-constant random control on 16 equal segments of [t0, theta], sampled per panel.
ControlSignal random_control(std::mt19937_64& rng, const OriginalProblem& P) {
  constexpr std::size_t segments = 16;
  std::vector<Vec> vals;
  for (std::size_t s = 0; s < segments; ++s) vals.push_back(random_control_value(rng, P.controls));
  const double t0 = P.grid.t0();
  const double D = P.grid.theta() - t0;
  return ControlSignal::sample(P.grid, 0, P.grid.steps(), [&](double t) {
    const auto s = static_cast<std::size_t>(std::floor((t - t0) / D * static_cast<double>(segments)));
    return vals[std::min(s, segments - 1)];
  });
}

/// Fallback after theta_eta: the configured u_bar, else the control sample minimizing chi at theta,
/// then ||f(theta, u)||.
Vec fallback_control(const ScenarioConfig& cfg, const OriginalProblem& P) {
  if (cfg.solver.u_bar.size() > 0) return cfg.solver.u_bar;
  const ControlSet& U = P.controls;
  const double t = P.grid.theta();
  std::size_t best = 0;
  double best_chi = std::numeric_limits<double>::infinity();
  double best_f = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < U.size(); ++c) {
    const double chi = P.chi(t, U[c]);
    const double f = P.f(t, U[c]).norm();
    if (chi < best_chi || (chi == best_chi && f < best_f)) {
      best_chi = chi;
      best_f = f;
      best = c;
    }
  }
  return U[best];
}

ZGrid zgrid_for(const OriginalProblem& P, const FundamentalMatrixField& F, std::size_t m) {
  return ZGrid::around(reachable_radius(budget_constants(P, F)), m);
}

SigmaModulus modulus_for(const OriginalProblem& P, std::size_t aux_dim, std::uint64_t seed) {
  if (P.sigma_lipschitz) return SigmaModulus::with_lipschitz(*P.sigma_lipschitz);
  if (P.reduction) return SigmaModulus::sampled(P.reduction->mu, aux_dim, seed);
  return SigmaModulus::sampled(P.sigma, aux_dim, seed);
}

ojson budget_json(const EpsilonBudget& b) {
  return ojson{{"epsilon", b.epsilon}, {"eta_star", b.eta_star}, {"eps_star", b.eps_star}, {"zeta", b.zeta},
               {"M_z", b.M_z},         {"M_chi", b.M_chi},       {"eta1", b.eta1},         {"eta2", b.eta2}};
}

std::string resolve_strategy(const ScenarioConfig& cfg, std::size_t aux_dim) {
  const std::string& s = cfg.solver.strategy;
  if (s != "auto") return s;
  if (cfg.problem.builtin == "example4") return "nu";
  if (aux_dim == 1) return "extremal_shift";
  return "nu";
}

bool sigma_is_norm(const ScenarioConfig& cfg) {
  return cfg.problem.builtin == "example4" ||
         (cfg.problem.builtin == "custom" && cfg.problem.custom.sigma.type == "norm");
}

/// Auxiliary strategy on [t0, terminal] plus the value rho at (t, z) for the same problem.
struct StrategyBundle {
  AuxStrategy strategy;
  std::function<double(double, const Vec&)> value;
};

StrategyBundle make_strategy(const ScenarioConfig& cfg, const std::string& kind, const AuxPtr& aux) {
  if (kind == "nu") {
    if (!sigma_is_norm(cfg)) throw ConfigError({"solver.strategy: the nu strategy needs a norm terminal cost"});
    auto nu = std::make_shared<const NuTable>(*aux, cfg.solver.nu_radial, cfg.solver.nu_angular);
    AuxStrategy s{"nu", [nu, aux](double t, const Vec& z, double kappa) { return example4_strategy(t, z, kappa, *nu, *aux); }};
    return {s, [nu](double t, const Vec& z) { return nu->value(t, z); }};
  }
  if (aux->dim() != 1) {
    throw ConfigError({"solver.strategy: value tables need a scalar auxiliary state; use a norm cost with the nu strategy"});
  }
  const ZGrid zg = zgrid_for(aux->original(), aux->field(), cfg.solver.z_points);
  ValueIterationOptions vo;
  vo.interp = cfg.solver.interp;
  auto table = std::make_shared<const ValueTable>(value_iteration_1d(*aux, zg, vo));
  auto value = [table](double t, const Vec& z) { return table->value(t, z(0)); };
  if (kind == "closed_form") {
    const double eta = aux->eta();
    const FracOrder alpha(aux->alpha());
    const double t0 = aux->t0();
    const double theta = aux->theta();
    AuxStrategy s{"closed_form", [eta, alpha, t0, theta](double t, const Vec& z, double) {
                    return example3_strategy(t, z(0), eta, alpha, t0, theta);
                  }};
    return {s, value};
  }
  return {extremal_shift_strategy(table, aux), value};
}

/// rho-hat on the un-shifted horizon.
std::function<double(double, const Vec&)> full_value(const ScenarioConfig& cfg, const OriginalProblem& P,
                                                     const FieldPtr& F) {
  auto aux = std::make_shared<const AuxiliaryProblem>(P, F, P.grid.theta(), true);
  if (aux->dim() == 1) {
    ValueIterationOptions vo;
    vo.interp = cfg.solver.interp;
    auto table = std::make_shared<const ValueTable>(value_iteration_1d(*aux, zgrid_for(P, *F, cfg.solver.z_points), vo));
    return [table](double t, const Vec& z) { return table->value(t, z(0)); };
  }
  if (!sigma_is_norm(cfg)) throw ConfigError({"problem: multi-dimensional auxiliary states need a norm terminal cost"});
  auto nu = std::make_shared<const NuTable>(*aux, cfg.solver.nu_radial, cfg.solver.nu_angular);
  return [nu](double t, const Vec& z) { return nu->value(t, z); };
}

double kappa_for(const ScenarioConfig& cfg, double eta) { return cfg.solver.kappa ? *cfg.solver.kappa : eta; }

/// p_eta synthesized on the grid by running the auxiliary strategy with one panel per grid step.
ControlSignal synthesize(const AuxiliaryProblem& aux, const AuxStrategy& s, double kappa, const Vec& z0) {
  const TimeGrid& g = aux.grid();
  const Partition part = Partition::on_grid(g, 1).restrict_to(aux.terminal());
  const AuxLoopResult r = run_aux_control_law(aux, s, kappa, part, z0);
  return ControlSignal(g, 0, r.u);
}

// ---------------------------------------------------------------------------------------------

void mode_fundamental(Run& run) {
  const ScenarioConfig& cfg = run.cfg();
  const Setup s = setup(cfg, cfg.solver.N);
  const OriginalProblem& P = s.problem;
  const TimeGrid& g = P.grid;
  const std::size_t n = P.dim();
  const std::size_t N = g.steps();

  std::vector<std::string> header = {"tau"};
  for (const auto& name : numbered("F", n * n)) header.push_back(name);
  for (const auto& name : numbered("ref", n * n)) header.push_back(name);
  header.push_back("abs_error");
  auto out = run.csv("fundamental.csv", header);

  const Mat A = P.A(g.t0());
  double terminal_err = 0.0;
  for (std::size_t j = 0; j <= N; ++j) {
    const Mat Fv = s.F->at(N, j);
    const Mat ref = mittag_leffler_matrix(A, P.alpha, g.theta() - g.node(j));
    const double err = (Fv - ref).cwiseAbs().maxCoeff();
    terminal_err = std::max(terminal_err, err);
    std::vector<double> row = {g.node(j)};
    for (std::size_t i = 0; i < n * n; ++i) row.push_back(Fv(static_cast<Eigen::Index>(i / n), static_cast<Eigen::Index>(i % n)));
    for (std::size_t i = 0; i < n * n; ++i) row.push_back(ref(static_cast<Eigen::Index>(i / n), static_cast<Eigen::Index>(i % n)));
    row.push_back(err);
    out->row(row);
  }
  out.reset();

  double table_err = 0.0;
  for (std::size_t i = 0; i <= N; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const Mat ref = mittag_leffler_matrix(A, P.alpha, g.node(i) - g.node(j));
      table_err = std::max(table_err, (s.F->at(i, j) - ref).cwiseAbs().maxCoeff());
    }
  }
  const double residual = volterra_residual(*s.F, P.A);
  const FieldConstants fc = constants(*s.F, P.A.bound(), P.f_bound(), P.R_x);

  ojson& r = run.results();
  r["N"] = N;
  r["alpha"] = P.alpha.value();
  r["max_error_terminal_row"] = terminal_err;
  r["max_error_table"] = table_err;
  r["volterra_residual"] = residual;
  r["M_F"] = fc.M_F;
  r["R_z"] = fc.R_z;
  run.check("closed_form_error", table_err, 1e-4);
  run.check("volterra_residual", residual, 1e-10);
}

void mode_simulate(Run& run) {
  const ScenarioConfig& cfg = run.cfg();
  const Setup s = setup(cfg, cfg.solver.N);
  const OriginalProblem& P = s.problem;
  const TimeGrid& g = P.grid;
  const std::size_t N = g.steps();
  const std::size_t n = P.dim();
  const AuxiliaryProblem full(P, s.F, g.theta(), false);
  const AuxiliaryProblem reduced(P, s.F, g.theta(), true);
  const Position start = Position::initial(g, s.x0);
  const Vec image0 = info_image_ode(start, P).z;

  std::mt19937_64 rng(cfg.seed);
  auto table = run.csv("simulate.csv", {"control", "J_repr", "J_direct", "J_aux", "route_discrepancy", "image_discrepancy"});
  double worst_identity = 0.0;
  double worst_image = 0.0;
  double worst_route = 0.0;
  ojson per = ojson::array();
  for (std::size_t r = 0; r < cfg.solver.random_controls; ++r) {
    const ControlSignal u = random_control(rng, P);
    const SampledFunction xd = solve_motion_direct(P, start, g.theta(), u);
    const SampledFunction xr = solve_motion_repr(P, start, g.theta(), u, *s.F);
    const Trajectory z = solve_aux_motion(full, u, g.t0(), g.theta(), image0);
    const Trajectory zr = solve_aux_motion(reduced, u, g.t0(), g.theta(), reduced.reduce_image(image0));
    const double J_repr = cost_J(P, xr, u);
    const double J_direct = cost_J(P, xd, u);
    const double J_aux = cost_J_aux(reduced, zr, u);

    double route = 0.0;
    double image = 0.0;
    std::vector<Vec> images;
    for (std::size_t k = 0; k <= N; ++k) {
      route = std::max(route, (xd.at(k) - xr.at(k)).norm());
      const Vec I = info_image_ode(Position(xd.prefix(k)), P).z;
      image = std::max(image, (I - z.z[k]).norm());
      if (r == 0) images.push_back(I);
    }
    worst_identity = std::max(worst_identity, std::abs(J_repr - J_aux) / (1.0 + std::abs(J_repr)));
    worst_image = std::max(worst_image, image);
    worst_route = std::max(worst_route, route);
    table->row({static_cast<double>(r), J_repr, J_direct, J_aux, route, image});
    per.push_back(ojson{{"J_repr", J_repr}, {"J_direct", J_direct}, {"J_aux", J_aux}});

    if (r == 0) {
      std::vector<std::string> header = {"tau"};
      for (const auto& v : {numbered("u", P.controls.dim()), numbered("x_direct", n), numbered("x_repr", n),
                            numbered("image", n), numbered("z", n)}) {
        header.insert(header.end(), v.begin(), v.end());
      }
      auto trace = run.csv("trajectory.csv", header);
      for (std::size_t k = 0; k <= N; ++k) {
        std::vector<double> row = {g.node(k)};
        extend(row, u.at(g.node(k)));
        extend(row, xd.at(k));
        extend(row, xr.at(k));
        extend(row, images[k]);
        extend(row, z.z[k]);
        trace->row(row);
      }
    }
  }
  table.reset();

  ojson& res = run.results();
  res["N"] = N;
  res["controls"] = cfg.solver.random_controls;
  res["costs"] = per;
  res["max_cost_identity_gap"] = worst_identity;
  res["max_image_discrepancy"] = worst_image;
  res["max_route_discrepancy"] = worst_route;
  run.check("cost_identity", worst_identity, 5e-3);
  run.check("image_discrepancy", worst_image, 5e-2);
}

void openloop_example1(Run& run, const Setup& s) {
  const OriginalProblem& P = s.problem;
  const TimeGrid& g = P.grid;
  const AuxiliaryProblem aux(P, s.F, g.theta(), true);
  const Position start = Position::initial(g, s.x0);
  const ControlSignal u = ControlSignal::sample(g, 0, g.steps(), [&](double t) {
    return Vec::Constant(1, example1_control(t, P.alpha, g.theta()));
  });
  const SampledFunction xr = solve_motion_repr(P, start, g.theta(), u, *s.F);
  const SampledFunction xd = solve_motion_direct(P, start, g.theta(), u);
  const Trajectory z = solve_aux_motion(aux, u, g.t0(), g.theta(), aux.reduce_image(info_image_ode(start, P).z));
  const double J_repr = cost_J(P, xr, u);
  const double J_direct = cost_J(P, xd, u);
  const double J_aux = cost_J_aux(aux, z, u);
  const double value = example1_value(P.alpha, g.t0(), g.theta(), 4096);

  auto out = run.csv("openloop.csv", {"tau", "p", "z", "x_1", "x_2"});
  for (std::size_t k = 0; k <= g.steps(); ++k) {
    out->row({g.node(k), u.at(g.node(k))(0), z.z[k](0), xr.at(k)(0), xr.at(k)(1)});
  }
  out.reset();

  ojson& r = run.results();
  r["rho_star"] = value;
  r["J_aux"] = J_aux;
  r["J_repr"] = J_repr;
  r["J_direct"] = J_direct;
  if (P.alpha.value() == 0.5 && g.t0() == 0.0 && g.theta() == 1.0) {
    const double pi = 3.14159265358979323846;
    const double regression = -(std::sqrt(1.0 + 1.0 / pi) + std::asinh(std::sqrt(pi)) / pi);
    r["regression_constant"] = regression;
    r["regression_gap"] = std::abs(value - regression);
    run.check("regression_constant", std::abs(value - regression), 1e-12);
  }
  run.check("aux_vs_oracle", std::abs(J_aux - value), 2e-3);
  run.check("original_vs_oracle", std::abs(J_repr - value), 2e-3);
}

void openloop_example2(Run& run, const Setup& s) {
  const ScenarioConfig& cfg = run.cfg();
  const OriginalProblem& P = s.problem;
  const TimeGrid& g = P.grid;
  const Position start = Position::initial(g, s.x0);
  const Vec image0 = info_image_ode(start, P).z;
  const Vec u_bar = fallback_control(cfg, P);
  const auto rho_hat_fn = full_value(cfg, P, s.F);
  const AuxiliaryProblem probe(P, s.F, g.theta(), true);
  const Vec z0 = probe.reduce_image(image0);
  const double rho_hat = rho_hat_fn(g.t0(), z0);

  const BudgetConstants bc = budget_constants(P, *s.F);
  const EpsilonBudget budget = epsilon_budget(cfg.solver.epsilon, bc, modulus_for(P, 1, cfg.seed));

  std::vector<double> etas = cfg.solver.eta;
  etas.push_back(budget.eta_star);
  auto out = run.csv("openloop.csv", {"eta", "lambda", "residual", "J_eta", "rho_eta", "J_spliced"});
  ojson rows = ojson::array();
  double worst_residual = 0.0;
  double worst_gap = 0.0;
  double J_star = 0.0;
  double rho_eta_star = 0.0;
  for (std::size_t i = 0; i < etas.size(); ++i) {
    const double eta = etas[i];
    const AuxiliaryProblem aux = AuxiliaryProblem::shifted(P, s.F, eta, true);
    const double lambda = example2_lambda(-z0(0), eta, P.alpha, g.t0(), g.theta());
    const double residual = std::abs(example2_lhs(lambda, eta, P.alpha, g.t0(), g.theta()) + z0(0));
    const ControlSignal p = ControlSignal::sample(g, 0, g.steps(), [&](double t) {
      return Vec::Constant(1, example2_control(t, lambda, P.alpha, g.theta()));
    });
    const Trajectory z = solve_aux_motion(aux, p, g.t0(), aux.terminal(), z0);
    const double J_eta = cost_J_aux(aux, z, p);
    ValueIterationOptions vo;
    vo.interp = cfg.solver.interp;
    const double rho_eta = value_iteration_1d(aux, zgrid_for(P, *s.F, cfg.solver.z_points), vo).value(g.t0(), z0(0));
    const ControlSignal spliced = splice_control(p, aux.terminal(), u_bar);
    const double J_spliced = cost_J(P, solve_motion_repr(P, start, g.theta(), spliced, *s.F), spliced);
    out->row({eta, lambda, residual, J_eta, rho_eta, J_spliced});
    rows.push_back(ojson{{"eta", eta},
                         {"lambda", lambda},
                         {"residual", residual},
                         {"J_eta", J_eta},
                         {"rho_eta", rho_eta},
                         {"J_spliced", J_spliced}});
    worst_residual = std::max(worst_residual, residual);
    if (i + 1 < etas.size()) {
      worst_gap = std::max(worst_gap, std::abs(J_eta - rho_eta));
    } else {
      J_star = J_spliced;
      rho_eta_star = rho_eta;
    }
  }
  out.reset();

  ojson& r = run.results();
  r["rho_hat"] = rho_hat;
  r["z0"] = z0(0);
  r["budget"] = budget_json(budget);
  r["per_eta"] = rows;
  r["J_budget"] = J_star;
  run.check("lambda_residual", worst_residual, 1e-10);
  run.check("pmp_vs_value_iteration", worst_gap, 5e-3);
  run.check("budget_cost", J_star - rho_hat, cfg.solver.epsilon + 1e-2);
  run.check("budget_value_gap", std::abs(rho_hat - rho_eta_star), cfg.solver.epsilon + 1e-2);
}

void openloop_generic(Run& run, const Setup& s) {
  const ScenarioConfig& cfg = run.cfg();
  const OriginalProblem& P = s.problem;
  const TimeGrid& g = P.grid;
  const Position start = Position::initial(g, s.x0);
  const Vec image0 = info_image_ode(start, P).z;
  const Vec u_bar = fallback_control(cfg, P);
  const auto rho_hat_fn = full_value(cfg, P, s.F);
  const AuxiliaryProblem probe(P, s.F, g.theta(), true);
  const Vec z0 = probe.reduce_image(image0);
  const double rho_hat = rho_hat_fn(g.t0(), z0);

  auto out = run.csv("openloop.csv", {"eta", "rho_eta", "J_eta", "J_spliced"});
  ojson rows = ojson::array();
  double worst = 0.0;
  for (double eta : cfg.solver.eta) {
    auto aux = std::make_shared<const AuxiliaryProblem>(AuxiliaryProblem::shifted(P, s.F, eta, true));
    const std::string kind = resolve_strategy(cfg, aux->dim());
    const StrategyBundle b = make_strategy(cfg, kind, aux);
    const double rho_eta = b.value(g.t0(), z0);
    const ControlSignal p = synthesize(*aux, b.strategy, kappa_for(cfg, eta), z0);
    const Trajectory z = solve_aux_motion(*aux, p, g.t0(), aux->terminal(), z0);
    const double J_eta = cost_J_aux(*aux, z, p);
    const ControlSignal spliced = splice_control(p, aux->terminal(), u_bar);
    const double J_spliced = cost_J(P, solve_motion_repr(P, start, g.theta(), spliced, *s.F), spliced);
    out->row({eta, rho_eta, J_eta, J_spliced});
    rows.push_back(ojson{{"eta", eta}, {"strategy", kind}, {"rho_eta", rho_eta}, {"J_eta", J_eta}, {"J_spliced", J_spliced}});
    worst = std::max(worst, J_spliced - rho_hat);
  }
  out.reset();

  ojson& r = run.results();
  r["rho_hat"] = rho_hat;
  r["z0"] = detail::to_json_array(z0);
  r["per_eta"] = rows;
  run.check("spliced_cost_excess", worst, cfg.solver.epsilon);
}

void mode_openloop(Run& run) {
  const ScenarioConfig& cfg = run.cfg();
  const Setup s = setup(cfg, cfg.solver.N);
  if (cfg.problem.builtin == "example1") {
    openloop_example1(run, s);
  } else if (cfg.problem.builtin == "example2") {
    openloop_example2(run, s);
  } else {
    openloop_generic(run, s);
  }
}

void mode_feedback(Run& run) {
  const ScenarioConfig& cfg = run.cfg();
  const Setup s = setup(cfg, cfg.solver.N);
  const OriginalProblem& P = s.problem;
  const TimeGrid& g = P.grid;
  const std::size_t n = P.dim();
  const Vec u_bar = fallback_control(cfg, P);
  const auto rho_hat_fn = full_value(cfg, P, s.F);
  const AuxiliaryProblem probe(P, s.F, g.theta(), true);

  std::vector<Vec> starts = {s.x0};
  std::mt19937_64 rng(cfg.seed);
  for (std::size_t i = 0; i < cfg.solver.random_x0; ++i) starts.push_back(random_in_ball(rng, n, P.R_x));
  std::vector<Vec> z0s;
  std::vector<double> rho_hat;
  for (const Vec& x0 : starts) {
    z0s.push_back(probe.reduce_image(info_image_ode(Position::initial(g, x0), P).z));
    rho_hat.push_back(rho_hat_fn(g.t0(), z0s.back()));
  }

  auto table = run.csv("feedback.csv", {"eta", "diameter", "x0_index", "J", "rho_eta", "rho_hat", "gap",
                                        "audit_discrepancy", "loops_equal"});
  ojson rows = ojson::array();
  double worst_audit = 0.0;
  double worst_excess = -std::numeric_limits<double>::infinity();
  bool all_equal = true;
  bool all_members = true;
  for (std::size_t e = 0; e < cfg.solver.eta.size(); ++e) {
    const double eta = cfg.solver.eta[e];
    const double kappa = kappa_for(cfg, eta);
    auto aux = std::make_shared<const AuxiliaryProblem>(AuxiliaryProblem::shifted(P, s.F, eta, true));
    const std::string kind = resolve_strategy(cfg, aux->dim());
    const StrategyBundle b = make_strategy(cfg, kind, aux);
    const OriginalStrategy U = lift_strategy(b.strategy, eta, kappa, u_bar, aux);
    for (std::size_t d = 0; d < cfg.solver.diameters.size(); ++d) {
      const Partition part = Partition::with_diameter(g, cfg.solver.diameters[d]);
      const Partition aux_part = part.restrict_to(aux->terminal());
      for (std::size_t k = 0; k < starts.size(); ++k) {
        ClosedLoopOptions opt;
        opt.audit_every = cfg.solver.audit_every;
        const ClosedLoopResult res = run_control_law(P, U, part, starts[k], opt);
        const AuxLoopResult ax = run_aux_control_law(*aux, b.strategy, kappa, aux_part, z0s[k]);
        bool equal = ax.u.size() <= res.records.size();
        for (std::size_t j = 0; equal && j < ax.u.size(); ++j) equal = ax.u[j] == res.records[j].u;
        for (const Vec& v : res.u.values()) {
          if (!P.controls.contains(v)) all_members = false;
        }
        all_equal = all_equal && equal;
        const double rho_eta = b.value(g.t0(), z0s[k]);
        const double gap = res.J - rho_hat[k];
        worst_audit = std::max(worst_audit, res.audit_discrepancy);
        worst_excess = std::max(worst_excess, gap);
        table->row({eta, part.diameter(), static_cast<double>(k), res.J, rho_eta, rho_hat[k], gap,
                    res.audit_discrepancy, equal ? 1.0 : 0.0});
        rows.push_back(ojson{{"eta", eta},
                             {"diameter", part.diameter()},
                             {"x0_index", k},
                             {"strategy", kind},
                             {"J", res.J},
                             {"rho_eta", rho_eta},
                             {"rho_hat", rho_hat[k]},
                             {"gap", gap},
                             {"audit_discrepancy", res.audit_discrepancy},
                             {"loops_equal", equal}});
        if (k != 0) continue;
        std::vector<std::string> header = {"panel", "tau"};
        for (const auto& v : {numbered("u", P.controls.dim()), numbered("x", n), numbered("image", aux->dim())}) {
          header.insert(header.end(), v.begin(), v.end());
        }
        header.push_back("running_cost");
        auto trace = run.csv(fmt::format("feedback_eta{}_d{}.csv", e, d), header);
        for (const PanelRecord& rec : res.records) {
          std::vector<double> row = {static_cast<double>(rec.panel), rec.tau};
          extend(row, rec.u);
          extend(row, rec.x);
          extend(row, rec.image);
          row.push_back(rec.running_cost);
          trace->row(row);
        }
      }
    }
  }
  table.reset();

  ojson& r = run.results();
  r["runs"] = rows;
  r["max_audit_discrepancy"] = worst_audit;
  r["max_gap"] = worst_excess;
  run.check_flag("loops_equal", all_equal);
  run.check_flag("controls_in_set", all_members);
  run.check("audit_discrepancy", worst_audit, 5e-2);
}

void mode_sweep(Run& run) {
  const ScenarioConfig& cfg = run.cfg();
  auto table = run.csv("sweep.csv", {"N", "h", "fundamental_error", "image_discrepancy", "rho_eta"});
  ojson rows = ojson::array();
  double prev_image = std::numeric_limits<double>::infinity();
  bool decreasing = true;
  for (std::size_t N : cfg.solver.N_list) {
    const Setup s = setup(cfg, N);
    const OriginalProblem& P = s.problem;
    const TimeGrid& g = P.grid;
    const Mat A = P.A(g.t0());
    double ferr = 0.0;
    for (std::size_t j = 0; j <= N; ++j) {
      ferr = std::max(ferr, (s.F->at(N, j) - mittag_leffler_matrix(A, P.alpha, g.theta() - g.node(j))).cwiseAbs().maxCoeff());
    }

    std::mt19937_64 rng(cfg.seed);
    const ControlSignal u = random_control(rng, P);
    const Position start = Position::initial(g, s.x0);
    const SampledFunction xd = solve_motion_direct(P, start, g.theta(), u);
    const AuxiliaryProblem full(P, s.F, g.theta(), false);
    const Trajectory z = solve_aux_motion(full, u, g.t0(), g.theta(), info_image_ode(start, P).z);
    double image = 0.0;
    for (std::size_t k = 0; k <= N; ++k) {
      image = std::max(image, (info_image_ode(Position(xd.prefix(k)), P).z - z.z[k]).norm());
    }
    decreasing = decreasing && image < prev_image;
    prev_image = image;

    double rho_eta = std::numeric_limits<double>::quiet_NaN();
    auto aux = std::make_shared<const AuxiliaryProblem>(AuxiliaryProblem::shifted(P, s.F, cfg.solver.eta.front(), true));
    const Vec z0 = aux->reduce_image(info_image_ode(start, P).z);
    if (aux->dim() == 1) {
      ValueIterationOptions vo;
      vo.interp = cfg.solver.interp;
      rho_eta = value_iteration_1d(*aux, zgrid_for(P, *s.F, cfg.solver.z_points), vo).value(g.t0(), z0(0));
    }
    table->row({static_cast<double>(N), g.step(), ferr, image, rho_eta});
    const ojson entry{{"N", N}, {"h", g.step()}, {"fundamental_error", ferr}, {"image_discrepancy", image},
                      {"rho_eta", rho_eta}};
    rows.push_back(entry);
    run.write_json_file(fmt::format("sweep_N{}.json", N), entry);
  }
  table.reset();
  run.results()["entries"] = rows;
  run.check_flag("image_discrepancy_decreasing", decreasing);
}

}  // namespace

int run_scenario(const ScenarioConfig& config, const std::string& mode, const std::filesystem::path& out_dir) {
  if (std::find(kModes.begin(), kModes.end(), mode) == kModes.end()) {
    std::cerr << "unknown mode '" << mode << "'\n";
    return kExitConfig;
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "cannot create " << out_dir.string() << ": " << ec.message() << '\n';
    return kExitConfig;
  }
  Run run(config, mode, out_dir);
  try {
    if (mode == "fundamental") {
      mode_fundamental(run);
    } else if (mode == "simulate") {
      mode_simulate(run);
    } else if (mode == "openloop") {
      mode_openloop(run);
    } else if (mode == "feedback") {
      mode_feedback(run);
    } else {
      mode_sweep(run);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SolverError& e) {
    std::cerr << "solver error in " << e.module() << " at node " << e.node() << ": " << e.what() << '\n';
    return run.finish(e.what());
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return run.finish(e.what());
  }
  const int code = run.finish();
  if (code != kExitOk) std::cerr << "invariant violation; see " << (out_dir / "summary.json").string() << '\n';
  return code;
}

}  // namespace foc
