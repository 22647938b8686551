#include "foc/auxiliary_problem.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "foc/errors.hpp"
#include "foc/quadrature.hpp"
#include "panel_pieces.hpp"

namespace foc {

Vec f_star(double t, const Vec& u, const FundamentalMatrixField& F, const OriginalProblem& problem) {
  const double theta = problem.grid.theta();
  if (!(t < theta)) throw DomainError("f_star: t must be below theta");
  const double a = problem.alpha.value();
  return F.terminal(t) * problem.f(t, u) * std::pow(theta - t, a - 1.0);
}

AuxiliaryProblem::AuxiliaryProblem(OriginalProblem problem, std::shared_ptr<const FundamentalMatrixField> F,
                                   double terminal, bool reduce)
    : problem_(std::move(problem)), F_(std::move(F)), terminal_(terminal) {
  if (!F_) throw DomainError("AuxiliaryProblem: missing fundamental matrix field");
  if (!(F_->grid() == problem_.grid) || F_->dim() != problem_.dim()) {
    throw DomainError("AuxiliaryProblem: field does not match the problem");
  }
  const double h = problem_.grid.step();
  if (!(terminal > problem_.grid.t0()) || terminal > problem_.grid.theta() + 1e-12 * h) {
    throw DomainError("AuxiliaryProblem: terminal time outside (t0, theta]");
  }
  terminal_ = std::min(terminal, problem_.grid.theta());
  const auto n = static_cast<Eigen::Index>(problem_.dim());
  reduced_ = reduce && problem_.reduction.has_value();
  if (reduced_) {
    K_ = problem_.reduction->K;
    c_ = problem_.reduction->c;
    if (K_.cols() != n || c_.size() != n) throw DomainError("AuxiliaryProblem: reduction has the wrong shape");
  } else {
    K_ = Mat::Identity(n, n);
    c_ = Vec::Zero(n);
  }
}

AuxiliaryProblem AuxiliaryProblem::shifted(OriginalProblem problem, std::shared_ptr<const FundamentalMatrixField> F,
                                           double eta, bool reduce) {
  const double horizon = problem.grid.theta() - problem.grid.t0();
  if (!(eta > 0.0 && eta < horizon)) throw DomainError("eta outside (0, theta - t0)");
  const double terminal = problem.grid.theta() - eta;
  return AuxiliaryProblem(std::move(problem), std::move(F), terminal, reduce);
}

Vec AuxiliaryProblem::regular(double t, const Vec& u) const { return K_ * (F_->terminal(t) * problem_.f(t, u)); }

Vec AuxiliaryProblem::f_star(double t, const Vec& u) const {
  if (!(t < theta())) throw DomainError("f_star: t must be below theta");
  return regular(t, u) * std::pow(theta() - t, alpha() - 1.0);
}

Vec AuxiliaryProblem::increment(double a, double b, const Vec& u) const {
  const LinearWeights w = kernel_weights(theta(), alpha(), a, b);
  return w.left * regular(a, u) + w.right * regular(b, u);
}

double AuxiliaryProblem::sigma_aux(const Vec& z) const {
  return reduced_ ? problem_.reduction->mu(z) : problem_.sigma(z);
}

Vec AuxiliaryProblem::reduce_image(const Vec& image) const { return K_ * (image - c_); }

std::vector<double> AuxiliaryProblem::layers() const {
  const TimeGrid& g = problem_.grid;
  std::vector<double> out;
  const double tiny = 1e-9 * g.step();
  for (std::size_t j = 0; j < g.size() && g.node(j) < terminal_ - tiny; ++j) out.push_back(g.node(j));
  out.push_back(terminal_);
  return out;
}

Trajectory solve_aux_motion(const AuxiliaryProblem& aux, const ControlSignal& p, double t_from, double t_to,
                            const Vec& z_from) {
  const double tiny = 1e-9 * aux.grid().step();
  if (t_to > aux.terminal() + tiny) throw DomainError("solve_aux_motion: t_to beyond the terminal time");
  if (t_from < aux.t0() - tiny) throw DomainError("solve_aux_motion: t_from before t0");
  if (static_cast<std::size_t>(z_from.size()) != aux.dim()) throw DomainError("solve_aux_motion: wrong state dimension");
  Trajectory traj;
  traj.times.push_back(t_from);
  traj.z.push_back(z_from);
  detail::for_each_piece(aux.grid(), t_from, std::min(t_to, aux.terminal()), [&](double a, double b, std::size_t k) {
    traj.z.push_back(traj.z.back() + aux.increment(a, b, p.on_panel(k)));
    traj.times.push_back(b);
  });
  return traj;
}

double cost_J_aux(const AuxiliaryProblem& aux, const Trajectory& z_traj, const ControlSignal& p) {
  const double tiny = 1e-9 * aux.grid().step();
  if (std::abs(z_traj.times.front() - aux.t0()) > tiny || std::abs(z_traj.times.back() - aux.terminal()) > tiny) {
    throw DomainError("cost_J_aux: trajectory must span [t0, terminal]");
  }
  double J = aux.sigma_aux(z_traj.final());
  detail::for_each_piece(aux.grid(), aux.t0(), aux.terminal(), [&](double a, double b, std::size_t k) {
    J += running_cost_panel(aux.original().chi, a, b, p.on_panel(k));
  });
  return J;
}

ControlSignal splice_control(const ControlSignal& p_eta, double theta_eta, const Vec& u_bar) {
  const TimeGrid& g = p_eta.grid();
  if (p_eta.first_panel() != 0) throw DomainError("splice_control: p_eta must start at t0");
  const std::size_t N = g.steps();
  const std::size_t k_eta = g.panel_of(theta_eta);
  const double frac = (theta_eta - g.node(k_eta)) / g.step();
  std::vector<Vec> vals;
  vals.reserve(N);
  for (std::size_t k = 0; k < N; ++k) {
    const bool keep = k < k_eta || (k == k_eta && frac >= 0.5);
    if (keep) {
      if (k >= p_eta.end_panel()) throw DomainError("splice_control: p_eta does not reach theta_eta");
      vals.push_back(p_eta.on_panel(k));
    } else {
      vals.push_back(u_bar);
    }
  }
  return ControlSignal(g, 0, std::move(vals));
}

SigmaModulus SigmaModulus::with_lipschitz(double L) {
  SigmaModulus m;
  m.kind = L == 0.0 ? Kind::Constant : Kind::Lipschitz;
  m.lipschitz = L;
  return m;
}

SigmaModulus SigmaModulus::constant() {
  SigmaModulus m;
  m.kind = Kind::Constant;
  return m;
}

SigmaModulus SigmaModulus::sampled(std::function<double(const Vec&)> sigma, std::size_t dim, std::uint64_t seed) {
  SigmaModulus m;
  m.kind = Kind::Sampled;
  m.sigma = std::move(sigma);
  m.dim = dim;
  m.seed = seed;
  return m;
}

double reachable_radius(const BudgetConstants& c) {
  const double growth = c.M_F * c.M_f * std::pow(c.horizon, c.alpha) / c.alpha;
  const double R_z = (1.0 + c.M_F * c.M_A * std::pow(c.horizon, c.alpha) / c.alpha) * c.R_x;
  return c.K_norm * R_z + c.Kc_norm + c.K_norm * growth;
}

namespace {

Vec uniform_in_ball(std::mt19937_64& rng, std::size_t dim, double radius) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vec v(static_cast<Eigen::Index>(dim));
  double norm = 0.0;
  do {
    for (std::size_t i = 0; i < dim; ++i) v(static_cast<Eigen::Index>(i)) = normal(rng);
    norm = v.norm();
  } while (norm == 0.0);
  const double r = radius * std::pow(unit(rng), 1.0 / static_cast<double>(dim));
  return v * (r / norm);
}

double sampled_zeta(const SigmaModulus& m, double M_z, double target) {
  std::mt19937_64 rng(m.seed);
  double zeta = 2.0 * M_z;
  for (int level = 0; level < 80; ++level, zeta *= 0.5) {
    double omega = 0.0;
    for (std::size_t i = 0; i < m.pairs; ++i) {
      const Vec z1 = uniform_in_ball(rng, m.dim, M_z);
      Vec z2 = z1 + uniform_in_ball(rng, m.dim, zeta);
      const double n2 = z2.norm();
      if (n2 > M_z) z2 *= M_z / n2;
      omega = std::max(omega, std::abs(m.sigma(z1) - m.sigma(z2)));
    }
    if (m.safety * omega <= target) return zeta;
  }
  throw SolverError("auxiliary_problem", 0, "no admissible zeta found for the sampled modulus");
}

}  // namespace

EpsilonBudget epsilon_budget(double epsilon, const BudgetConstants& c, const SigmaModulus& modulus) {
  if (!(epsilon > 0.0)) throw DomainError("epsilon_budget: epsilon must be positive");
  constexpr double inf = std::numeric_limits<double>::infinity();
  EpsilonBudget b;
  b.epsilon = epsilon;
  b.M_z = reachable_radius(c);
  b.M_chi = c.M_chi;
  switch (modulus.kind) {
    case SigmaModulus::Kind::Constant:
      b.zeta = inf;
      break;
    case SigmaModulus::Kind::Lipschitz:
      b.zeta = epsilon / (6.0 * modulus.lipschitz);
      break;
    case SigmaModulus::Kind::Sampled:
      b.zeta = sampled_zeta(modulus, b.M_z, epsilon / 6.0);
      break;
  }
  const double rate = c.K_norm * c.M_F * c.M_f;
  b.eta1 = (std::isinf(b.zeta) || rate == 0.0) ? inf : std::pow(c.alpha * b.zeta / rate, 1.0 / c.alpha);
  b.eta2 = c.M_chi > 0.0 ? epsilon / (6.0 * c.M_chi) : inf;
  b.eta2 = std::min(b.eta2, 0.5 * c.horizon);
  b.eta_star = std::min(b.eta1, b.eta2);
  b.eps_star = epsilon / 3.0;
  return b;
}

BudgetConstants budget_constants(const OriginalProblem& problem, const FundamentalMatrixField& F) {
  const FieldConstants fc = constants(F, problem.A.bound(), problem.f_bound(), problem.R_x);
  BudgetConstants c;
  c.M_F = fc.M_F;
  c.M_f = fc.M_f;
  c.M_A = fc.M_A;
  c.M_chi = problem.chi_bound();
  c.R_x = problem.R_x;
  c.alpha = problem.alpha.value();
  c.horizon = problem.grid.theta() - problem.grid.t0();
  if (problem.reduction) {
    c.K_norm = spectral_norm(problem.reduction->K);
    c.Kc_norm = (problem.reduction->K * problem.reduction->c).norm();
  }
  return c;
}

}  // namespace foc
