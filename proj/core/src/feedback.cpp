#include "foc/feedback.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "foc/errors.hpp"
#include "foc/special_functions.hpp"
#include "panel_pieces.hpp"

namespace foc {

Partition::Partition(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2) throw DomainError("Partition: need at least two nodes");
  for (std::size_t j = 0; j + 1 < nodes_.size(); ++j) {
    const double step = nodes_[j + 1] - nodes_[j];
    if (!(step > 0.0)) throw DomainError("Partition: nodes must be strictly increasing");
    diameter_ = std::max(diameter_, step);
  }
}

Partition Partition::on_grid(const TimeGrid& grid, std::size_t stride) {
  if (stride == 0) throw DomainError("Partition: stride must be positive");
  std::vector<double> nodes;
  for (std::size_t j = 0; j < grid.steps(); j += stride) nodes.push_back(grid.node(j));
  nodes.push_back(grid.theta());
  return Partition(std::move(nodes));
}

Partition Partition::with_diameter(const TimeGrid& grid, double diameter) {
  if (!(diameter > 0.0)) throw DomainError("Partition: diameter must be positive");
  const double ratio = std::floor(diameter / grid.step() + 1e-9);
  return on_grid(grid, static_cast<std::size_t>(std::max(1.0, ratio)));
}

Partition Partition::restrict_to(double terminal) const {
  const double tiny = 1e-9 * diameter_;
  std::vector<double> nodes;
  for (double t : nodes_) {
    if (t < terminal - tiny) nodes.push_back(t);
  }
  nodes.push_back(terminal);
  return Partition(std::move(nodes));
}

double shift_radius(double t, double t0, double kappa) { return std::sqrt(kappa + (t - t0) * kappa); }

namespace {

void check_kappa(double kappa, const AuxiliaryProblem& aux) {
  if (!(kappa > 0.0 && kappa < aux.theta() - aux.t0())) throw DomainError("kappa outside (0, theta - t0)");
}

template <class Score>
std::size_t argmin_control(const ControlSet& U, Score&& score) {
  std::size_t best = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < U.size(); ++c) {
    const double v = score(U[c]);
    if (v < best_v) {
      best_v = v;
      best = c;
    }
  }
  return best;
}

// int_a^b K f*(tau, u) dtau summed over grid pieces; both closed loops use this.
Vec increment_over(const AuxiliaryProblem& aux, double a, double b, const Vec& u) {
  Vec dz = Vec::Zero(static_cast<Eigen::Index>(aux.dim()));
  detail::for_each_piece(aux.grid(), a, b, [&](double lo, double hi, std::size_t) { dz += aux.increment(lo, hi, u); });
  return dz;
}

double running_cost_over(const AuxiliaryProblem& aux, double a, double b, const Vec& u) {
  double J = 0.0;
  detail::for_each_piece(aux.grid(), a, b, [&](double lo, double hi, std::size_t) {
    J += running_cost_panel(aux.original().chi, lo, hi, u);
  });
  return J;
}

}  // namespace

Vec extremal_shift(const ValueTable& table, double t, const Vec& z, double kappa, const AuxiliaryProblem& aux) {
  check_kappa(kappa, aux);
  if (aux.dim() != 1 || z.size() != 1) throw DomainError("extremal_shift: scalar auxiliary state required");
  const double tol = 1e-9 * aux.grid().step();
  if (t < aux.t0() - tol || t > aux.terminal() + tol) throw DomainError("extremal_shift: time outside the table");
  const double r = shift_radius(t, aux.t0(), kappa);
  const double r2 = r * r;
  const double zc = z(0);

  // Accompanying point: z-bar ranges over z itself and the z-grid inside the ball; the extra
  // coordinate sits on the lower boundary of the ball, which minimizes rho + z_{n+1} for each z-bar.
  double best_zbar = zc;
  double best_extra = -r;
  double best_v = table.value(t, zc) - r;
  const ZGrid& g = table.zgrid();
  const double dz = g.step();
  const auto lo = static_cast<std::size_t>(std::max(0.0, std::ceil((zc - r - g.z_min) / dz)));
  for (std::size_t i = lo; i < g.m; ++i) {
    const double zb = g.point(i);
    const double d2 = (zc - zb) * (zc - zb);
    if (zb > zc + r) break;
    if (d2 > r2) continue;
    const double extra = -std::sqrt(r2 - d2);
    const double v = table.value(t, zb) + extra;
    if (v < best_v) {
      best_v = v;
      best_zbar = zb;
      best_extra = extra;
    }
  }
  const double shift = zc - best_zbar;
  const std::size_t c = argmin_control(aux.controls(), [&](const Vec& p) {
    return shift * aux.f_star(t, p)(0) - best_extra * aux.chi(t, p);
  });
  return aux.controls()[c];
}

AuxStrategy extremal_shift_strategy(std::shared_ptr<const ValueTable> table, std::shared_ptr<const AuxiliaryProblem> aux) {
  return AuxStrategy{"extremal_shift", [table, aux](double t, const Vec& z, double kappa) {
                       return extremal_shift(*table, t, z, kappa, *aux);
                     }};
}

double example3_psi(double t, double eta, FracOrder alpha, double theta) {
  const double a = alpha.value();
  return (std::pow(theta - t, 2.0 * a) - std::pow(eta, 2.0 * a)) / gamma_fn(2.0 * a + 1.0);
}

double example3_value(double t, double z, double eta, FracOrder alpha, double theta) {
  const double psi = example3_psi(t, eta, alpha, theta);
  const double excess = std::abs(z) - psi;
  return excess > 0.0 ? excess * excess : 0.0;
}

Vec example3_strategy(double t, double z, double eta, FracOrder alpha, double t0, double theta) {
  if (t < t0) throw DomainError("example3_strategy: t before t0");
  const double psi = example3_psi(t, eta, alpha, theta);
  Vec u(1);
  if (z < -psi) {
    u(0) = 1.0;
  } else if (z > psi) {
    u(0) = -1.0;
  } else {
    u(0) = 1.0;
  }
  return u;
}

NuTable::NuTable(const AuxiliaryProblem& aux, std::size_t radial, std::size_t angular) : layers_(aux.layers()) {
  const std::size_t d = aux.dim();
  if (radial < 2) throw DomainError("NuTable: need at least two radial samples");
  if (d == 1) {
    for (std::size_t i = 0; i < radial; ++i) {
      const double s = static_cast<double>(i) / static_cast<double>(radial - 1);
      mesh_.push_back(Vec::Constant(1, -1.0 * (1.0 - s) + 1.0 * s));
    }
  } else if (d == 2) {
    if (angular < 3) throw DomainError("NuTable: need at least three angular samples");
    mesh_.push_back(Vec::Zero(2));
    for (std::size_t k = 1; k < radial; ++k) {
      const double rho = static_cast<double>(k) / static_cast<double>(radial - 1);
      for (std::size_t q = 0; q < angular; ++q) {
        const double phi = 2.0 * std::numbers::pi * static_cast<double>(q) / static_cast<double>(angular);
        Vec l(2);
        l << rho * std::cos(phi), rho * std::sin(phi);
        mesh_.push_back(l);
      }
    }
  } else {
    throw DomainError("NuTable: only one- and two-dimensional auxiliary states are supported");
  }

  const ControlSet& U = aux.controls();
  const std::size_t L = layers_.size();
  nu_.assign(L, std::vector<double>(mesh_.size(), 0.0));
  std::vector<Vec> inc(U.size());
  std::vector<double> run(U.size());
  for (std::size_t j = L - 1; j-- > 0;) {
    const double a = layers_[j];
    const double b = layers_[j + 1];
    for (std::size_t c = 0; c < U.size(); ++c) {
      inc[c] = aux.increment(a, b, U[c]);
      run[c] = running_cost_panel(aux.original().chi, a, b, U[c]);
    }
    for (std::size_t l = 0; l < mesh_.size(); ++l) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < U.size(); ++c) best = std::min(best, mesh_[l].dot(inc[c]) + run[c]);
      nu_[j][l] = nu_[j + 1][l] + best;
    }
  }
}

double NuTable::nu_at(double t, std::size_t l_index) const {
  const double first = layers_.front();
  const double last = layers_.back();
  const double tol = 1e-9 * (last - first);
  if (t < first - tol || t > last + tol) throw DomainError("NuTable: time outside the table");
  const auto it = std::upper_bound(layers_.begin(), layers_.end(), t);
  std::size_t j = it == layers_.begin() ? 0 : static_cast<std::size_t>(it - layers_.begin()) - 1;
  if (j >= layers_.size() - 1) return nu_.back()[l_index];
  const double s = (t - layers_[j]) / (layers_[j + 1] - layers_[j]);
  if (s <= 1e-12) return nu_[j][l_index];
  return (1.0 - s) * nu_[j][l_index] + s * nu_[j + 1][l_index];
}

double NuTable::value(double t, const Vec& z) const {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < mesh_.size(); ++l) best = std::max(best, mesh_[l].dot(z) + nu_at(t, l));
  return best;
}

std::size_t example4_direction(double t, const Vec& z, double kappa, const NuTable& nu, const AuxiliaryProblem& aux) {
  check_kappa(kappa, aux);
  const double r = shift_radius(t, aux.t0(), kappa);
  std::size_t best = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < nu.mesh().size(); ++l) {
    const Vec& lv = nu.mesh()[l];
    const double v = lv.dot(z) + nu.nu_at(t, l) - r * std::sqrt(1.0 + lv.squaredNorm());
    if (v > best_v) {
      best_v = v;
      best = l;
    }
  }
  return best;
}

Vec example4_strategy(double t, const Vec& z, double kappa, const NuTable& nu, const AuxiliaryProblem& aux) {
  const Vec& l = nu.mesh()[example4_direction(t, z, kappa, nu, aux)];
  const std::size_t c = argmin_control(aux.controls(), [&](const Vec& p) { return l.dot(aux.f_star(t, p)) + aux.chi(t, p); });
  return aux.controls()[c];
}

Vec OriginalStrategy::at_image(double t, const Vec& reduced_image) const {
  const double tiny = 1e-9 * aux->grid().step();
  if (t >= theta_eta - tiny) return u_bar;
  return aux_strategy(t, reduced_image, kappa);
}

Vec OriginalStrategy::operator()(const Position& pos) const {
  const InfoImage image = info_image_ode(pos, aux->original());
  return at_image(pos.time(), aux->reduce_image(image.z));
}

OriginalStrategy lift_strategy(const AuxStrategy& aux_strategy, double eta, double kappa, const Vec& u_bar,
                               std::shared_ptr<const AuxiliaryProblem> aux) {
  if (!aux) throw DomainError("lift_strategy: missing auxiliary problem");
  check_kappa(kappa, *aux);
  const double horizon = aux->theta() - aux->t0();
  if (!(eta > 0.0 && eta < horizon)) throw DomainError("lift_strategy: eta outside (0, theta - t0)");
  if (!aux->controls().contains(u_bar)) throw DomainError("lift_strategy: u_bar outside the control set");
  OriginalStrategy s;
  s.aux_strategy = aux_strategy;
  s.eta = eta;
  s.kappa = kappa;
  s.u_bar = u_bar;
  s.theta_eta = aux->theta() - eta;
  s.aux = std::move(aux);
  return s;
}

ClosedLoopResult run_control_law(const OriginalProblem& problem, const OriginalStrategy& strategy,
                                 const Partition& partition, const Vec& x0, const ClosedLoopOptions& options) {
  const TimeGrid& grid = problem.grid;
  const AuxiliaryProblem& aux = *strategy.aux;
  const std::size_t N = grid.steps();
  std::vector<std::size_t> idx;
  for (double t : partition.nodes()) idx.push_back(grid.index_of(t));
  if (idx.front() != 0 || idx.back() != N) throw DomainError("run_control_law: partition must span [t0, theta]");

  Position pos = Position::initial(grid, x0);
  problem.check_position(pos);
  Vec z = aux.reduce_image(info_image_ode(pos, problem).z);

  std::vector<Vec> x = {x0};
  std::vector<Vec> controls;
  controls.reserve(N);
  ClosedLoopResult out{ControlSignal(grid, 0, {}), SampledFunction(grid, {x0}), 0.0, {}, 0.0, 0};
  double running = 0.0;
  for (std::size_t j = 0; j + 1 < idx.size(); ++j) {
    const std::size_t i0 = idx[j];
    const std::size_t i1 = idx[j + 1];
    const double a = grid.node(i0);
    const double b = grid.node(i1);
    const Vec u = strategy.at_image(a, z);
    out.records.push_back(PanelRecord{j, a, u, x.back(), z, running});

    const SampledFunction next =
        solve_motion_direct(problem, Position(SampledFunction(grid, x)), b, ControlSignal::constant(grid, i0, i1, u));
    x = next.values();
    for (std::size_t k = i0; k < i1; ++k) {
      controls.push_back(u);
      running += running_cost_panel(problem.chi, grid.node(k), grid.node(k + 1), u);
    }
    z += increment_over(aux, a, b, u);

    const bool audit_now = options.audit_every > 0 && ((j + 1) % options.audit_every == 0 || j + 2 == idx.size());
    if (audit_now) {
      const Vec ref = aux.reduce_image(info_image_ode(Position(SampledFunction(grid, x)), problem).z);
      out.audit_discrepancy = std::max(out.audit_discrepancy, (ref - z).norm());
      ++out.audits;
    }
  }
  out.records.push_back(PanelRecord{idx.size() - 1, grid.theta(), controls.back(), x.back(), z, running});
  out.u = ControlSignal(grid, 0, std::move(controls));
  out.x = SampledFunction(grid, std::move(x));
  out.J = cost_J(problem, out.x, out.u);
  return out;
}

AuxLoopResult run_aux_control_law(const AuxiliaryProblem& aux, const AuxStrategy& strategy, double kappa,
                                  const Partition& partition, const Vec& z0) {
  check_kappa(kappa, aux);
  const double tiny = 1e-9 * aux.grid().step();
  if (std::abs(partition.nodes().front() - aux.t0()) > tiny ||
      std::abs(partition.terminal() - aux.terminal()) > tiny) {
    throw DomainError("run_aux_control_law: partition must span [t0, terminal]");
  }
  AuxLoopResult out;
  Vec z = z0;
  out.times.push_back(partition.nodes().front());
  out.z.push_back(z);
  for (std::size_t j = 0; j < partition.panels(); ++j) {
    const double a = partition.nodes()[j];
    const double b = partition.nodes()[j + 1];
    const Vec u = strategy(a, z, kappa);
    z += increment_over(aux, a, b, u);
    out.J += running_cost_over(aux, a, b, u);
    out.u.push_back(u);
    out.times.push_back(b);
    out.z.push_back(z);
  }
  out.J += aux.sigma_aux(z);
  return out;
}

}  // namespace foc
