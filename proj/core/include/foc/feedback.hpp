#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "foc/auxiliary_problem.hpp"
#include "foc/fde_motion.hpp"
#include "foc/informational_image.hpp"
#include "foc/open_loop.hpp"

namespace foc {

class Partition {
 public:
  explicit Partition(std::vector<double> nodes);

  /// Every `stride`-th grid node, ending at theta.
  static Partition on_grid(const TimeGrid& grid, std::size_t stride);
  /// Grid-aligned partition with the largest stride whose diameter does not exceed `diameter`.
  static Partition with_diameter(const TimeGrid& grid, double diameter);

  const std::vector<double>& nodes() const noexcept { return nodes_; }
  std::size_t panels() const noexcept { return nodes_.size() - 1; }
  double diameter() const noexcept { return diameter_; }
  double terminal() const { return nodes_.back(); }

  /// Nodes strictly below `terminal`, then `terminal`.
  Partition restrict_to(double terminal) const;

 private:
  std::vector<double> nodes_;
  double diameter_ = 0.0;
};

/// r(t, kappa) = sqrt(kappa + (t - t0) kappa).
double shift_radius(double t, double t0, double kappa);

/// (t, z, kappa) -> control sample.
struct AuxStrategy {
  std::string name;
  std::function<Vec(double, const Vec&, double)> rule;
  Vec operator()(double t, const Vec& z, double kappa) const { return rule(t, z, kappa); }
};

/// Extremal shift to accompanying points over a scalar value table.
Vec extremal_shift(const ValueTable& table, double t, const Vec& z, double kappa, const AuxiliaryProblem& aux);

AuxStrategy extremal_shift_strategy(std::shared_ptr<const ValueTable> table, std::shared_ptr<const AuxiliaryProblem> aux);

/// -sign(z) outside the band |z| <= psi_eta(t), +1 inside.
double example3_psi(double t, double eta, FracOrder alpha, double theta);
double example3_value(double t, double z, double eta, FracOrder alpha, double theta);
Vec example3_strategy(double t, double z, double eta, FracOrder alpha, double t0, double theta);

/// nu_eta(t_j, l) on the auxiliary layers and a deterministic mesh of the unit ball.
class NuTable {
 public:
  /// One dimension: `radial` points in [-1, 1]. Two dimensions: origin plus radial x angular rings.
  NuTable(const AuxiliaryProblem& aux, std::size_t radial, std::size_t angular = 16);

  const std::vector<Vec>& mesh() const noexcept { return mesh_; }
  const std::vector<double>& layers() const noexcept { return layers_; }
  double nu(std::size_t layer, std::size_t l_index) const { return nu_[layer][l_index]; }
  /// nu at time t, linear between layers.
  double nu_at(double t, std::size_t l_index) const;
  /// max_l <l, z> + nu(t, l).
  double value(double t, const Vec& z) const;

 private:
  std::vector<Vec> mesh_;
  std::vector<double> layers_;
  std::vector<std::vector<double>> nu_;
};

Vec example4_strategy(double t, const Vec& z, double kappa, const NuTable& nu, const AuxiliaryProblem& aux);

/// Index of the mesh point maximizing <l, z> + nu(t, l) - r(t, kappa) sqrt(1 + |l|^2).
std::size_t example4_direction(double t, const Vec& z, double kappa, const NuTable& nu, const AuxiliaryProblem& aux);

/// U*(t, w, eta): the auxiliary strategy at the reduced image for t < theta_eta, u_bar afterwards.
struct OriginalStrategy {
  AuxStrategy aux_strategy;
  double eta = 0.0;
  double kappa = 0.0;
  Vec u_bar;
  double theta_eta = 0.0;
  std::shared_ptr<const AuxiliaryProblem> aux;

  /// Evaluation at a known reduced image.
  Vec at_image(double t, const Vec& reduced_image) const;
  /// Evaluation from a position (image by the L1 route).
  Vec operator()(const Position& pos) const;
};

OriginalStrategy lift_strategy(const AuxStrategy& aux_strategy, double eta, double kappa, const Vec& u_bar,
                               std::shared_ptr<const AuxiliaryProblem> aux);

struct PanelRecord {
  std::size_t panel = 0;
  double tau = 0.0;
  Vec u;
  Vec x;
  Vec image;
  double running_cost = 0.0;
};

struct ClosedLoopResult {
  ControlSignal u;
  SampledFunction x;
  double J = 0.0;
  std::vector<PanelRecord> records;
  /// max |K(I_ode - c) - z_incremental| over audits.
  double audit_discrepancy = 0.0;
  std::size_t audits = 0;
};

struct ClosedLoopOptions {
  std::size_t audit_every = 16;
};

/// Feedback rule u = U(tau_j, x_{tau_j}, eta) on [tau_j, tau_{j+1}); motion by the L1 route,
/// image tracked by exact increments.
ClosedLoopResult run_control_law(const OriginalProblem& problem, const OriginalStrategy& strategy,
                                 const Partition& partition, const Vec& x0,
                                 const ClosedLoopOptions& options = {});

struct AuxLoopResult {
  std::vector<double> times;
  std::vector<Vec> z;
  std::vector<Vec> u;  ///< one per panel
  double J = 0.0;
};

/// p = P(tau_j, z(tau_j), kappa) on the auxiliary partition ending at theta_eta.
AuxLoopResult run_aux_control_law(const AuxiliaryProblem& aux, const AuxStrategy& strategy, double kappa,
                                  const Partition& partition, const Vec& z0);

}  // namespace foc
