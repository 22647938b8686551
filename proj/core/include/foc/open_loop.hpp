#pragma once

#include <cstddef>
#include <vector>

#include "foc/auxiliary_problem.hpp"
#include "foc/fractional_core.hpp"

namespace foc {

/// arctan(Gamma(alpha) (theta - t)^alpha / Gamma(2 alpha)).
double example1_control(double t, FracOrder alpha, double theta);

/// -int_{t0}^{theta} sqrt(b1^2 + b2^2) dt, after the substitution s = (theta - t)^alpha
/// (composite Gauss–Legendre with about quad_n nodes).
double example1_value(FracOrder alpha, double t0, double theta, std::size_t quad_n);

double example2_b2(double t, FracOrder alpha, double theta);
/// S(zeta) = 2 on [0, 2], zeta beyond.
double example2_S(double zeta);

/// lambda int_{t0}^{theta-eta} b2^2 / S(b2 |lambda|) dt + lambda / 2, integrated in closed form.
double example2_lhs(double lambda, double eta, FracOrder alpha, double t0, double theta);

/// Root of example2_lhs(lambda) = c1 by bisection.
double example2_lambda(double c1, double eta, FracOrder alpha, double t0, double theta, double tol = 1e-14);

/// b2(t) lambda / S(b2(t) |lambda|), always in [-1, 1].
double example2_control(double t, double lambda, FracOrder alpha, double theta);

struct ZGrid {
  double z_min = -1.0;
  double z_max = 1.0;
  std::size_t m = 801;

  double step() const { return (z_max - z_min) / static_cast<double>(m - 1); }
  double point(std::size_t i) const;
  /// Symmetric grid [-(M_z + 1), M_z + 1].
  static ZGrid around(double M_z, std::size_t m);
};

enum class Interpolation { Linear, Cubic };

/// rho_eta on time layers x z-grid, with argmin control indices.
class ValueTable {
 public:
  ValueTable(std::vector<double> layers, ZGrid zgrid, Interpolation interp);

  const std::vector<double>& layers() const noexcept { return layers_; }
  const ZGrid& zgrid() const noexcept { return zgrid_; }
  Interpolation interpolation() const noexcept { return interp_; }

  std::vector<double>& layer_values(std::size_t j) { return values_[j]; }
  const std::vector<double>& layer_values(std::size_t j) const { return values_[j]; }
  std::vector<std::size_t>& layer_argmin(std::size_t j) { return argmin_[j]; }
  const std::vector<std::size_t>& layer_argmin(std::size_t j) const { return argmin_[j]; }

  /// Interpolated value on layer j; z outside the grid is clamped and counted.
  double lookup(std::size_t j, double z) const;
  /// Value at (t, z), linear in t between layers.
  double value(double t, double z) const;
  /// Layer index for t (t must be a layer time up to rounding).
  std::size_t layer_of(double t) const;

  std::size_t clamp_count() const noexcept { return clamped_; }
  void reset_clamp_count() const noexcept { clamped_ = 0; }

 private:
  std::vector<double> layers_;
  ZGrid zgrid_;
  Interpolation interp_;
  std::vector<std::vector<double>> values_;
  std::vector<std::vector<std::size_t>> argmin_;
  mutable std::size_t clamped_ = 0;
};

struct ValueIterationOptions {
  Interpolation interp = Interpolation::Cubic;
};

/// Backward induction V(layer_j, z) = min_u [chi-panel + V(layer_{j+1}, z + panel increment)],
/// ties to the smallest control index. Requires a scalar auxiliary state.
ValueTable value_iteration_1d(const AuxiliaryProblem& aux, const ZGrid& zgrid,
                              const ValueIterationOptions& options = {});

}  // namespace foc
