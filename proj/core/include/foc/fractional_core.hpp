#pragma once

#include <cstddef>
#include <vector>

#include "foc/linalg.hpp"

namespace foc {

/// Fractional order alpha, strictly inside (0, 1).
class FracOrder {
 public:
  explicit FracOrder(double alpha);
  double value() const noexcept { return alpha_; }

 private:
  double alpha_;
};

/// Uniform grid t0 = tau_0 < ... < tau_N = theta.
class TimeGrid {
 public:
  TimeGrid(double t0, double theta, std::size_t n_steps);

  double t0() const noexcept { return t0_; }
  double theta() const noexcept { return theta_; }
  std::size_t steps() const noexcept { return n_; }
  std::size_t size() const noexcept { return n_ + 1; }
  double step() const noexcept { return h_; }

  /// Node j; the last node is exactly theta.
  double node(std::size_t j) const;

  /// Index of the node equal to t (within a relative tolerance of the step); throws otherwise.
  std::size_t index_of(double t) const;
  bool is_node(double t) const;

  /// Largest j with node(j) <= t (clamped to [0, N-1] so that [node(j), node(j+1)] is a panel).
  std::size_t panel_of(double t) const;

  friend bool operator==(const TimeGrid& a, const TimeGrid& b) {
    return a.t0_ == b.t0_ && a.theta_ == b.theta_ && a.n_ == b.n_;
  }

 private:
  double t0_;
  double theta_;
  std::size_t n_;
  double h_;
};

/// Samples x(tau_0), ..., x(tau_{k-1}) of a vector function on a prefix of a grid.
class SampledFunction {
 public:
  SampledFunction(TimeGrid grid, std::vector<Vec> values);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::size_t count() const noexcept { return values_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t last_index() const noexcept { return values_.size() - 1; }
  double last_time() const { return grid_.node(last_index()); }

  const Vec& at(std::size_t j) const { return values_.at(j); }
  const std::vector<Vec>& values() const noexcept { return values_; }

  /// Piecewise-linear evaluation inside the sampled prefix.
  Vec value_at(double t) const;

  /// Restriction to nodes 0..last.
  SampledFunction prefix(std::size_t last) const;

 private:
  TimeGrid grid_;
  std::vector<Vec> values_;
  std::size_t dim_;
};

/// Riemann–Liouville integral (I^alpha x)(tau_j) at every sampled node, product-trapezoidal
/// (exact for piecewise-linear x).
SampledFunction rl_integral(const SampledFunction& x, FracOrder alpha);

/// L1 approximation of the Caputo derivative at tau_1..tau_k. The tau_0 entry repeats tau_1.
SampledFunction caputo_derivative(const SampledFunction& x, FracOrder alpha);

/// sum_{i>=0} s^{i alpha} A^i / Gamma((i+1) alpha), truncated once a term's norm drops below tol
/// and the terms are no longer growing. Throws SolverError after 10^4 terms.
Mat mittag_leffler_matrix(const Mat& A, FracOrder alpha, double s, double tol = 1e-14);

}  // namespace foc
