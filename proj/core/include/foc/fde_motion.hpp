#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "foc/fractional_core.hpp"
#include "foc/fundamental_matrix.hpp"
#include "foc/linalg.hpp"

namespace foc {

/// Compact control set U. Either an explicit finite list of points, or a box materialized
/// into a tensor-product sample list. Optimization always runs over the sample list.
class ControlSet {
 public:
  static ControlSet points(std::vector<Vec> pts);
  static ControlSet box(const Vec& lower, const Vec& upper, const std::vector<std::size_t>& samples);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return samples_.size(); }
  const Vec& operator[](std::size_t i) const { return samples_[i]; }
  const std::vector<Vec>& samples() const noexcept { return samples_; }
  bool is_box() const noexcept { return is_box_; }
  const Vec& lower() const noexcept { return lower_; }
  const Vec& upper() const noexcept { return upper_; }

  /// Box sets: inside the box (1e-12 slack). Point sets: bitwise equal to a sample.
  bool contains(const Vec& u) const;

  /// Index of the sample nearest to u (smallest index on ties).
  std::size_t nearest(const Vec& u) const;

 private:
  ControlSet() = default;
  std::vector<Vec> samples_;
  Vec lower_;
  Vec upper_;
  std::size_t dim_ = 0;
  bool is_box_ = false;
};

/// Piecewise-constant control, value k holds on panel [tau_{first+k}, tau_{first+k+1}).
class ControlSignal {
 public:
  ControlSignal(TimeGrid grid, std::size_t first_panel, std::vector<Vec> values);

  /// Samples u(.) at panel midpoints on panels [first, last).
  static ControlSignal sample(const TimeGrid& grid, std::size_t first, std::size_t last,
                              const std::function<Vec(double)>& u);
  static ControlSignal constant(const TimeGrid& grid, std::size_t first, std::size_t last,
                                const Vec& value);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::size_t first_panel() const noexcept { return first_; }
  std::size_t end_panel() const noexcept { return first_ + values_.size(); }
  std::size_t panel_count() const noexcept { return values_.size(); }
  const std::vector<Vec>& values() const noexcept { return values_; }

  /// Value on panel k (absolute index).
  const Vec& on_panel(std::size_t k) const;
  /// Value at time t, using the panel containing t (the last panel for t at its right end).
  const Vec& at(double t) const;

  bool covers(std::size_t first, std::size_t last) const noexcept {
    return first >= first_ && last <= end_panel();
  }
  /// Throws DomainError if a value lies outside the control set.
  void validate(const ControlSet& set) const;

  ControlSignal restrict_to(std::size_t first, std::size_t last) const;
  ControlSignal append(const ControlSignal& tail) const;

 private:
  TimeGrid grid_;
  std::size_t first_;
  std::vector<Vec> values_;
};

/// (t, w(.)): t is the last node of the sampled history w on [t0, t].
class Position {
 public:
  explicit Position(SampledFunction history);
  static Position initial(const TimeGrid& grid, const Vec& x0);

  const SampledFunction& history() const noexcept { return w_; }
  std::size_t index() const noexcept { return w_.last_index(); }
  double time() const { return w_.last_time(); }
  const Vec& initial_value() const { return w_.at(0); }
  const Vec& current() const { return w_.at(w_.last_index()); }

 private:
  SampledFunction w_;
};

/// sigma(x) = mu(K (x - c)).
struct TerminalReduction {
  Mat K;
  Vec c;
  std::function<double(const Vec&)> mu;
};

struct OriginalProblem {
  FracOrder alpha{0.5};
  TimeGrid grid{0.0, 1.0, 2};
  SystemMatrixFunction A = SystemMatrixFunction::constant(Mat::Zero(1, 1));
  std::function<Vec(double, const Vec&)> f;
  std::function<double(const Vec&)> sigma;
  std::function<double(double, const Vec&)> chi;
  ControlSet controls = ControlSet::points({Vec::Zero(1)});
  double R_x = 1.0;
  std::optional<TerminalReduction> reduction;
  /// Declared Lipschitz constant of sigma (of mu when reduced); 0 means sigma is constant.
  std::optional<double> sigma_lipschitz;

  std::size_t dim() const noexcept { return A.dim(); }
  /// max ||f(tau_j, u)|| over grid nodes and control samples.
  double f_bound() const;
  /// max |chi(tau_j, u)| over grid nodes and control samples.
  double chi_bound() const;
  /// Checks ||w(t0)|| <= R_x; throws DomainError otherwise.
  void check_position(const Position& pos) const;
};

/// x(.) on [t0, t_star] from the representation formula (product integration against F).
SampledFunction solve_motion_repr(const OriginalProblem& problem, const Position& pos, double t_star,
                                  const ControlSignal& u, const FundamentalMatrixField& F);

/// x(.) on [t0, t_star] from the L1 scheme, memory always based at t0.
SampledFunction solve_motion_direct(const OriginalProblem& problem, const Position& pos, double t_star,
                                    const ControlSignal& u);

/// sigma(x(theta)) + trapezoidal running cost over the control panels.
double cost_J(const OriginalProblem& problem, const SampledFunction& motion, const ControlSignal& u);

/// Trapezoidal integral of chi(t, u) over [a, b] for a constant control value.
double running_cost_panel(const std::function<double(double, const Vec&)>& chi, double a, double b,
                          const Vec& u);

}  // namespace foc
