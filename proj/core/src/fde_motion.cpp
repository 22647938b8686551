#include "foc/fde_motion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "foc/errors.hpp"
#include "foc/quadrature.hpp"
#include "foc/special_functions.hpp"

namespace foc {

ControlSet ControlSet::points(std::vector<Vec> pts) {
  if (pts.empty()) throw DomainError("ControlSet: empty point list");
  ControlSet set;
  set.dim_ = static_cast<std::size_t>(pts.front().size());
  if (set.dim_ == 0) throw DomainError("ControlSet: zero-dimensional controls");
  set.lower_ = pts.front();
  set.upper_ = pts.front();
  for (const auto& p : pts) {
    if (static_cast<std::size_t>(p.size()) != set.dim_) throw DomainError("ControlSet: dimension mismatch");
    if (!p.allFinite()) throw DomainError("ControlSet: non-finite control point");
    set.lower_ = set.lower_.cwiseMin(p);
    set.upper_ = set.upper_.cwiseMax(p);
  }
  set.samples_ = std::move(pts);
  return set;
}

ControlSet ControlSet::box(const Vec& lower, const Vec& upper, const std::vector<std::size_t>& samples) {
  const auto r = static_cast<std::size_t>(lower.size());
  if (r == 0 || static_cast<std::size_t>(upper.size()) != r || samples.size() != r) {
    throw DomainError("ControlSet: box bounds and sample counts must share one dimension");
  }
  for (std::size_t a = 0; a < r; ++a) {
    if (!(lower(static_cast<Eigen::Index>(a)) <= upper(static_cast<Eigen::Index>(a)))) {
      throw DomainError("ControlSet: box lower bound exceeds upper bound");
    }
    if (samples[a] == 0) throw DomainError("ControlSet: box needs at least one sample per axis");
  }
  std::size_t total = 1;
  for (auto c : samples) total *= c;
  ControlSet set;
  set.dim_ = r;
  set.is_box_ = true;
  set.lower_ = lower;
  set.upper_ = upper;
  set.samples_.reserve(total);
  std::vector<std::size_t> idx(r, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    Vec p(static_cast<Eigen::Index>(r));
    for (std::size_t a = 0; a < r; ++a) {
      const auto ai = static_cast<Eigen::Index>(a);
      if (samples[a] == 1) {
        p(ai) = 0.5 * (lower(ai) + upper(ai));
      } else {
        const double s = static_cast<double>(idx[a]) / static_cast<double>(samples[a] - 1);
        p(ai) = lower(ai) * (1.0 - s) + upper(ai) * s;
      }
    }
    set.samples_.push_back(std::move(p));
    for (std::size_t a = r; a-- > 0;) {
      if (++idx[a] < samples[a]) break;
      idx[a] = 0;
    }
  }
  return set;
}

bool ControlSet::contains(const Vec& u) const {
  if (static_cast<std::size_t>(u.size()) != dim_) return false;
  if (is_box_) {
    const double slack = 1e-12 * (1.0 + (upper_ - lower_).cwiseAbs().maxCoeff());
    return ((u - lower_).array() >= -slack).all() && ((upper_ - u).array() >= -slack).all();
  }
  return std::any_of(samples_.begin(), samples_.end(), [&](const Vec& p) { return p == u; });
}

std::size_t ControlSet::nearest(const Vec& u) const {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const double d = (samples_[i] - u).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

ControlSignal::ControlSignal(TimeGrid grid, std::size_t first_panel, std::vector<Vec> values)
    : grid_(grid), first_(first_panel), values_(std::move(values)) {
  if (first_ + values_.size() > grid_.steps()) throw DomainError("ControlSignal: panels beyond the grid");
}

ControlSignal ControlSignal::sample(const TimeGrid& grid, std::size_t first, std::size_t last,
                                    const std::function<Vec(double)>& u) {
  std::vector<Vec> vals;
  vals.reserve(last > first ? last - first : 0);
  for (std::size_t k = first; k < last; ++k) vals.push_back(u(0.5 * (grid.node(k) + grid.node(k + 1))));
  return ControlSignal(grid, first, std::move(vals));
}

ControlSignal ControlSignal::constant(const TimeGrid& grid, std::size_t first, std::size_t last, const Vec& value) {
  return ControlSignal(grid, first, std::vector<Vec>(last > first ? last - first : 0, value));
}

const Vec& ControlSignal::on_panel(std::size_t k) const {
  if (k < first_ || k >= end_panel()) throw DomainError("ControlSignal: panel outside the signal");
  return values_[k - first_];
}

const Vec& ControlSignal::at(double t) const {
  if (values_.empty()) throw DomainError("ControlSignal: empty signal");
  std::size_t k = grid_.panel_of(t);
  k = std::clamp(k, first_, end_panel() - 1);
  return values_[k - first_];
}

void ControlSignal::validate(const ControlSet& set) const {
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!set.contains(values_[k])) {
      throw DomainError("ControlSignal: value on panel " + std::to_string(first_ + k) + " is outside the control set");
    }
  }
}

ControlSignal ControlSignal::restrict_to(std::size_t first, std::size_t last) const {
  if (!covers(first, last) || last < first) throw DomainError("ControlSignal: restriction outside the signal");
  return ControlSignal(grid_, first, std::vector<Vec>(values_.begin() + static_cast<long>(first - first_),
                                                      values_.begin() + static_cast<long>(last - first_)));
}

ControlSignal ControlSignal::append(const ControlSignal& tail) const {
  if (!(tail.grid_ == grid_) || tail.first_ != end_panel()) throw DomainError("ControlSignal: tail does not continue the signal");
  std::vector<Vec> vals = values_;
  vals.insert(vals.end(), tail.values_.begin(), tail.values_.end());
  return ControlSignal(grid_, first_, std::move(vals));
}

Position::Position(SampledFunction history) : w_(std::move(history)) {}

Position Position::initial(const TimeGrid& grid, const Vec& x0) { return Position(SampledFunction(grid, {x0})); }

double OriginalProblem::f_bound() const {
  double m = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    for (const auto& u : controls.samples()) m = std::max(m, f(grid.node(j), u).norm());
  }
  return m;
}

double OriginalProblem::chi_bound() const {
  double m = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    for (const auto& u : controls.samples()) m = std::max(m, std::abs(chi(grid.node(j), u)));
  }
  return m;
}

void OriginalProblem::check_position(const Position& pos) const {
  if (!(pos.history().grid() == grid)) throw DomainError("position lives on a different grid");
  if (pos.history().dim() != dim()) throw DomainError("position has the wrong state dimension");
  if (pos.initial_value().norm() > R_x * (1.0 + 1e-12)) throw DomainError("position outside G: ||w(t0)|| > R_x");
}

namespace {

struct MotionRange {
  std::size_t p;
  std::size_t s;
};

MotionRange motion_range(const OriginalProblem& problem, const Position& pos, double t_star, const ControlSignal& u) {
  problem.check_position(pos);
  const std::size_t p = pos.index();
  const std::size_t s = problem.grid.index_of(t_star);
  if (s < p) throw DomainError("t_star precedes the position time");
  if (s > p && !u.covers(p, s)) throw DomainError("control does not cover [t_*, t^*)");
  return {p, s};
}

Vec eval_f(const OriginalProblem& problem, double t, const Vec& u) {
  Vec v = problem.f(t, u);
  if (static_cast<std::size_t>(v.size()) != problem.dim()) throw DomainError("f returned a vector of the wrong size");
  return v;
}

}  // namespace

SampledFunction solve_motion_direct(const OriginalProblem& problem, const Position& pos, double t_star,
                                    const ControlSignal& u) {
  const auto [p, s] = motion_range(problem, pos, t_star, u);
  std::vector<Vec> x = pos.history().values();
  if (s == p) return SampledFunction(problem.grid, std::move(x));
  const double a = problem.alpha.value();
  const double h = problem.grid.step();
  const auto n = static_cast<Eigen::Index>(problem.dim());
  const std::vector<double> b = l1_coefficients(a, s + 1);
  const double c = std::pow(h, -a) / gamma_fn(2.0 - a);

  std::vector<Vec> dx;
  dx.reserve(s);
  for (std::size_t k = 0; k < p; ++k) dx.push_back(x[k + 1] - x[k]);
  x.reserve(s + 1);
  for (std::size_t i = p + 1; i <= s; ++i) {
    Vec memory = Vec::Zero(n);
    for (std::size_t k = 0; k + 1 < i; ++k) memory += b[i - 1 - k] * dx[k];
    const double ti = problem.grid.node(i);
    const Vec rhs = c * (x[i - 1] - memory) + eval_f(problem, ti, u.on_panel(i - 1));
    Mat lhs = -problem.A(ti);
    lhs.diagonal().array() += c;
    const Eigen::FullPivLU<Mat> lu(lhs);
    if (!lu.isInvertible()) throw SolverError("fde_motion", i, "singular L1 step matrix");
    x.push_back(lu.solve(rhs));
    dx.push_back(x[i] - x[i - 1]);
  }
  return SampledFunction(problem.grid, std::move(x));
}

SampledFunction solve_motion_repr(const OriginalProblem& problem, const Position& pos, double t_star,
                                  const ControlSignal& u, const FundamentalMatrixField& F) {
  const auto [p, s] = motion_range(problem, pos, t_star, u);
  if (!(F.grid() == problem.grid) || F.dim() != problem.dim()) throw DomainError("field does not match the problem");
  std::vector<Vec> x = pos.history().values();
  if (s == p) return SampledFunction(problem.grid, std::move(x));
  const double a = problem.alpha.value();
  const double h = problem.grid.step();
  const auto n = static_cast<Eigen::Index>(problem.dim());
  const TimeGrid& grid = problem.grid;
  const ProductTrapezoid pt(a, h, s);
  const std::vector<double> b = l1_coefficients(a, s + 1);
  const Vec xp = x[p];

  // History term H(tau_k)/Gamma(1-alpha) = -h^{-a}/Gamma(2-a) sum_q b_{k-q-1} (w_{q+1} - w_q).
  const double hc = std::pow(h, -a) / gamma_fn(2.0 - a);
  std::vector<Vec> g_node(s + 1, Vec::Zero(n));
  for (std::size_t k = p; k <= s; ++k) {
    Vec H = Vec::Zero(n);
    for (std::size_t q = 0; q < p; ++q) H -= b[k - q - 1] * (x[q + 1] - x[q]);
    g_node[k] = problem.A(grid.node(k)) * xp + hc * H;
  }
  std::vector<Vec> fl(s), fr(s);
  for (std::size_t k = p; k < s; ++k) {
    const Vec& uk = u.on_panel(k);
    fl[k] = eval_f(problem, grid.node(k), uk);
    fr[k] = eval_f(problem, grid.node(k + 1), uk);
  }

  x.reserve(s + 1);
  for (std::size_t i = p + 1; i <= s; ++i) {
    Vec acc = xp;
    for (std::size_t k = p; k < i; ++k) {
      const std::size_t lag = i - k;
      acc.noalias() += pt.left(lag) * (F.view(i, k) * (g_node[k] + fl[k]));
      acc.noalias() += pt.right(lag) * (F.view(i, k + 1) * (g_node[k + 1] + fr[k]));
    }
    x.push_back(std::move(acc));
  }
  return SampledFunction(grid, std::move(x));
}

double running_cost_panel(const std::function<double(double, const Vec&)>& chi, double a, double b, const Vec& u) {
  return 0.5 * (b - a) * (chi(a, u) + chi(b, u));
}

double cost_J(const OriginalProblem& problem, const SampledFunction& motion, const ControlSignal& u) {
  const std::size_t N = problem.grid.steps();
  if (motion.last_index() != N) throw DomainError("cost_J: motion must reach theta");
  if (!u.covers(0, N)) throw DomainError("cost_J: control must cover [t0, theta)");
  double J = problem.sigma(motion.at(N));
  for (std::size_t k = 0; k < N; ++k) {
    J += running_cost_panel(problem.chi, problem.grid.node(k), problem.grid.node(k + 1), u.on_panel(k));
  }
  return J;
}

}  // namespace foc
