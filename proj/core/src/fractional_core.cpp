#include "foc/fractional_core.hpp"

#include <algorithm>
#include <cmath>

#include "foc/errors.hpp"
#include "foc/quadrature.hpp"
#include "foc/special_functions.hpp"

namespace foc {

FracOrder::FracOrder(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha out of (0,1)");
}

TimeGrid::TimeGrid(double t0, double theta, std::size_t n_steps) : t0_(t0), theta_(theta), n_(n_steps) {
  if (!std::isfinite(t0) || !std::isfinite(theta) || !(t0 < theta)) {
    throw DomainError("TimeGrid: need finite t0 < theta");
  }
  if (n_steps < 2) throw DomainError("TimeGrid: need at least 2 steps");
  h_ = (theta - t0) / static_cast<double>(n_steps);
}

double TimeGrid::node(std::size_t j) const {
  if (j > n_) throw DomainError("TimeGrid: node index out of range");
  if (j == n_) return theta_;
  return t0_ + static_cast<double>(j) * h_;
}

std::size_t TimeGrid::index_of(double t) const {
  const double r = (t - t0_) / h_;
  const double j = std::round(r);
  if (std::abs(r - j) > 1e-8 || j < 0.0 || j > static_cast<double>(n_)) {
    throw DomainError("TimeGrid: time is not a grid node");
  }
  return static_cast<std::size_t>(j);
}

bool TimeGrid::is_node(double t) const {
  const double r = (t - t0_) / h_;
  const double j = std::round(r);
  return std::abs(r - j) <= 1e-8 && j >= 0.0 && j <= static_cast<double>(n_);
}

std::size_t TimeGrid::panel_of(double t) const {
  const double r = (t - t0_) / h_;
  double j = std::floor(r + 1e-9);
  if (j < 0.0) j = 0.0;
  if (j > static_cast<double>(n_ - 1)) j = static_cast<double>(n_ - 1);
  return static_cast<std::size_t>(j);
}

SampledFunction::SampledFunction(TimeGrid grid, std::vector<Vec> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.empty()) throw DomainError("SampledFunction: empty grid");
  if (values_.size() > grid_.size()) throw DomainError("SampledFunction: more samples than grid nodes");
  dim_ = static_cast<std::size_t>(values_.front().size());
  for (const auto& v : values_) {
    if (static_cast<std::size_t>(v.size()) != dim_) throw DomainError("SampledFunction: dimension mismatch");
  }
}

Vec SampledFunction::value_at(double t) const {
  const double tl = last_time();
  if (t < grid_.t0() - 1e-12 * grid_.step() || t > tl + 1e-9 * grid_.step()) {
    throw DomainError("SampledFunction: time outside the sampled range");
  }
  if (values_.size() == 1) return values_.front();
  std::size_t j = grid_.panel_of(t);
  if (j + 1 > last_index()) j = last_index() - 1;
  const double a = grid_.node(j);
  const double s = std::clamp((t - a) / grid_.step(), 0.0, 1.0);
  return (1.0 - s) * values_[j] + s * values_[j + 1];
}

SampledFunction SampledFunction::prefix(std::size_t last) const {
  if (last >= values_.size()) throw DomainError("SampledFunction: prefix beyond samples");
  return SampledFunction(grid_, std::vector<Vec>(values_.begin(), values_.begin() + static_cast<long>(last) + 1));
}

SampledFunction rl_integral(const SampledFunction& x, FracOrder alpha) {
  const std::size_t n = x.count();
  const double a = alpha.value();
  const ProductTrapezoid w(a, x.grid().step(), n);
  const double g = gamma_fn(a);
  std::vector<Vec> out(n, Vec::Zero(static_cast<Eigen::Index>(x.dim())));
  for (std::size_t j = 1; j < n; ++j) {
    Vec acc = Vec::Zero(static_cast<Eigen::Index>(x.dim()));
    for (std::size_t k = 0; k < j; ++k) {
      acc += w.left(j - k) * x.at(k) + w.right(j - k) * x.at(k + 1);
    }
    out[j] = acc / g;
  }
  return SampledFunction(x.grid(), std::move(out));
}

SampledFunction caputo_derivative(const SampledFunction& x, FracOrder alpha) {
  const std::size_t n = x.count();
  if (n < 2) throw DomainError("caputo_derivative: need at least two nodes");
  const double a = alpha.value();
  const std::vector<double> b = l1_coefficients(a, n);
  const double c = std::pow(x.grid().step(), -a) / gamma_fn(2.0 - a);
  std::vector<Vec> out(n, Vec::Zero(static_cast<Eigen::Index>(x.dim())));
  for (std::size_t j = 1; j < n; ++j) {
    Vec acc = Vec::Zero(static_cast<Eigen::Index>(x.dim()));
    for (std::size_t k = 0; k < j; ++k) acc += b[j - 1 - k] * (x.at(k + 1) - x.at(k));
    out[j] = c * acc;
  }
  out[0] = out[1];
  return SampledFunction(x.grid(), std::move(out));
}

Mat mittag_leffler_matrix(const Mat& A, FracOrder alpha, double s, double tol) {
  if (A.rows() != A.cols()) throw DomainError("mittag_leffler_matrix: A must be square");
  if (!(s >= 0.0)) throw DomainError("mittag_leffler_matrix: s must be nonnegative");
  if (!(tol > 0.0)) throw DomainError("mittag_leffler_matrix: tol must be positive");
  const double a = alpha.value();
  const auto n = A.rows();
  Mat term = Mat::Identity(n, n) / gamma_fn(a);
  Mat sum = term;
  if (s == 0.0) return sum;
  const Mat step = std::pow(s, a) * A;
  double prev = term.norm();
  constexpr std::size_t kMaxTerms = 10000;
  for (std::size_t i = 1; i < kMaxTerms; ++i) {
    const double di = static_cast<double>(i);
    // term_i = term_{i-1} (s^a A) Gamma(i a) / Gamma((i + 1) a)
    term = term * step * std::exp(log_gamma_fn(di * a) - log_gamma_fn((di + 1.0) * a));
    sum += term;
    const double norm = term.norm();
    if (norm == 0.0) return sum;
    if (norm < tol && norm <= prev) return sum;
    prev = norm;
  }
  throw SolverError("fractional_core", kMaxTerms, "Mittag-Leffler series did not converge");
}

}  // namespace foc
