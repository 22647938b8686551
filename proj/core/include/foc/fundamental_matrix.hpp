#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "foc/fractional_core.hpp"
#include "foc/linalg.hpp"

namespace foc {

/// t -> A(t) with a declared bound M_A on its spectral norm.
class SystemMatrixFunction {
 public:
  SystemMatrixFunction(std::function<Mat(double)> eval, std::size_t dim, double bound);

  /// Constant matrix; the bound is its spectral norm.
  static SystemMatrixFunction constant(const Mat& a);

  Mat operator()(double t) const;
  std::size_t dim() const noexcept { return dim_; }
  double bound() const noexcept { return bound_; }
  bool is_constant() const noexcept { return constant_; }

  /// Throws DomainError if ||A(tau_j)|| exceeds the declared bound at some node.
  void validate_on(const TimeGrid& grid) const;

 private:
  std::function<Mat(double)> eval_;
  std::size_t dim_;
  double bound_;
  bool constant_ = false;
};

struct FundamentalOptions {
  /// Number of starting-weight exponents s^{k alpha + l} corrected near the lower endpoint.
  std::size_t max_corrections = 6;
  std::size_t jacobi_points = 20;
  std::size_t legendre_points = 12;
};

/// F(t_i, tau_j) for i >= j on a uniform grid.
class FundamentalMatrixField {
 public:
  FundamentalMatrixField(TimeGrid grid, FracOrder alpha, std::size_t dim, std::vector<double> data);

  const TimeGrid& grid() const noexcept { return grid_; }
  FracOrder alpha() const noexcept { return alpha_; }
  std::size_t dim() const noexcept { return dim_; }

  /// Table entry F(t_i, tau_j), i >= j.
  Mat at(std::size_t i, std::size_t j) const;
  Eigen::Map<const Mat> view(std::size_t i, std::size_t j) const;

  /// Piecewise-linear interpolation on the triangle t >= tau, exact at nodes and on t = tau.
  Mat eval(double t, double tau) const;

  /// F(theta, tau), linear along the terminal row.
  Mat terminal(double tau) const;

 private:
  std::size_t offset(std::size_t i, std::size_t j) const;
  Mat lag_value(std::size_t j, std::size_t lag) const;

  TimeGrid grid_;
  FracOrder alpha_;
  std::size_t dim_;
  std::vector<std::size_t> column_start_;
  std::vector<double> data_;
};

/// Solves F(t,tau) = Id/Gamma(alpha) + (t-tau)^{1-alpha}/Gamma(alpha) *
///   int_tau^t A(xi) F(xi,tau) (t-xi)^{alpha-1} (xi-tau)^{alpha-1} dxi
/// column by column, marching forward in t.
FundamentalMatrixField solve_fundamental(const SystemMatrixFunction& A, const TimeGrid& grid,
                                         FracOrder alpha, const FundamentalOptions& options = {});

/// Largest residual of the discrete integral equation over the whole table (same weights as the
/// solver). Used as a self-consistency check.
double volterra_residual(const FundamentalMatrixField& field, const SystemMatrixFunction& A,
                         const FundamentalOptions& options = {});

struct FieldConstants {
  double M_F = 0.0;  ///< max_t ||F(theta, t)||
  double M_A = 0.0;
  double M_f = 0.0;
  double R_x = 0.0;
  double R_z = 0.0;  ///< (1 + M_F M_A (theta - t0)^alpha / alpha) R_x
};

FieldConstants constants(const FundamentalMatrixField& field, double M_A, double f_bound, double R_x);

}  // namespace foc
