#pragma once

#include <cstddef>
#include <vector>

namespace foc {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss–Legendre rule on [0, 1].
QuadratureRule gauss_legendre_unit(std::size_t n);

/// n-point Gauss–Jacobi rule for the weight s^{beta} on [0, 1], beta > -1
/// (Golub–Welsch on the Jacobi matrix).
QuadratureRule gauss_jacobi_unit(std::size_t n, double beta);

/// Weights of a linear interpolant against the kernel (T - tau)^{alpha - 1} on [a, b], a < b <= T:
///   int_a^b (T - tau)^{alpha-1} g(tau) dtau = left * g(a) + right * g(b)   for linear g.
struct LinearWeights {
  double left = 0.0;
  double right = 0.0;
};

LinearWeights kernel_weights(double T, double alpha, double a, double b);

/// Product-trapezoidal weights on a uniform grid for the kernel (t_i - tau)^{alpha-1}.
/// For a panel [tau_k, tau_{k+1}] at lag d = i - k >= 1 the weights are (left(d), right(d)), h^alpha included.
class ProductTrapezoid {
 public:
  ProductTrapezoid(double alpha, double h, std::size_t max_lag);

  double left(std::size_t lag) const { return left_[lag]; }
  double right(std::size_t lag) const { return right_[lag]; }
  std::size_t max_lag() const { return left_.size() - 1; }

 private:
  std::vector<double> left_;
  std::vector<double> right_;
};

/// L1 coefficients b_m = (m + 1)^{1-alpha} - m^{1-alpha}, m = 0..count-1.
std::vector<double> l1_coefficients(double alpha, std::size_t count);

}  // namespace foc
