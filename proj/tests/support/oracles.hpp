#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "foc/fde_motion.hpp"

// Reference values computed without the library.
namespace oracle {

inline double ml_series(double a, double alpha, double s, int terms = 200) {
  double sum = 0.0;
  double power = 1.0;
  for (int i = 0; i < terms; ++i) {
    sum += power / std::tgamma((i + 1) * alpha);
    power *= a * std::pow(s, alpha);
  }
  return sum;
}

// F(t, tau) for the double integrator, lag d = t - tau.
inline Eigen::Matrix2d double_integrator_F(double alpha, double d) {
  Eigen::Matrix2d F;
  F << 1.0 / std::tgamma(alpha), std::pow(d, alpha) / std::tgamma(2.0 * alpha), 0.0, 1.0 / std::tgamma(alpha);
  return F;
}

inline double b1(double t, double alpha, double theta) {
  return std::pow(theta - t, alpha - 1.0) / std::tgamma(alpha);
}

inline double b2(double t, double alpha, double theta) {
  return std::pow(theta - t, 2.0 * alpha - 1.0) / std::tgamma(2.0 * alpha);
}

// -int sqrt(b1^2 + b2^2) dt; with s = (theta - t)^alpha the integrand is sqrt(a^2 + s^2 / c^2) / alpha.
inline double example1_value(double alpha, double t0, double theta) {
  const double c = std::tgamma(2.0 * alpha);
  const double k = c / std::tgamma(alpha);
  const double S = std::pow(theta - t0, alpha);
  const double prim = 0.5 * S * std::sqrt(k * k + S * S) + 0.5 * k * k * std::asinh(S / k);
  return -prim / (c * alpha);
}

// Midpoint rule for the same integral in the variable s.
inline double example1_value_midpoint(double alpha, double t0, double theta, std::size_t n) {
  const double S = std::pow(theta - t0, alpha);
  const double ds = S / static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = (static_cast<double>(i) + 0.5) * ds;
    const double t = theta - std::pow(s, 1.0 / alpha);
    const double dt_ds = std::pow(s, 1.0 / alpha - 1.0) / alpha;
    sum += std::hypot(b1(t, alpha, theta), b2(t, alpha, theta)) * dt_ds * ds;
  }
  return -sum;
}

inline double example3_psi(double t, double eta, double alpha, double theta) {
  return (std::pow(theta - t, 2.0 * alpha) - std::pow(eta, 2.0 * alpha)) / std::tgamma(2.0 * alpha + 1.0);
}

inline double example3_phi(double t, double z, double eta, double alpha, double theta) {
  const double gap = std::abs(z) - example3_psi(t, eta, alpha, theta);
  return gap > 0.0 ? gap * gap : 0.0;
}

// Example 2 equation for alpha = 1/2, where b2 = 1.
inline double example2_lhs_half(double lambda, double eta, double t0, double theta) {
  const double S = std::max(2.0, std::abs(lambda));
  return lambda * (theta - eta - t0) / S + 0.5 * lambda;
}

// Piecewise-constant values drawn uniformly from a box, `segments` equal pieces on [t0, theta].
struct RandomControl {
  std::vector<Eigen::VectorXd> pieces;
  double t0 = 0.0;
  double theta = 1.0;

  Eigen::VectorXd operator()(double t) const {
    const double r = (t - t0) / (theta - t0) * static_cast<double>(pieces.size());
    const auto k = std::min(pieces.size() - 1, static_cast<std::size_t>(std::max(0.0, r)));
    return pieces[k];
  }
};

inline RandomControl random_control(const foc::ControlSet& U, double t0, double theta, std::mt19937_64& rng,
                                    std::size_t segments = 16) {
  RandomControl rc;
  rc.t0 = t0;
  rc.theta = theta;
  for (std::size_t k = 0; k < segments; ++k) {
    Eigen::VectorXd u(U.dim());
    for (std::size_t i = 0; i < U.dim(); ++i) {
      std::uniform_real_distribution<double> d(U.lower()(i), U.upper()(i));
      u(i) = d(rng);
    }
    rc.pieces.push_back(u);
  }
  return rc;
}

inline Eigen::VectorXd random_in_ball(std::size_t dim, double R, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-R, R);
  Eigen::VectorXd x(dim);
  do {
    for (std::size_t i = 0; i < dim; ++i) x(i) = d(rng);
  } while (x.norm() > R);
  return x;
}

}  // namespace oracle
