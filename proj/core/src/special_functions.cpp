#include "foc/special_functions.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "foc/errors.hpp"

namespace foc {
namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

// Lanczos series A_g(x) for the shifted argument x = z - 1.
double lanczos_sum(double x) {
  double a = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (x + static_cast<double>(i));
  return a;
}

}  // namespace

double gamma_fn(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("gamma_fn: argument must be positive");
  if (x < 0.5) {
    return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma_fn(1.0 - x));
  }
  const double z = x - 1.0;
  const double t = z + kLanczosG + 0.5;
  const double p = std::pow(t, 0.5 * (z + 0.5));
  return std::sqrt(2.0 * std::numbers::pi) * p * (p * std::exp(-t)) * lanczos_sum(z);
}

double log_gamma_fn(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("log_gamma_fn: argument must be positive");
  if (x < 0.5) {
    return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - log_gamma_fn(1.0 - x);
  }
  const double z = x - 1.0;
  const double t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(lanczos_sum(z));
}

double beta_fn(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("beta_fn: arguments must be positive");
  if (a + b < 100.0) return gamma_fn(a) * gamma_fn(b) / gamma_fn(a + b);
  return std::exp(log_gamma_fn(a) + log_gamma_fn(b) - log_gamma_fn(a + b));
}

}  // namespace foc
