#include "foc/quadrature.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "foc/errors.hpp"
#include "foc/special_functions.hpp"

namespace foc {
namespace {

// Golub–Welsch: nodes are eigenvalues of the symmetric tridiagonal Jacobi matrix,
// weights are mu0 times the squared first eigenvector components.
QuadratureRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& off, double mu0) {
  const auto n = diag.size();
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) J(i, i) = diag(i);
  for (Eigen::Index i = 0; i + 1 < n; ++i) J(i, i + 1) = J(i + 1, i) = off(i);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(J);
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = eig.eigenvectors()(0, i);
    rule.nodes[static_cast<std::size_t>(i)] = eig.eigenvalues()(i);
    rule.weights[static_cast<std::size_t>(i)] = mu0 * v * v;
  }
  return rule;
}

}  // namespace

QuadratureRule gauss_legendre_unit(std::size_t n) {
  if (n == 0) throw DomainError("gauss_legendre_unit: need at least one node");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  Eigen::VectorXd off(static_cast<Eigen::Index>(n > 1 ? n - 1 : 0));
  for (std::size_t k = 1; k < n; ++k) {
    const double kk = static_cast<double>(k);
    off(static_cast<Eigen::Index>(k - 1)) = kk / std::sqrt(4.0 * kk * kk - 1.0);
  }
  QuadratureRule rule = golub_welsch(diag, off, 2.0);
  for (std::size_t i = 0; i < n; ++i) {
    rule.nodes[i] = 0.5 * (rule.nodes[i] + 1.0);
    rule.weights[i] *= 0.5;
  }
  return rule;
}

QuadratureRule gauss_jacobi_unit(std::size_t n, double beta) {
  if (n == 0) throw DomainError("gauss_jacobi_unit: need at least one node");
  if (!(beta > -1.0)) throw DomainError("gauss_jacobi_unit: beta must exceed -1");
  // Jacobi weight (1 - x)^a (1 + x)^b on [-1, 1] with a = 0, b = beta.
  const double a = 0.0;
  const double b = beta;
  Eigen::VectorXd diag(static_cast<Eigen::Index>(n));
  Eigen::VectorXd off(static_cast<Eigen::Index>(n > 1 ? n - 1 : 0));
  diag(0) = (b - a) / (a + b + 2.0);
  for (std::size_t k = 1; k < n; ++k) {
    const double kk = static_cast<double>(k);
    const double s = 2.0 * kk + a + b;
    diag(static_cast<Eigen::Index>(k)) = (b * b - a * a) / (s * (s + 2.0));
    const double num = 4.0 * kk * (kk + a) * (kk + b) * (kk + a + b);
    const double den = s * s * (s + 1.0) * (s - 1.0);
    off(static_cast<Eigen::Index>(k - 1)) = std::sqrt(num / den);
  }
  const double mu0 = std::pow(2.0, a + b + 1.0) * beta_fn(a + 1.0, b + 1.0);
  QuadratureRule rule = golub_welsch(diag, off, mu0);
  const double scale = std::pow(2.0, -(b + 1.0));
  for (std::size_t i = 0; i < n; ++i) {
    rule.nodes[i] = 0.5 * (rule.nodes[i] + 1.0);
    rule.weights[i] *= scale;
  }
  return rule;
}

LinearWeights kernel_weights(double T, double alpha, double a, double b) {
  if (!(a < b) || b > T) throw DomainError("kernel_weights: need a < b <= T");
  const double da = T - a;
  const double db = T - b;
  const double i0 = (std::pow(da, alpha) - std::pow(db, alpha)) / alpha;
  const double i1 = (std::pow(da, alpha + 1.0) - std::pow(db, alpha + 1.0)) / (alpha + 1.0);
  LinearWeights w;
  w.left = (i1 - db * i0) / (b - a);
  w.right = i0 - w.left;
  return w;
}

ProductTrapezoid::ProductTrapezoid(double alpha, double h, std::size_t max_lag)
    : left_(max_lag + 1, 0.0), right_(max_lag + 1, 0.0) {
  const double ha = std::pow(h, alpha);
  for (std::size_t d = 1; d <= max_lag; ++d) {
    const LinearWeights w = kernel_weights(static_cast<double>(d), alpha, 0.0, 1.0);
    left_[d] = ha * w.left;
    right_[d] = ha * w.right;
  }
}

std::vector<double> l1_coefficients(double alpha, std::size_t count) {
  std::vector<double> b(count);
  const double e = 1.0 - alpha;
  for (std::size_t m = 0; m < count; ++m) {
    if (m == 0) {
      b[m] = 1.0;
    } else {
      const double md = static_cast<double>(m);
      b[m] = std::pow(md, e) * std::expm1(e * std::log1p(1.0 / md));
    }
  }
  return b;
}

}  // namespace foc
