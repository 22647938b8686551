#include "foc/fundamental_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "foc/errors.hpp"
#include "foc/quadrature.hpp"
#include "foc/special_functions.hpp"

namespace foc {

SystemMatrixFunction::SystemMatrixFunction(std::function<Mat(double)> eval, std::size_t dim, double bound)
    : eval_(std::move(eval)), dim_(dim), bound_(bound) {
  if (dim == 0) throw DomainError("SystemMatrixFunction: dimension must be positive");
  if (!(bound >= 0.0)) throw DomainError("SystemMatrixFunction: bound must be nonnegative");
}

SystemMatrixFunction SystemMatrixFunction::constant(const Mat& a) {
  if (a.rows() != a.cols() || a.rows() == 0) throw DomainError("SystemMatrixFunction: A must be square");
  SystemMatrixFunction out([a](double) { return a; }, static_cast<std::size_t>(a.rows()), spectral_norm(a));
  out.constant_ = true;
  return out;
}

Mat SystemMatrixFunction::operator()(double t) const {
  Mat a = eval_(t);
  if (static_cast<std::size_t>(a.rows()) != dim_ || static_cast<std::size_t>(a.cols()) != dim_) {
    throw DomainError("SystemMatrixFunction: evaluator returned a matrix of the wrong size");
  }
  return a;
}

void SystemMatrixFunction::validate_on(const TimeGrid& grid) const {
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double norm = spectral_norm((*this)(grid.node(j)));
    if (!std::isfinite(norm) || norm > bound_ * (1.0 + 1e-12) + 1e-300) {
      throw DomainError("SystemMatrixFunction: ||A(t)|| exceeds the declared bound at node " + std::to_string(j));
    }
  }
}

namespace {

// omega[m][k] = int_0^m phi_k(s) s^{a-1} (m - s)^{a-1} ds for the hat functions phi_k,
// plus starting weights W that make the rule exact for s^gamma near s = 0.
struct VolterraWeights {
  double alpha = 0.5;
  std::size_t N = 0;
  std::vector<std::vector<double>> omega;
  std::vector<double> gammas;
  // W[g][m] has g + 2 entries (nodes 0..g+1) when g >= 1 exponents are corrected.
  std::vector<std::vector<std::vector<double>>> W;

  std::size_t corrections_for(std::size_t M) const {
    if (M < 2) return 0;
    return std::min(gammas.size(), M - 1);
  }
};

std::vector<double> correction_exponents(double alpha, std::size_t count) {
  std::vector<double> candidates;
  for (int k = 1; k < 40; ++k) {
    for (int l = 0; l < 2; ++l) {
      const double v = k * alpha + l;
      if (v >= 2.0) continue;
      if (std::abs(v - std::round(v)) < 0.05) continue;
      candidates.push_back(v);
    }
  }
  std::sort(candidates.begin(), candidates.end());
  std::vector<double> out;
  for (double v : candidates) {
    if (out.size() >= count) break;
    if (!out.empty() && v - out.back() < 0.05) continue;
    out.push_back(v);
  }
  return out;
}

double power0(double base, double e) {
  if (base == 0.0) return e == 0.0 ? 1.0 : 0.0;
  return std::pow(base, e);
}

VolterraWeights build_weights(double alpha, std::size_t N, const FundamentalOptions& opt) {
  VolterraWeights w;
  w.alpha = alpha;
  w.N = N;
  w.omega.resize(N + 1);
  const QuadratureRule gj = gauss_jacobi_unit(opt.jacobi_points, alpha - 1.0);
  const QuadratureRule gl = gauss_legendre_unit(opt.legendre_points);
  const double am1 = alpha - 1.0;

  for (std::size_t m = 1; m <= N; ++m) {
    std::vector<double>& om = w.omega[m];
    om.assign(m + 1, 0.0);
    const double md = static_cast<double>(m);
    if (m == 1) {
      om[0] = beta_fn(alpha, alpha + 1.0);
      om[1] = beta_fn(alpha + 1.0, alpha);
      continue;
    }
    // Panels p and m-1-p are mirror images; compute the first half and reflect.
    const std::size_t half = (m - 1) / 2;
    for (std::size_t p = 0; p <= half; ++p) {
      const double pd = static_cast<double>(p);
      double L = 0.0;
      double R = 0.0;
      if (p == 0) {
        for (std::size_t q = 0; q < gj.nodes.size(); ++q) {
          const double s = gj.nodes[q];
          const double g = gj.weights[q] * std::pow(md - s, am1);
          L += g * (1.0 - s);
          R += g * s;
        }
      } else {
        for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
          const double s = pd + gl.nodes[q];
          const double g = gl.weights[q] * std::pow(s, am1) * std::pow(md - s, am1);
          L += g * (pd + 1.0 - s);
          R += g * (s - pd);
        }
      }
      om[p] += L;
      om[p + 1] += R;
      const std::size_t mirror = m - 1 - p;
      if (mirror != p) {
        om[mirror] += R;
        om[mirror + 1] += L;
      }
    }
  }

  w.gammas = correction_exponents(alpha, opt.max_corrections);
  w.W.resize(w.gammas.size() + 1);
  for (std::size_t g = 1; g <= w.gammas.size(); ++g) {
    const std::size_t S = g + 1;
    std::vector<double> ex = {0.0, 1.0};
    ex.insert(ex.end(), w.gammas.begin(), w.gammas.begin() + static_cast<long>(g));
    Mat V(static_cast<Eigen::Index>(S + 1), static_cast<Eigen::Index>(S + 1));
    for (std::size_t r = 0; r <= S; ++r) {
      for (std::size_t l = 0; l <= S; ++l) V(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(l)) = power0(static_cast<double>(l), ex[r]);
    }
    const Eigen::FullPivLU<Mat> lu(V);
    w.W[g].resize(N + 1);
    for (std::size_t m = 1; m <= N; ++m) {
      const double md = static_cast<double>(m);
      Vec rhs(static_cast<Eigen::Index>(S + 1));
      for (std::size_t r = 0; r <= S; ++r) {
        const double e = ex[r];
        double exact = std::pow(md, e + 2.0 * alpha - 1.0) * beta_fn(e + alpha, alpha);
        double approx = 0.0;
        for (std::size_t k = 0; k <= m; ++k) approx += w.omega[m][k] * power0(static_cast<double>(k), e);
        rhs(static_cast<Eigen::Index>(r)) = exact - approx;
      }
      const Vec sol = lu.solve(rhs);
      w.W[g][m].assign(sol.data(), sol.data() + sol.size());
    }
  }
  return w;
}

// Solves one column tau_j: F_m = F(tau_{j+m}, tau_j), m = 0..M, given P-ready A_k matrices.
class ColumnSolver {
 public:
  ColumnSolver(const VolterraWeights& w, double h, std::size_t n) : w_(w), n_(n) {
    inv_gamma_ = 1.0 / gamma_fn(w.alpha);
    c_.resize(w.N + 1, 0.0);
    const double ha = std::pow(h, w.alpha);
    for (std::size_t m = 1; m <= w.N; ++m) {
      c_[m] = ha * std::pow(static_cast<double>(m), 1.0 - w.alpha) * inv_gamma_;
    }
  }

  double c(std::size_t m) const { return c_[m]; }
  double inv_gamma() const { return inv_gamma_; }

  // Returns flat column-major F_0..F_M. A[k] = A(tau_{j+k}). `node0` is used in error reports.
  std::vector<double> solve(const std::vector<Mat>& A, std::size_t M, std::size_t node0) const {
    const std::size_t nn = n_ * n_;
    const auto ni = static_cast<Eigen::Index>(n_);
    std::vector<double> F((M + 1) * nn, 0.0);
    std::vector<double> P((M + 1) * nn, 0.0);  // A_k F_k
    auto Fm = [&](std::size_t m) { return Eigen::Map<Mat>(F.data() + m * nn, ni, ni); };
    auto Pm = [&](std::size_t m) { return Eigen::Map<Mat>(P.data() + m * nn, ni, ni); };
    Fm(0) = Mat::Identity(ni, ni) * inv_gamma_;
    Pm(0) = A[0] * Fm(0);
    if (M == 0) return F;

    const std::size_t g = w_.corrections_for(M);
    const std::size_t S = g == 0 ? 0 : g + 1;
    const std::vector<std::vector<double>>* W = g == 0 ? nullptr : &w_.W[g];

    if (S > 0) {
      const auto bs = static_cast<Eigen::Index>(S * n_);
      Mat big = Mat::Identity(bs, bs);
      Mat rhs(bs, ni);
      for (std::size_t m = 1; m <= S; ++m) {
        const auto row = static_cast<Eigen::Index>((m - 1) * n_);
        const double cm = c_[m];
        const auto& om = w_.omega[m];
        const auto& Wm = (*W)[m];
        for (std::size_t k = 1; k <= S; ++k) {
          double coef = (k <= m ? om[k] : 0.0) + Wm[k];
          const auto col = static_cast<Eigen::Index>((k - 1) * n_);
          big.block(row, col, ni, ni) -= cm * coef * A[k];
        }
        rhs.block(row, 0, ni, ni) = Mat::Identity(ni, ni) * inv_gamma_ + cm * (om[0] + Wm[0]) * Pm(0);
      }
      const Eigen::FullPivLU<Mat> lu(big);
      if (!lu.isInvertible()) {
        throw SolverError("fundamental_matrix", node0 + 1, "singular starting block");
      }
      const Mat sol = lu.solve(rhs);
      for (std::size_t m = 1; m <= S; ++m) {
        Fm(m) = sol.block(static_cast<Eigen::Index>((m - 1) * n_), 0, ni, ni);
        Pm(m) = A[m] * Fm(m);
      }
    }

    std::vector<double> acc(nn);
    for (std::size_t m = S + 1; m <= M; ++m) {
      const auto& om = w_.omega[m];
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::size_t k = 0; k < m; ++k) {
        const double wk = om[k];
        const double* pk = P.data() + k * nn;
        for (std::size_t e = 0; e < nn; ++e) acc[e] += wk * pk[e];
      }
      if (W != nullptr) {
        const auto& Wm = (*W)[m];
        for (std::size_t l = 0; l <= S; ++l) {
          const double* pl = P.data() + l * nn;
          for (std::size_t e = 0; e < nn; ++e) acc[e] += Wm[l] * pl[e];
        }
      }
      const double cm = c_[m];
      Mat rhs = Eigen::Map<const Mat>(acc.data(), ni, ni) * cm;
      rhs.diagonal().array() += inv_gamma_;
      const Mat lhs = Mat::Identity(ni, ni) - cm * om[m] * A[m];
      const Eigen::FullPivLU<Mat> lu(lhs);
      if (!lu.isInvertible()) {
        throw SolverError("fundamental_matrix", node0 + m, "singular local solve I - c A(t_i)");
      }
      Fm(m) = lu.solve(rhs);
      Pm(m) = A[m] * Fm(m);
    }
    return F;
  }

  // Largest residual of the discrete equation for a given column.
  double residual(const std::vector<Mat>& A, const std::vector<Mat>& F) const {
    const std::size_t M = F.size() - 1;
    const auto ni = static_cast<Eigen::Index>(n_);
    const std::size_t g = w_.corrections_for(M);
    const std::size_t S = g == 0 ? 0 : g + 1;
    double worst = spectral_norm(F[0] - Mat::Identity(ni, ni) * inv_gamma_);
    std::vector<Mat> P(M + 1);
    for (std::size_t k = 0; k <= M; ++k) P[k] = A[k] * F[k];
    for (std::size_t m = 1; m <= M; ++m) {
      Mat acc = Mat::Zero(ni, ni);
      for (std::size_t k = 0; k <= m; ++k) acc += w_.omega[m][k] * P[k];
      if (g > 0) {
        for (std::size_t l = 0; l <= S; ++l) acc += w_.W[g][m][l] * P[l];
      }
      Mat r = F[m] - c_[m] * acc;
      r.diagonal().array() -= inv_gamma_;
      worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
    return worst;
  }

 private:
  const VolterraWeights& w_;
  std::size_t n_;
  double inv_gamma_ = 1.0;
  std::vector<double> c_;
};

// Columns shorter than the starting block are extended past theta with A held at A(theta).
std::size_t column_length(const VolterraWeights& w, std::size_t M) {
  const std::size_t full = w.corrections_for(w.N);
  const std::size_t need = full == 0 ? 0 : full + 1;
  return std::min(w.N, std::max(M, need));
}

std::vector<Mat> column_matrices(const std::vector<Mat>& Anodes, std::size_t j, std::size_t L) {
  std::vector<Mat> out;
  out.reserve(L + 1);
  for (std::size_t k = 0; k <= L; ++k) out.push_back(Anodes[std::min(j + k, Anodes.size() - 1)]);
  return out;
}

}  // namespace

FundamentalMatrixField::FundamentalMatrixField(TimeGrid grid, FracOrder alpha, std::size_t dim,
                                               std::vector<double> data)
    : grid_(grid), alpha_(alpha), dim_(dim), data_(std::move(data)) {
  const std::size_t N = grid_.steps();
  column_start_.resize(N + 1);
  std::size_t offset = 0;
  for (std::size_t j = 0; j <= N; ++j) {
    column_start_[j] = offset;
    offset += N - j + 1;
  }
  if (data_.size() != offset * dim_ * dim_) throw DomainError("FundamentalMatrixField: table size mismatch");
}

std::size_t FundamentalMatrixField::offset(std::size_t i, std::size_t j) const {
  if (j > i || i > grid_.steps()) throw DomainError("FundamentalMatrixField: index outside the triangle");
  return (column_start_[j] + (i - j)) * dim_ * dim_;
}

Eigen::Map<const Mat> FundamentalMatrixField::view(std::size_t i, std::size_t j) const {
  const auto n = static_cast<Eigen::Index>(dim_);
  return Eigen::Map<const Mat>(data_.data() + offset(i, j), n, n);
}

Mat FundamentalMatrixField::at(std::size_t i, std::size_t j) const { return view(i, j); }

Mat FundamentalMatrixField::lag_value(std::size_t j, std::size_t lag) const { return view(j + lag, j); }

Mat FundamentalMatrixField::eval(double t, double tau) const {
  const double h = grid_.step();
  const double N = static_cast<double>(grid_.steps());
  const double tol = 1e-9 * h;
  if (t < tau - tol) throw DomainError("eval_F: t < tau is outside the domain");
  if (tau < grid_.t0() - tol || t > grid_.theta() + tol) throw DomainError("eval_F: time outside [t0, theta]");
  const double u = std::clamp((tau - grid_.t0()) / h, 0.0, N);
  const double v = std::clamp((t - tau) / h, 0.0, N - u);
  const auto j0 = static_cast<std::size_t>(std::min(std::floor(u), N));
  const auto d0 = static_cast<std::size_t>(std::floor(v));
  const std::size_t Ns = grid_.steps();
  if (j0 + d0 >= Ns) return lag_value(j0, Ns - j0);
  const double a = u - static_cast<double>(j0);
  const double b = v - static_cast<double>(d0);
  const Mat g00 = lag_value(j0, d0);
  const Mat g10 = lag_value(j0 + 1, d0);
  const Mat g01 = lag_value(j0, d0 + 1);
  if (a + b <= 1.0 || j0 + d0 + 2 > Ns) {
    return g00 + a * (g10 - g00) + b * (g01 - g00);
  }
  const Mat g11 = lag_value(j0 + 1, d0 + 1);
  return g11 + (1.0 - a) * (g01 - g11) + (1.0 - b) * (g10 - g11);
}

Mat FundamentalMatrixField::terminal(double tau) const {
  const double h = grid_.step();
  const std::size_t N = grid_.steps();
  if (tau < grid_.t0() - 1e-9 * h || tau > grid_.theta() + 1e-9 * h) {
    throw DomainError("FundamentalMatrixField::terminal: tau outside [t0, theta]");
  }
  const double u = std::clamp((tau - grid_.t0()) / h, 0.0, static_cast<double>(N));
  const auto j = std::min(static_cast<std::size_t>(std::floor(u)), N - 1);
  const double a = u - static_cast<double>(j);
  if (a == 0.0) return view(N, j);
  return (1.0 - a) * view(N, j) + a * view(N, j + 1);
}

FundamentalMatrixField solve_fundamental(const SystemMatrixFunction& A, const TimeGrid& grid, FracOrder alpha,
                                         const FundamentalOptions& options) {
  const std::size_t N = grid.steps();
  const std::size_t n = A.dim();
  const std::size_t nn = n * n;
  const VolterraWeights w = build_weights(alpha.value(), N, options);
  const ColumnSolver solver(w, grid.step(), n);

  std::vector<Mat> Anodes(N + 1);
  for (std::size_t k = 0; k <= N; ++k) Anodes[k] = A(grid.node(k));

  std::vector<double> data;
  data.reserve((N + 1) * (N + 2) / 2 * nn);

  // Constant A: F depends on t - tau only, so every column is a prefix of the first one.
  std::vector<double> shared;
  if (A.is_constant()) shared = solver.solve(Anodes, N, 0);

  for (std::size_t j = 0; j <= N; ++j) {
    const std::size_t M = N - j;
    if (A.is_constant()) {
      data.insert(data.end(), shared.begin(), shared.begin() + static_cast<long>((M + 1) * nn));
      continue;
    }
    const std::size_t L = column_length(w, M);
    const std::vector<double> col = solver.solve(column_matrices(Anodes, j, L), L, j);
    data.insert(data.end(), col.begin(), col.begin() + static_cast<long>((M + 1) * nn));
  }
  return FundamentalMatrixField(grid, alpha, n, std::move(data));
}

double volterra_residual(const FundamentalMatrixField& field, const SystemMatrixFunction& A,
                         const FundamentalOptions& options) {
  const TimeGrid& grid = field.grid();
  const std::size_t N = grid.steps();
  const VolterraWeights w = build_weights(field.alpha().value(), N, options);
  const ColumnSolver solver(w, grid.step(), field.dim());
  std::vector<Mat> Anodes(N + 1);
  for (std::size_t k = 0; k <= N; ++k) Anodes[k] = A(grid.node(k));
  double worst = 0.0;
  for (std::size_t j = 0; j <= N; ++j) {
    const std::size_t M = N - j;
    const std::size_t L = column_length(w, M);
    const std::vector<Mat> Acol = column_matrices(Anodes, j, L);
    std::vector<Mat> Fcol;
    Fcol.reserve(L + 1);
    for (std::size_t i = j; i <= N; ++i) Fcol.push_back(field.at(i, j));
    if (L > M) {
      const std::vector<double> ext = solver.solve(Acol, L, j);
      const auto ni = static_cast<Eigen::Index>(field.dim());
      const std::size_t nn = field.dim() * field.dim();
      for (std::size_t m = 0; m <= L; ++m) {
        const Mat Fe = Eigen::Map<const Mat>(ext.data() + m * nn, ni, ni);
        if (m <= M) {
          worst = std::max(worst, (Fe - Fcol[m]).cwiseAbs().maxCoeff());
        } else {
          Fcol.push_back(Fe);
        }
      }
    }
    worst = std::max(worst, solver.residual(Acol, Fcol));
  }
  return worst;
}

FieldConstants constants(const FundamentalMatrixField& field, double M_A, double f_bound, double R_x) {
  if (!(M_A >= 0.0) || !(f_bound >= 0.0) || !(R_x > 0.0)) throw DomainError("constants: invalid inputs");
  const TimeGrid& g = field.grid();
  FieldConstants c;
  for (std::size_t j = 0; j <= g.steps(); ++j) c.M_F = std::max(c.M_F, spectral_norm(field.at(g.steps(), j)));
  c.M_A = M_A;
  c.M_f = f_bound;
  c.R_x = R_x;
  const double a = field.alpha().value();
  c.R_z = (1.0 + c.M_F * M_A * std::pow(g.theta() - g.t0(), a) / a) * R_x;
  return c;
}

}  // namespace foc
