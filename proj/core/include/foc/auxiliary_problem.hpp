#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "foc/fde_motion.hpp"
#include "foc/fundamental_matrix.hpp"
#include "foc/linalg.hpp"

namespace foc {

/// F(theta, t) f(t, u) / (theta - t)^{1-alpha}. Throws DomainError for t >= theta.
Vec f_star(double t, const Vec& u, const FundamentalMatrixField& F, const OriginalProblem& problem);

/// dz/dt = K f*(t, p) on [t0, terminal], cost sigma_aux(z(terminal)) + int chi.
/// Without a reduction K is the identity and sigma_aux is sigma.
class AuxiliaryProblem {
 public:
  AuxiliaryProblem(OriginalProblem problem, std::shared_ptr<const FundamentalMatrixField> F,
                   double terminal, bool reduce = true);

  /// Shifted problem on [t0, theta - eta].
  static AuxiliaryProblem shifted(OriginalProblem problem, std::shared_ptr<const FundamentalMatrixField> F,
                                  double eta, bool reduce = true);

  const OriginalProblem& original() const noexcept { return problem_; }
  const FundamentalMatrixField& field() const noexcept { return *F_; }
  std::shared_ptr<const FundamentalMatrixField> field_ptr() const noexcept { return F_; }
  const ControlSet& controls() const noexcept { return problem_.controls; }
  const TimeGrid& grid() const noexcept { return problem_.grid; }

  std::size_t dim() const noexcept { return static_cast<std::size_t>(K_.rows()); }
  bool reduced() const noexcept { return reduced_; }
  const Mat& K() const noexcept { return K_; }
  double terminal() const noexcept { return terminal_; }
  double eta() const noexcept { return problem_.grid.theta() - terminal_; }
  double t0() const noexcept { return problem_.grid.t0(); }
  double theta() const noexcept { return problem_.grid.theta(); }
  double alpha() const noexcept { return problem_.alpha.value(); }

  /// K f*(t, u).
  Vec f_star(double t, const Vec& u) const;
  /// K F(theta, t) f(t, u), the bounded factor of f*.
  Vec regular(double t, const Vec& u) const;
  /// int_a^b K f*(tau, u) dtau, regular factor linear on [a, b], weight integrated exactly.
  Vec increment(double a, double b, const Vec& u) const;

  double sigma_aux(const Vec& z) const;
  double chi(double t, const Vec& u) const { return problem_.chi(t, u); }

  /// Initial auxiliary state from an informational image: K (I - c), or I itself.
  Vec reduce_image(const Vec& image) const;

  /// Time layers: grid nodes strictly below terminal, then terminal.
  std::vector<double> layers() const;

 private:
  OriginalProblem problem_;
  std::shared_ptr<const FundamentalMatrixField> F_;
  double terminal_;
  bool reduced_;
  Mat K_;
  Vec c_;
};

/// Auxiliary motion sampled at t_from, the grid nodes strictly between, and t_to.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> z;
  const Vec& final() const { return z.back(); }
};

Trajectory solve_aux_motion(const AuxiliaryProblem& aux, const ControlSignal& p, double t_from,
                            double t_to, const Vec& z_from);

/// sigma_aux(z(terminal)) + trapezoidal int chi over [t0, terminal].
double cost_J_aux(const AuxiliaryProblem& aux, const Trajectory& z_traj, const ControlSignal& p);

/// p_eta on [t0, theta_eta), u_bar afterwards. The panel containing theta_eta keeps p_eta
/// when theta_eta lies in its right half and takes u_bar otherwise.
ControlSignal splice_control(const ControlSignal& p_eta, double theta_eta, const Vec& u_bar);

/// Modulus of continuity of the terminal cost on B(M_z).
struct SigmaModulus {
  enum class Kind { Lipschitz, Constant, Sampled };
  Kind kind = Kind::Sampled;
  double lipschitz = 0.0;
  std::function<double(const Vec&)> sigma;
  std::size_t dim = 1;
  std::size_t pairs = 4000;
  std::uint64_t seed = 1;
  double safety = 2.0;

  static SigmaModulus with_lipschitz(double L);
  static SigmaModulus constant();
  static SigmaModulus sampled(std::function<double(const Vec&)> sigma, std::size_t dim, std::uint64_t seed);
};

struct BudgetConstants {
  double M_F = 0.0;
  double M_f = 0.0;
  double M_A = 0.0;
  double M_chi = 0.0;
  double R_x = 0.0;
  double alpha = 0.5;
  double horizon = 1.0;  ///< theta - t0
  double K_norm = 1.0;   ///< ||K|| under a reduction
  double Kc_norm = 0.0;  ///< ||K c|| under a reduction
};

struct EpsilonBudget {
  double epsilon = 0.0;
  double eta_star = 0.0;
  double eps_star = 0.0;
  double zeta = 0.0;  ///< +inf when sigma is constant
  double M_z = 0.0;
  double M_chi = 0.0;
  double eta1 = 0.0;
  double eta2 = 0.0;
};

/// Reachable radius R_z' + ||K|| M_F M_f (theta - t0)^alpha / alpha of the auxiliary state.
double reachable_radius(const BudgetConstants& c);

EpsilonBudget epsilon_budget(double epsilon, const BudgetConstants& constants, const SigmaModulus& modulus);

/// Constants of a problem and its solved field.
BudgetConstants budget_constants(const OriginalProblem& problem, const FundamentalMatrixField& F);

}  // namespace foc
