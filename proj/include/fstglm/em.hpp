#pragma once

// MAP-EM estimation for the Student-t / skew Student-t binary GLM with a
// Laplace prior written as a normal scale mixture with exponential variances.

#include "fstglm/dataset.hpp"
#include "fstglm/dist.hpp"
#include "fstglm/model.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

namespace fstglm {

struct PriorSpec {
  double gamma = 1.0;

  void validate() const;
  /// Rate of the marginal Laplace prior (sqrt(gamma)/2) exp(-sqrt(gamma)|beta|).
  double penalty_rate() const;
};

struct FitConfig {
  double delta_tol = 0.005;
  double eps_init = 1e-6;
  int max_iter = 500;
  double zero_threshold = 1e-10;
  bool intercept = false;

  void validate() const;
};

/// Per-iteration expectations feeding the M-step.
///   a_star:   E[lambda_i | y_i, beta]
///   w_star:   E[1/tau_j | beta_j, gamma]      (active coordinates only)
///   s_star:   E[lambda_i z_i] (symmetric) or E[lambda_i r_i] (skew)
///   psi_star: skew only, E[lambda_i psi(z_i - eta_i)], the score of the
///             complete-data term; used by the majorized skew update.
struct EStepQuantities {
  Eigen::VectorXd a_star;
  Eigen::VectorXd w_star;
  Eigen::VectorXd s_star;
  Eigen::VectorXd psi_star;
};

enum class UpdateKind { em, majorized };

struct FitTrace {
  int iterations = 0;
  std::vector<double> rel_change;  // entry 0 is NaN (initial point)
  std::vector<double> objective;
  std::vector<UpdateKind> update;  // entry 0 unused
  std::vector<int> active;         // active coordinates after each iteration
  bool converged = false;

  void write_csv(std::ostream& out) const;
  void write_csv(const std::string& path) const;
};

Eigen::VectorXd init_beta(const Dataset& data, double eps);

// Symmetric E-step, closed forms.
double e_lambda_sym(double eta, double nu, int y);
double e_lambdaz_sym(double eta, double nu, int y);

/// E[1/tau | beta, gamma] for tau ~ Exp with density (gamma/2) exp(-gamma tau/2)
/// and beta | tau ~ N(0, tau). Integrating tau out gives sqrt(gamma)/|beta|.
double e_tau_inv(double beta_j, double gamma, double zero_threshold = 1e-10);

/// Latent moments for the skew link, expressed through the recentred
/// variable r = eta + g(z - eta), g(u) = u/delta for u >= 0, u*delta for u < 0.
/// With that r the latent density is exp(-lambda (r - eta)^2 / 2) up to the
/// side weights, matching the skew-t marginal.
struct SkewMoments {
  double e_lambda;      // E[lambda | y]
  double e_lambda_r;    // E[lambda r | y]
  double e_lambda_psi;  // E[lambda psi(z - eta) | y], psi(u) = g(u) g'(u)
  double e_lambda_z;    // E[lambda z | y]
};

/// Reusable evaluator for the E-step at a fixed link.
class EStepKernel {
 public:
  explicit EStepKernel(const LinkSpec& link);

  const LinkSpec& link() const noexcept { return link_; }
  double e_lambda(double eta, int y) const;
  double e_lambda_s(double eta, int y) const;
  SkewMoments skew_moments(double eta, int y) const;

 private:
  double size_biased_cdf(double x) const;  // T_{nu+2}(x sqrt((nu+2)/nu))

  LinkSpec link_;
  StudentT t_;
  StudentT t2_;
  LinkFunction psi_;
  double scale2_;
};

double e_lambda_skew(double eta, const LinkSpec& link, int y);
double e_lambdar_skew(double eta, const LinkSpec& link, int y);

/// Solves (H^T A* H + W*) beta = H^T s* on the active coordinates; frozen
/// coordinates come back as exact zeros. `active` lists column indices of H
/// and must match the length of q.w_star. Throws Errc::numerical when the
/// system is not numerically positive definite.
Eigen::VectorXd m_step(const Eigen::MatrixXd& H, const EStepQuantities& q, const std::vector<int>& active);
/// All columns active.
Eigen::VectorXd m_step(const Eigen::MatrixXd& H, const EStepQuantities& q);

/// sum_i [y_i log Psi(x_i'beta) + (1-y_i) log(1-Psi(x_i'beta))] - penalty_rate * ||beta||_1
double penalized_objective(const Eigen::VectorXd& beta, const Dataset& data, const LinkSpec& link,
                           double penalty_rate);
double log_likelihood(const Eigen::VectorXd& beta, const Dataset& data, const LinkSpec& link);

struct FitResult {
  FittedModel model;
  FitTrace trace;
};

FitResult fit(const Dataset& data, const LinkSpec& link, const PriorSpec& prior, const FitConfig& config);

/// Adds a leading all-ones column named "(intercept)".
Dataset with_intercept(const Dataset& data);
inline constexpr const char* kInterceptName = "(intercept)";

}  // namespace fstglm
