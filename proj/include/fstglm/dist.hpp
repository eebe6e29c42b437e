#pragma once

// Normal, Student-t and two-piece skew Student-t distributions. These
// define the link function Psi = T_{nu,delta} and every E-step expectation.

#include "fstglm/rng.hpp"

#include <string>

namespace fstglm {

enum class LinkFamily { symmetric, skew };

std::string to_string(LinkFamily family);
LinkFamily link_family_from_string(const std::string& name);

/// Degrees of freedom and skewness of the link. A symmetric link always has
/// delta == 1; a skew link with delta == 1 behaves exactly like a symmetric one.
struct LinkSpec {
  LinkFamily family = LinkFamily::symmetric;
  double nu = 8.0;
  double delta = 1.0;

  static LinkSpec symmetric(double nu);
  static LinkSpec skew(double nu, double delta);

  void validate() const;
  bool collapses_to_symmetric() const noexcept { return delta == 1.0; }

  friend bool operator==(const LinkSpec&, const LinkSpec&) = default;
};

struct SkewTParams {
  double mode = 0.0;
  double nu = 8.0;
  double delta = 1.0;

  void validate() const;
};

// Probabilities returned by the cdf-type functions below are clamped into
// [kProbFloor, kProbCeil] so ratios and logs downstream stay finite.
inline constexpr double kProbFloor = 1e-300;
inline constexpr double kProbCeil = 1.0 - 1e-16;
double clamp_probability(double p);

double std_normal_pdf(double x);
double std_normal_cdf(double x);

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
/// `y` must equal 1 - x; passing it separately keeps precision near x = 1.
double incomplete_beta(double a, double b, double x, double y);

/// Student-t with cached normalizing constants. cdf and sf are both computed
/// from the tail that does not cancel, so each keeps relative accuracy far
/// into its own tail.
class StudentT {
 public:
  explicit StudentT(double nu);

  double nu() const noexcept { return nu_; }
  double pdf(double x) const;
  double cdf(double x) const;
  double sf(double x) const { return cdf(-x); }

 private:
  double nu_;
  double log_pdf_norm_;
  double log_beta_;
};

double student_t_pdf(double x, double nu);
double student_t_cdf(double x, double nu);
double student_t_quantile(double p, double nu);

/// Skew Student-t. For u = z - mode the density is
///   2/(delta + 1/delta) * t_nu(u/delta)   for u >= 0,
///   2/(delta + 1/delta) * t_nu(u*delta)   for u <  0,
/// which puts mass 1/(delta^2+1) below the mode.
class SkewT {
 public:
  SkewT(double nu, double delta);

  double nu() const noexcept { return t_.nu(); }
  double delta() const noexcept { return delta_; }
  const StudentT& base() const noexcept { return t_; }

  double pdf(double u) const;
  /// P(U <= u) for the mode-0 variable.
  double cdf(double u) const;
  /// P(U > u) for the mode-0 variable.
  double sf(double u) const;

 private:
  StudentT t_;
  double delta_;
  double w_lower_;  // 2 / (delta^2 + 1)
  double w_upper_;  // 2 delta^2 / (delta^2 + 1)
};

double skew_t_pdf(double z, const SkewTParams& params);
double skew_t_cdf(double z, const SkewTParams& params);

/// Link function Psi(eta) = P(Z > 0) for Z skew-t with mode eta.
double skew_t_link(double eta, const LinkSpec& link);
/// 1 - Psi(eta), evaluated without cancellation.
double skew_t_link_complement(double eta, const LinkSpec& link);

/// Evaluator for Psi and 1 - Psi with cached constants.
class LinkFunction {
 public:
  explicit LinkFunction(const LinkSpec& link);

  const LinkSpec& spec() const noexcept { return spec_; }
  double operator()(double eta) const { return prob(eta); }
  double prob(double eta) const;
  double complement(double eta) const;

 private:
  LinkSpec spec_;
  SkewT skew_;
};

struct LatentDraw {
  double lambda;
  double z;
};

/// Draws lambda ~ Gamma(nu/2, scale 2/nu), then z from the skew normal with
/// precision lambda and mode params.mode: with probability delta^2/(delta^2+1)
/// z = mode + delta|N|/sqrt(lambda), otherwise z = mode - |N|/(delta sqrt(lambda)).
/// Marginally z follows skew_t_pdf(., params).
LatentDraw sample_latent(const SkewTParams& params, CounterRng& rng);

}  // namespace fstglm
