#include "fstglm/dist.hpp"

#include "fstglm/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace fstglm {
namespace {

double log_gamma(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double log_beta(double a, double b) { return log_gamma(a) + log_gamma(b) - log_gamma(a + b); }

void check_finite(double x, const char* what) {
  if (!std::isfinite(x)) fail(Errc::invalid_argument, std::string(what) + ": non-finite argument");
}

void check_nu(double nu) {
  if (!(nu > 0.0) || !std::isfinite(nu))
    fail(Errc::invalid_argument, "degrees of freedom must be a positive finite number");
}

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 20000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  fail(Errc::numerical, "incomplete beta continued fraction did not converge");
}

double incomplete_beta_impl(double a, double b, double x, double y, double lbeta) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    const double front = std::exp(a * std::log(x) + b * std::log(y) - lbeta) / a;
    return front * beta_continued_fraction(a, b, x);
  }
  const double front = std::exp(b * std::log(y) + a * std::log(x) - lbeta) / b;
  return 1.0 - front * beta_continued_fraction(b, a, y);
}

}  // namespace

std::string to_string(LinkFamily family) {
  return family == LinkFamily::symmetric ? "symmetric" : "skew";
}

LinkFamily link_family_from_string(const std::string& name) {
  if (name == "symmetric") return LinkFamily::symmetric;
  if (name == "skew") return LinkFamily::skew;
  fail(Errc::invalid_argument, "unknown link family '" + name + "'");
}

LinkSpec LinkSpec::symmetric(double nu) {
  LinkSpec s{LinkFamily::symmetric, nu, 1.0};
  s.validate();
  return s;
}

LinkSpec LinkSpec::skew(double nu, double delta) {
  LinkSpec s{LinkFamily::skew, nu, delta};
  s.validate();
  return s;
}

void LinkSpec::validate() const {
  check_nu(nu);
  if (!(delta > 0.0) || !std::isfinite(delta))
    fail(Errc::invalid_argument, "skewness delta must be a positive finite number");
  if (family == LinkFamily::symmetric && delta != 1.0)
    fail(Errc::invalid_argument, "symmetric link requires delta == 1");
}

void SkewTParams::validate() const {
  check_finite(mode, "skew-t mode");
  LinkSpec{LinkFamily::skew, nu, delta}.validate();
}

double clamp_probability(double p) {
  if (!(p >= kProbFloor)) return kProbFloor;  // also catches NaN
  return std::min(p, kProbCeil);
}

double std_normal_pdf(double x) {
  check_finite(x, "std_normal_pdf");
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double std_normal_cdf(double x) {
  check_finite(x, "std_normal_cdf");
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double incomplete_beta(double a, double b, double x, double y) {
  if (!(a > 0.0) || !(b > 0.0)) fail(Errc::invalid_argument, "incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) fail(Errc::invalid_argument, "incomplete beta needs x in [0, 1]");
  return incomplete_beta_impl(a, b, x, y, log_beta(a, b));
}

StudentT::StudentT(double nu) : nu_(nu) {
  check_nu(nu);
  log_beta_ = log_beta(0.5 * nu, 0.5);
  log_pdf_norm_ = log_gamma(0.5 * (nu + 1.0)) - log_gamma(0.5 * nu) - 0.5 * std::log(nu * std::numbers::pi);
}

double StudentT::pdf(double x) const {
  check_finite(x, "student_t_pdf");
  return std::exp(log_pdf_norm_ - 0.5 * (nu_ + 1.0) * std::log1p(x * x / nu_));
}

double StudentT::cdf(double x) const {
  check_finite(x, "student_t_cdf");
  // Lower tail: T(-|x|) = I_{nu/(nu+x^2)}(nu/2, 1/2) / 2.
  const double x2 = x * x;
  const double denom = nu_ + x2;
  const double lower = 0.5 * incomplete_beta_impl(0.5 * nu_, 0.5, nu_ / denom, x2 / denom, log_beta_);
  return x <= 0.0 ? lower : 1.0 - lower;
}

double student_t_pdf(double x, double nu) { return StudentT(nu).pdf(x); }
double student_t_cdf(double x, double nu) { return StudentT(nu).cdf(x); }

double student_t_quantile(double p, double nu) {
  if (!(p > 0.0 && p < 1.0)) fail(Errc::invalid_argument, "quantile probability must lie in (0, 1)");
  const StudentT t(nu);
  if (p == 0.5) return 0.0;
  // Bracket, then Newton steps guarded by bisection.
  double lo = -1.0, hi = 1.0;
  while (t.cdf(lo) > p) lo *= 2.0;
  while (t.cdf(hi) < p) hi *= 2.0;
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double f = t.cdf(x) - p;
    if (f > 0.0) hi = x; else lo = x;
    double next = x - f / t.pdf(x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-15 * std::max(1.0, std::abs(x))) return next;
    x = next;
  }
  return x;
}

SkewT::SkewT(double nu, double delta) : t_(nu), delta_(delta) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    fail(Errc::invalid_argument, "skewness delta must be a positive finite number");
  const double d2 = delta * delta;
  w_lower_ = 2.0 / (d2 + 1.0);
  w_upper_ = 2.0 * d2 / (d2 + 1.0);
}

double SkewT::pdf(double u) const {
  const double k = 2.0 / (delta_ + 1.0 / delta_);
  return u >= 0.0 ? k * t_.pdf(u / delta_) : k * t_.pdf(u * delta_);
}

double SkewT::cdf(double u) const {
  if (u < 0.0) return w_lower_ * t_.cdf(u * delta_);
  return 1.0 - w_upper_ * t_.sf(u / delta_);
}

double SkewT::sf(double u) const {
  if (u >= 0.0) return w_upper_ * t_.sf(u / delta_);
  return 1.0 - w_lower_ * t_.cdf(u * delta_);
}

double skew_t_pdf(double z, const SkewTParams& params) {
  params.validate();
  check_finite(z, "skew_t_pdf");
  const double u = z - params.mode;
  if (params.delta == 1.0) return student_t_pdf(u, params.nu);
  return SkewT(params.nu, params.delta).pdf(u);
}

double skew_t_cdf(double z, const SkewTParams& params) {
  params.validate();
  check_finite(z, "skew_t_cdf");
  const double u = z - params.mode;
  if (params.delta == 1.0) return student_t_cdf(u, params.nu);
  return SkewT(params.nu, params.delta).cdf(u);
}

LinkFunction::LinkFunction(const LinkSpec& link) : spec_(link), skew_(link.nu, link.delta) {
  link.validate();
}

double LinkFunction::prob(double eta) const {
  if (spec_.collapses_to_symmetric()) return clamp_probability(skew_.base().cdf(eta));
  return clamp_probability(skew_.sf(-eta));
}

double LinkFunction::complement(double eta) const {
  if (spec_.collapses_to_symmetric()) return clamp_probability(skew_.base().sf(eta));
  return clamp_probability(skew_.cdf(-eta));
}

double skew_t_link(double eta, const LinkSpec& link) { return LinkFunction(link).prob(eta); }

double skew_t_link_complement(double eta, const LinkSpec& link) {
  return LinkFunction(link).complement(eta);
}

LatentDraw sample_latent(const SkewTParams& params, CounterRng& rng) {
  params.validate();
  const double lambda = rng.gamma(0.5 * params.nu, 2.0 / params.nu);
  const double d2 = params.delta * params.delta;
  const bool upper = rng.uniform() < d2 / (d2 + 1.0);
  const double magnitude = std::abs(rng.normal()) / std::sqrt(lambda);
  const double z = upper ? params.mode + params.delta * magnitude
                         : params.mode - magnitude / params.delta;
  return {lambda, z};
}

}  // namespace fstglm
