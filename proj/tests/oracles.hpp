#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's closed-form expectations: the symmetric moments come from
// numerical integration over the gamma mixing variable, the skew moments from
// Monte Carlo over the latent hierarchy, and the prior weight from direct
// integration over the exponential variance.

#include "fstglm/dist.hpp"
#include "fstglm/rng.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>
#include <vector>

namespace oracle {

inline double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }
inline double Phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Gamma(nu/2, rate nu/2) density of the precision lambda.
inline double gamma_density(double lambda, double nu) {
  const double a = 0.5 * nu;
  return std::exp(a * std::log(a) + (a - 1.0) * std::log(lambda) - a * lambda - std::lgamma(a));
}

// E[h(lambda)] for lambda ~ Gamma(nu/2, rate nu/2). The range is split at 1.
// Below 1 the substitution lambda = s^2 turns the lambda^(nu/2 - 1)
// singularity into the integrable power s^(nu - 1), evaluated in log form.
template <class H>
double expect_lambda(double nu, H h) {
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  const double a = 0.5 * nu;
  const double log_c = a * std::log(a) - std::lgamma(a);
  auto inner = [&](double s) {
    if (s <= 0.0) return 0.0;
    return std::exp(std::log(2.0) + log_c + (2.0 * a - 1.0) * std::log(s) - a * s * s) * h(s * s);
  };
  auto outer = [&](double l) { return gamma_density(l, nu) * h(l); };
  return ts.integrate(inner, 0.0, 1.0) + es.integrate(outer, 1.0, std::numeric_limits<double>::infinity());
}

struct SymMoments {
  double e_lambda;
  double e_lambda_z;
};

// Z | lambda ~ N(eta, 1/lambda); y = 1 means Z > 0.
inline SymMoments symmetric_moments(double eta, double nu, int y) {
  const double sgn = y == 1 ? 1.0 : -1.0;
  auto prob = [&](double l) { return Phi(sgn * eta * std::sqrt(l)); };
  auto lam = [&](double l) { return l * Phi(sgn * eta * std::sqrt(l)); };
  // E[lambda Z 1{event} | lambda] = lambda eta Phi(s eta sqrt(l)) + s sqrt(l) phi(eta sqrt(l))
  auto lamz = [&](double l) {
    const double r = std::sqrt(l);
    return l * eta * Phi(sgn * eta * r) + sgn * r * phi(eta * r);
  };
  const double p = expect_lambda(nu, prob);
  return {expect_lambda(nu, lam) / p, expect_lambda(nu, lamz) / p};
}

// E[1/tau | beta] under tau ~ (gamma/2) exp(-gamma tau / 2), beta | tau ~ N(0, tau).
inline double tau_inverse(double beta, double gamma) {
  boost::math::quadrature::exp_sinh<double> es;
  auto joint = [&](double tau) {
    return 0.5 * gamma * std::exp(-0.5 * gamma * tau) * std::exp(-0.5 * beta * beta / tau) / std::sqrt(2.0 * M_PI * tau);
  };
  const double num = es.integrate([&](double t) { return joint(t) / t; }, 0.0, std::numeric_limits<double>::infinity());
  const double den = es.integrate(joint, 0.0, std::numeric_limits<double>::infinity());
  return num / den;
}

// Skew-t density of the latent variable with mode 0, straight from its
// two-piece definition (used as the quadrature integrand).
inline double skew_density(double u, double nu, double delta) {
  boost::math::students_t_distribution<double> t(nu);
  const double k = 2.0 / (delta + 1.0 / delta);
  return u >= 0.0 ? k * boost::math::pdf(t, u / delta) : k * boost::math::pdf(t, u * delta);
}

struct Estimate {
  double value = 0.0;
  double se = 0.0;
  bool within(double x, double k = 4.0) const { return std::abs(x - value) <= k * se; }
};

struct SkewEstimate {
  Estimate e_lambda, e_lambda_r, e_lambda_psi, e_lambda_z;
  Estimate prob;  // P(event)
};

// Gamma draws shared across every (eta, y, delta) evaluated at one nu.
inline std::vector<double> lambda_draws(double nu, std::size_t n, std::uint64_t seed) {
  fstglm::CounterRng rng(seed, "oracle/lambda");
  std::vector<double> out(n);
  for (auto& l : out) l = rng.gamma(0.5 * nu, 2.0 / nu);
  return out;
}

// Rao-Blackwellised Monte Carlo: for each lambda draw the conditional
// expectations over the two-piece normal latent are exact, so the estimate
// stays informative even when the conditioning event is rare. Ratios get
// delta-method standard errors.
inline SkewEstimate skew_moments_mc(double eta, double delta, int y, const std::vector<double>& lambdas) {
  const double p_up = delta * delta / (delta * delta + 1.0);
  const double p_lo = 1.0 - p_up;
  const std::size_t n = lambdas.size();

  // Half-normal h >= 0 (density 2 phi): mass and first moment on [lo, inf) or [0, hi).
  auto tail = [](double lo, double& m0, double& m1) {
    lo = std::max(lo, 0.0);
    m0 = 2.0 * (1.0 - Phi(lo));
    m1 = 2.0 * phi(lo);
  };
  auto head = [](double hi, double& m0, double& m1) {
    if (hi <= 0.0) {
      m0 = m1 = 0.0;
      return;
    }
    m0 = 2.0 * (Phi(hi) - 0.5);
    m1 = 2.0 * (phi(0.0) - phi(hi));
  };

  std::vector<double> P(n), L(n), G(n), S(n), U(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double l = lambdas[i];
    const double r = std::sqrt(l);
    double up0, up1, lo0, lo1;
    // Upper side: u = delta h / r; lower side: u = -h / (delta r).
    if (y == 1) {
      tail(-eta * r / delta, up0, up1);
      if (eta > 0.0) head(eta * delta * r, lo0, lo1);
      else lo0 = lo1 = 0.0;
    } else {
      if (eta < 0.0) head(-eta * r / delta, up0, up1);
      else up0 = up1 = 0.0;
      tail(eta * delta * r, lo0, lo1);
    }
    P[i] = p_up * up0 + p_lo * lo0;
    L[i] = l * P[i];
    // g(u) = h / r on the upper side and -h / r on the lower side.
    G[i] = l * (p_up * up1 - p_lo * lo1) / r;
    // psi(u) = g(u) g'(u)
    S[i] = l * (p_up * up1 / delta - p_lo * lo1 * delta) / r;
    // u itself
    U[i] = l * (p_up * up1 * delta - p_lo * lo1 / delta) / r;
  }

  // Long double sums; at eta = 0 the event probability does not depend on
  // lambda, so the sampling error vanishes and only rounding is left.
  auto mean = [&](const std::vector<double>& v) {
    long double s = 0.0L;
    for (double x : v) s += x;
    return static_cast<double>(s / static_cast<long double>(n));
  };
  auto with_rounding = [](double se, double value) {
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(value);
    return std::sqrt(se * se + floor * floor);
  };
  const double mp = mean(P);
  auto ratio = [&](const std::vector<double>& num, double shift_coef) {
    // Estimates E[num]/E[P] + shift_coef * E[L]/E[P] jointly.
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = num[i] + shift_coef * L[i];
    const double R = mean(x) / mp;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = x[i] - R * P[i];
      ss += d * d;
    }
    const double var = ss / static_cast<double>(n - 1);
    return Estimate{R, with_rounding(std::sqrt(var / static_cast<double>(n)) / mp, R)};
  };

  SkewEstimate out;
  double ssp = 0.0;
  for (double p : P) ssp += (p - mp) * (p - mp);
  out.prob = {mp, with_rounding(std::sqrt(ssp / static_cast<double>(n - 1) / static_cast<double>(n)), mp)};
  out.e_lambda = ratio(L, 0.0);
  out.e_lambda_r = ratio(G, eta);
  out.e_lambda_psi = ratio(S, 0.0);
  out.e_lambda_z = ratio(U, eta);
  return out;
}

// Plain rejection sampling through the library's latent sampler: keep draws
// whose sign matches y and average lambda, lambda r and lambda z.
inline SkewEstimate skew_moments_rejection(double eta, double nu, double delta, int y, std::size_t draws,
                                           std::uint64_t seed) {
  fstglm::CounterRng rng(seed, "oracle/rejection");
  const fstglm::SkewTParams params{eta, nu, delta};
  std::vector<double> lam, lr, lz;
  std::size_t total = 0;
  for (std::size_t k = 0; k < draws; ++k) {
    const auto d = fstglm::sample_latent(params, rng);
    ++total;
    if ((d.z > 0.0) != (y == 1)) continue;
    const double u = d.z - eta;
    const double g = u >= 0.0 ? u / delta : u * delta;
    lam.push_back(d.lambda);
    lr.push_back(d.lambda * (eta + g));
    lz.push_back(d.lambda * d.z);
  }
  auto est = [](const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    double m = 0.0;
    for (double x : v) m += x;
    m /= n;
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return Estimate{m, std::sqrt(ss / (n - 1.0) / n)};
  };
  SkewEstimate out;
  const double acc = static_cast<double>(lam.size()) / static_cast<double>(total);
  out.prob = {acc, std::sqrt(acc * (1.0 - acc) / static_cast<double>(total))};
  if (lam.size() >= 2) {
    out.e_lambda = est(lam);
    out.e_lambda_r = est(lr);
    out.e_lambda_z = est(lz);
  }
  return out;
}

}  // namespace oracle
