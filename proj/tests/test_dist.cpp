#include "fstglm/dist.hpp"
#include "fstglm/error.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>

using namespace fstglm;
using doctest::Approx;

namespace {

double integrate_skew(double lo, double hi, double nu, double delta) {
  using boost::math::quadrature::exp_sinh;
  using boost::math::quadrature::gauss_kronrod;
  auto f = [&](double u) { return oracle::skew_density(u, nu, delta); };
  if (std::isinf(lo) && std::isinf(hi)) {
    exp_sinh<double> es;
    return es.integrate([&](double u) { return f(-u); }, 0.0, std::numeric_limits<double>::infinity()) +
           es.integrate(f, 0.0, std::numeric_limits<double>::infinity());
  }
  if (std::isinf(lo)) {
    // Split at the kink so each piece is smooth.
    if (hi > 0.0) return integrate_skew(lo, 0.0, nu, delta) + gauss_kronrod<double, 61>::integrate(f, 0.0, hi, 15, 1e-14);
    exp_sinh<double> es;
    return es.integrate([&](double u) { return f(hi - u); }, 0.0, std::numeric_limits<double>::infinity());
  }
  return gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-14);
}

}  // namespace

TEST_CASE("standard normal values") {
  CHECK(std_normal_cdf(0.0) == 0.5);
  CHECK(std_normal_pdf(0.0) == Approx(0.3989422804014327).epsilon(1e-15));
  CHECK(std::abs(std_normal_cdf(1.96) - 0.9750021048517795) < 1e-12);
  for (double x = -8.0; x <= 8.0; x += 0.37) {
    CHECK(std::abs(std_normal_cdf(x) - oracle::Phi(x)) < 1e-12);
    CHECK(std::abs(std_normal_pdf(x) - oracle::phi(x)) < 1e-15);
  }
  CHECK_THROWS_AS(std_normal_cdf(std::numeric_limits<double>::quiet_NaN()), Error);
  CHECK_THROWS_AS(std_normal_pdf(std::numeric_limits<double>::infinity()), Error);
}

TEST_CASE("student t values") {
  CHECK(student_t_cdf(0.0, 3.7) == 0.5);
  CHECK(std::abs(student_t_cdf(1.0, 1.0) - 0.75) < 1e-14);
  CHECK(student_t_pdf(0.0, 1.0) == Approx(1.0 / M_PI).epsilon(1e-14));
  CHECK_THROWS_AS(student_t_cdf(0.0, 0.0), Error);
  CHECK_THROWS_AS(student_t_pdf(0.0, -1.0), Error);
}

TEST_CASE("student t cdf accuracy against boost over the documented range") {
  double worst = 0.0;
  for (double nu : {0.5, 1.0, 2.5, 8.0, 30.0, 200.0}) {
    boost::math::students_t_distribution<double> ref(nu);
    for (double x = -50.0; x <= 50.0; x += 0.731) {
      const double got = student_t_cdf(x, nu);
      worst = std::max(worst, std::abs(got - boost::math::cdf(ref, x)));
      CHECK(std::abs(got + student_t_cdf(-x, nu) - 1.0) < 1e-14);
      CHECK(std::abs(student_t_pdf(x, nu) - boost::math::pdf(ref, x)) < 1e-13);
    }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("student t quantile inverts the cdf") {
  for (double nu : {1.0, 8.0, 30.0})
    for (double p : {0.0005, 0.01, 0.3, 0.5, 0.9, 0.9995}) CHECK(student_t_cdf(student_t_quantile(p, nu), nu) == Approx(p).epsilon(1e-10));
}

TEST_CASE("skew t density reduces to the t density at delta 1") {
  for (double z = -6.0; z <= 6.0; z += 0.25)
    CHECK(skew_t_pdf(z, {0.0, 8.0, 1.0}) == student_t_pdf(z, 8.0));
}

TEST_CASE("skew t density integrates to one with the documented mass split") {
  for (double nu : {1.0, 4.0, 30.0}) {
    for (double delta : {0.5, 1.0, 2.0, 5.0}) {
      CHECK(std::abs(integrate_skew(-INFINITY, INFINITY, nu, delta) - 1.0) < 1e-8);
      CHECK(std::abs(integrate_skew(-INFINITY, 0.0, nu, delta) - 1.0 / (delta * delta + 1.0)) < 1e-8);
    }
  }
  // Mass below the mode for delta = 2 is 0.2.
  CHECK(std::abs(integrate_skew(-INFINITY, 0.0, 8.0, 2.0) - 0.2) < 1e-8);
}

TEST_CASE("skew t density agrees with the oracle and peaks at its mode") {
  const SkewTParams p{1.3, 4.0, 0.5};
  double best_z = 0.0, best = -1.0;
  for (double z = -2.0; z <= 4.0; z += 0.001) {
    const double v = skew_t_pdf(z, p);
    CHECK(std::abs(v - oracle::skew_density(z - 1.3, 4.0, 0.5)) < 1e-14);
    if (v > best) best = v, best_z = z;
  }
  CHECK(best_z == Approx(1.3).epsilon(1e-9));
  CHECK_THROWS_AS(skew_t_pdf(0.0, {0.0, 4.0, 0.0}), Error);
}

TEST_CASE("skew t cdf matches quadrature of the density") {
  for (double delta : {0.5, 2.0}) {
    for (double u : {-3.0, -0.4, 0.0, 0.7, 2.5}) {
      const double ref = integrate_skew(-INFINITY, u, 6.0, delta);
      CHECK(std::abs(skew_t_cdf(u, {0.0, 6.0, delta}) - ref) < 1e-9);
    }
  }
}

TEST_CASE("link values") {
  CHECK(skew_t_link(0.0, LinkSpec::symmetric(8.0)) == 0.5);
  CHECK(std::abs(skew_t_link(0.0, LinkSpec::skew(8.0, 2.0)) - 0.8) < 1e-14);
  // The closed-form link against quadrature of the latent density.
  for (double eta : {-2.0, -0.5, 0.3, 1.7}) {
    const double ref = 1.0 - integrate_skew(-INFINITY, -eta, 8.0, 2.0);
    CHECK(std::abs(skew_t_link(eta, LinkSpec::skew(8.0, 2.0)) - ref) < 1e-9);
  }
  for (double eta = -5.0; eta <= 5.0; eta += 0.1) {
    CHECK(skew_t_link(eta, LinkSpec::skew(8.0, 1.0)) == student_t_cdf(eta, 8.0));
    CHECK(skew_t_link(eta, LinkSpec::symmetric(8.0)) == student_t_cdf(eta, 8.0));
  }
}

TEST_CASE("link is strictly increasing and complements sum to one") {
  for (double delta : {0.1, 0.5, 1.0, 2.0, 10.0}) {
    const LinkFunction psi(LinkSpec::skew(3.0, delta));
    double prev = 0.0;
    for (double eta = -6.0; eta <= 6.0; eta += 0.01) {
      const double v = psi.prob(eta);
      CHECK(v > prev);
      CHECK(v > 0.0);
      CHECK(v < 1.0);
      CHECK(std::abs(v + psi.complement(eta) - 1.0) < 1e-14);
      prev = v;
    }
  }
}

TEST_CASE("link probabilities are clamped away from 0 and 1") {
  const LinkSpec l = LinkSpec::symmetric(30.0);
  CHECK(skew_t_link(-1e6, l) >= kProbFloor);
  CHECK(skew_t_link(1e6, l) <= kProbCeil);
  CHECK(std::isfinite(std::log(skew_t_link_complement(1e6, l))));
}

TEST_CASE("link spec invariants") {
  CHECK_THROWS_AS(LinkSpec::symmetric(0.0), Error);
  CHECK_THROWS_AS(LinkSpec::skew(1.0, -2.0), Error);
  LinkSpec bad = LinkSpec::symmetric(2.0);
  bad.delta = 2.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK(link_family_from_string(to_string(LinkFamily::skew)) == LinkFamily::skew);
  CHECK_THROWS_AS(link_family_from_string("logit"), Error);
}

TEST_CASE("t approaches the normal as nu grows") {
  auto gap = [](double nu) {
    double g = 0.0;
    for (double x = -4.0; x <= 4.0; x += 0.001) g = std::max(g, std::abs(student_t_cdf(x, nu) - std_normal_cdf(x)));
    return g;
  };
  const double g15 = gap(15.0), g30 = gap(30.0), g100 = gap(100.0);
  CHECK(g30 < g15);
  CHECK(g100 < g30);
  CHECK(g30 < 0.01);
}

TEST_CASE("latent sampler") {
  SUBCASE("symmetric mean is zero") {
    CounterRng rng(11, "test/latent");
    const int n = 1000000;
    double s = 0.0, ss = 0.0;
    for (int i = 0; i < n; ++i) {
      const double z = sample_latent({0.0, 8.0, 1.0}, rng).z;
      s += z;
      ss += z * z;
    }
    const double mean = s / n;
    const double se = std::sqrt((ss / n - mean * mean) / n);
    CHECK(std::abs(mean) < 4.0 * se);
  }
  SUBCASE("upper-tail frequency matches the cdf") {
    CounterRng rng(12, "test/latent");
    const int n = 1000000;
    int hits = 0;
    for (int i = 0; i < n; ++i) hits += sample_latent({1.0, 30.0, 1.0}, rng).z > 0.0;
    const double p = student_t_cdf(1.0, 30.0);
    CHECK(std::abs(static_cast<double>(hits) / n - p) < 4.0 * std::sqrt(p * (1.0 - p) / n));
  }
  SUBCASE("skew draws follow the skew cdf") {
    const int n = 400000;
    const SkewTParams p{0.5, 4.0, 2.0};
    for (double q : {-1.0, 0.5, 2.0}) {
      int hits = 0;
      CounterRng r2(13, "test/latent");
      for (int i = 0; i < n; ++i) hits += sample_latent(p, r2).z <= q;
      const double ref = skew_t_cdf(q, p);
      CHECK(std::abs(static_cast<double>(hits) / n - ref) < 4.0 * std::sqrt(ref * (1.0 - ref) / n));
    }
  }
  SUBCASE("same seed, same stream") {
    CounterRng a(99, "x"), b(99, "x");
    for (int i = 0; i < 1000; ++i) {
      const auto da = sample_latent({0.2, 3.0, 0.7}, a);
      const auto db = sample_latent({0.2, 3.0, 0.7}, b);
      CHECK(da.z == db.z);
      CHECK(da.lambda == db.lambda);
    }
  }
}

TEST_CASE("gamma draws have the right mean and variance") {
  CounterRng rng(5, "test/gamma");
  for (double nu : {1.0, 8.0}) {
    const int n = 400000;
    double s = 0.0, ss = 0.0;
    for (int i = 0; i < n; ++i) {
      const double l = rng.gamma(nu / 2.0, 2.0 / nu);
      s += l;
      ss += l * l;
    }
    const double mean = s / n, var = ss / n - mean * mean;
    CHECK(std::abs(mean - 1.0) < 4.0 * std::sqrt(2.0 / nu / n));
    CHECK(var == Approx(2.0 / nu).epsilon(0.05));
  }
}

TEST_CASE("counter rng streams are reproducible and distinct") {
  CounterRng a(1, "alpha"), b(1, "alpha"), c(1, "beta"), d(2, "alpha");
  int same_c = 0, same_d = 0;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    same_c += x == c.next_u64();
    same_d += x == d.next_u64();
  }
  CHECK(same_c == 0);
  CHECK(same_d == 0);
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}
