#include "fstglm/curves.hpp"

#include "fstglm/dataset.hpp"
#include "fstglm/error.hpp"

#include <cmath>
#include <fstream>

namespace fstglm {
namespace {

// Integer-indexed grids avoid drift from repeated addition.
template <class Fn>
Curve tabulate(double lo, double step, int count, Fn&& fn) {
  Curve c;
  for (int i = 0; i < count; ++i) {
    const double x = lo + step * i;
    c.x.push_back(x);
    c.y.push_back(fn(x));
  }
  return c;
}

}  // namespace

void Curve::write_csv(std::ostream& out) const {
  out << x_name << ',' << y_name << '\n';
  for (std::size_t i = 0; i < x.size(); ++i) out << format_double(x[i]) << ',' << format_double(y[i]) << '\n';
}

void Curve::write_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io, "cannot open '" + path + "' for writing");
  write_csv(out);
}

Curve link_curve(const LinkSpec& link) {
  link.validate();
  const LinkFunction psi(link);
  return tabulate(-6.0, 0.05, 241, [&](double x) { return psi.prob(x); });
}

Curve qq_curve(double nu) {
  require(nu > 0.0, "nu must be positive");
  Curve c;
  c.x_name = "q_logistic";
  c.y_name = "q_t";
  for (int i = 1; i <= 1999; ++i) {
    const double p = 0.0005 * i;
    c.x.push_back(std::log(p / (1.0 - p)));
    c.y.push_back(student_t_quantile(p, nu));
  }
  return c;
}

Curve hyperprior_curve(double gamma) {
  require(gamma > 0.0 && std::isfinite(gamma), "gamma must be positive");
  Curve c = tabulate(0.0, 0.05, 201, [&](double tau) { return 0.5 * gamma * std::exp(-0.5 * gamma * tau); });
  c.x_name = "tau";
  return c;
}

Curve skewpdf_curve(double nu, double delta) {
  const SkewTParams params{0.0, nu, delta};
  params.validate();
  return tabulate(-6.0, 0.05, 241, [&](double x) { return skew_t_pdf(x, params); });
}

Curve make_curve(const std::string& kind, double nu, double delta, double gamma) {
  if (kind == "link") return link_curve(delta == 1.0 ? LinkSpec::symmetric(nu) : LinkSpec::skew(nu, delta));
  if (kind == "qq") return qq_curve(nu);
  if (kind == "hyperprior") return hyperprior_curve(gamma);
  if (kind == "skewpdf") return skewpdf_curve(nu, delta);
  fail(Errc::invalid_argument, "unknown curve kind '" + kind + "' (expected link, qq, hyperprior or skewpdf)");
}

double r_squared(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "r_squared needs two equal-length series");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy * sxy / (sxx * syy);
}

}  // namespace fstglm
