#pragma once

// Plot-point tables for the link, quantile, hyperprior and skew-density figures.

#include "fstglm/dist.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace fstglm {

struct Curve {
  std::string x_name = "x";
  std::string y_name = "value";
  std::vector<double> x;
  std::vector<double> y;

  void write_csv(std::ostream& out) const;
  void write_csv(const std::string& path) const;
};

/// Psi(x) for x in [-6, 6], step 0.05.
Curve link_curve(const LinkSpec& link);
/// (logistic quantile, t_nu quantile) pairs for p = 0.0005, 0.0010, ..., 0.9995.
Curve qq_curve(double nu = 8.0);
/// Exponential hyperprior density (gamma/2) exp(-gamma tau/2) for tau in [0, 10], step 0.05.
Curve hyperprior_curve(double gamma);
/// Mode-0 skew-t density for x in [-6, 6], step 0.05.
Curve skewpdf_curve(double nu, double delta);

/// kind is one of link, qq, hyperprior, skewpdf.
Curve make_curve(const std::string& kind, double nu, double delta, double gamma);

/// Coefficient of determination of the least-squares line of y on x.
double r_squared(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace fstglm
