#include "fstglm/em.hpp"

#include "fstglm/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace fstglm {
namespace {

// Ratio of two tail quantities; the E-step weights must stay strictly positive
// even when both underflow far out in a tail.
double positive_ratio(double num, double den) {
  const double r = num / den;
  if (!std::isfinite(r)) fail(Errc::numerical, "E-step expectation is not finite");
  return std::max(r, kProbFloor);
}

void check_label(int y) {
  if (y != 0 && y != 1) fail(Errc::invalid_argument, "label must be 0 or 1");
}

}  // namespace

void PriorSpec::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    fail(Errc::invalid_argument, "gamma must be a positive finite number");
}

double PriorSpec::penalty_rate() const { return std::sqrt(gamma); }

void FitConfig::validate() const {
  if (!(delta_tol > 0.0 && delta_tol < 1.0))
    fail(Errc::invalid_argument, "delta_tol must lie in (0, 1)");
  if (!(eps_init > 0.0) || !std::isfinite(eps_init))
    fail(Errc::invalid_argument, "eps_init must be positive");
  if (max_iter < 1) fail(Errc::invalid_argument, "max_iter must be a positive integer");
  if (!(zero_threshold > 0.0) || !std::isfinite(zero_threshold))
    fail(Errc::invalid_argument, "zero_threshold must be positive");
}

void FitTrace::write_csv(std::ostream& out) const {
  out << "iteration,rel_change,objective,update,active\n";
  for (std::size_t t = 0; t < objective.size(); ++t) {
    out << t << ',';
    if (t > 0) out << format_double(rel_change[t]);
    out << ',' << format_double(objective[t]) << ',';
    if (t > 0) out << (update[t] == UpdateKind::em ? "em" : "majorized");
    out << ',' << active[t] << '\n';
  }
}

void FitTrace::write_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io, "cannot open '" + path + "' for writing");
  write_csv(out);
}

Eigen::VectorXd init_beta(const Dataset& data, double eps) {
  if (!(eps > 0.0)) fail(Errc::invalid_argument, "ridge jitter eps must be positive");
  data.validate();
  const Eigen::MatrixXd& H = data.design;
  Eigen::MatrixXd normal = H.transpose() * H;
  normal.diagonal().array() += eps;
  Eigen::LLT<Eigen::MatrixXd> llt(normal);
  if (llt.info() != Eigen::Success) fail(Errc::numerical, "ridge initialisation system is not positive definite");
  return llt.solve(H.transpose() * data.labels);
}

double e_lambda_sym(double eta, double nu, int y) {
  return EStepKernel(LinkSpec::symmetric(nu)).e_lambda(eta, y);
}

double e_lambdaz_sym(double eta, double nu, int y) {
  return EStepKernel(LinkSpec::symmetric(nu)).e_lambda_s(eta, y);
}

double e_tau_inv(double beta_j, double gamma, double zero_threshold) {
  PriorSpec{gamma}.validate();
  if (!std::isfinite(beta_j)) fail(Errc::invalid_argument, "coefficient is not finite");
  if (std::abs(beta_j) < zero_threshold)
    fail(Errc::invalid_argument, "coefficient below the zero threshold must be frozen, not weighted");
  return std::sqrt(gamma) / std::abs(beta_j);
}

EStepKernel::EStepKernel(const LinkSpec& link)
    : link_(link), t_(link.nu), t2_(link.nu + 2.0), psi_(link), scale2_(std::sqrt((link.nu + 2.0) / link.nu)) {}

double EStepKernel::size_biased_cdf(double x) const { return t2_.cdf(x * scale2_); }

double EStepKernel::e_lambda(double eta, int y) const {
  check_label(y);
  if (!link_.collapses_to_symmetric()) return skew_moments(eta, y).e_lambda;
  if (y == 1) return positive_ratio(size_biased_cdf(eta), psi_.prob(eta));
  return positive_ratio(size_biased_cdf(-eta), psi_.complement(eta));
}

double EStepKernel::e_lambda_s(double eta, int y) const {
  check_label(y);
  if (!link_.collapses_to_symmetric()) return skew_moments(eta, y).e_lambda_r;
  if (y == 1) {
    const double T = psi_.prob(eta);
    return eta * positive_ratio(size_biased_cdf(eta), T) + t_.pdf(eta) / T;
  }
  const double Tc = psi_.complement(eta);
  return eta * positive_ratio(size_biased_cdf(-eta), Tc) - t_.pdf(eta) / Tc;
}

// Conditional on lambda, the latent u = z - eta is two-piece normal: on each
// side of the mode the variable v = g(u) is N(0, 1/lambda) restricted to that
// side, carrying weight 2 delta^2/(delta^2+1) above and 2/(delta^2+1) below.
// Integrating lambda out against its Gamma(nu/2, 2/nu) law:
//   E[lambda 1{v in (a,b)}] = G(b) - G(a),  G(x) = T_{nu+2}(x sqrt((nu+2)/nu))
//   E[lambda v 1{v in (a,b)}] = t_nu(a) - t_nu(b)
// The y-region z > 0 is u > -eta, split at the mode.
SkewMoments EStepKernel::skew_moments(double eta, int y) const {
  check_label(y);
  if (!std::isfinite(eta)) fail(Errc::numerical, "linear predictor is not finite");
  const double d = link_.delta;
  const double d2 = d * d;
  const double w_lo = 2.0 / (d2 + 1.0);
  const double w_up = 2.0 * d2 / (d2 + 1.0);
  const double t0 = t_.pdf(0.0);

  double lo0 = 0.0, lo1 = 0.0, up0 = 0.0, up1 = 0.0;
  if (y == 1) {
    if (eta >= 0.0) {
      lo0 = 0.5 - size_biased_cdf(-eta * d);
      lo1 = t_.pdf(eta * d) - t0;
      up0 = 0.5;
      up1 = t0;
    } else {
      up0 = size_biased_cdf(eta / d);
      up1 = t_.pdf(eta / d);
    }
  } else {
    if (eta >= 0.0) {
      lo0 = size_biased_cdf(-eta * d);
      lo1 = -t_.pdf(eta * d);
    } else {
      lo0 = 0.5;
      lo1 = -t0;
      up0 = size_biased_cdf(-eta / d) - 0.5;
      up1 = t0 - t_.pdf(eta / d);
    }
  }

  const double p = y == 1 ? psi_.prob(eta) : psi_.complement(eta);
  SkewMoments m{};
  m.e_lambda = positive_ratio(w_lo * lo0 + w_up * up0, p);
  const double e_g = (w_lo * lo1 + w_up * up1) / p;
  m.e_lambda_r = eta * m.e_lambda + e_g;
  m.e_lambda_psi = (w_lo * d * lo1 + w_up * up1 / d) / p;
  m.e_lambda_z = eta * m.e_lambda + (w_lo * lo1 / d + w_up * d * up1) / p;
  if (!std::isfinite(m.e_lambda_r) || !std::isfinite(m.e_lambda_psi))
    fail(Errc::numerical, "skew E-step expectation is not finite");
  return m;
}

double e_lambda_skew(double eta, const LinkSpec& link, int y) {
  link.validate();
  return EStepKernel(link).e_lambda(eta, y);
}

double e_lambdar_skew(double eta, const LinkSpec& link, int y) {
  link.validate();
  return EStepKernel(link).e_lambda_s(eta, y);
}

namespace {

// Ha' diag(a) Ha as a full symmetric matrix, via a rank update on sqrt(a) Ha.
Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& Ha, const Eigen::VectorXd& a) {
  const Eigen::MatrixXd B = a.cwiseMax(0.0).cwiseSqrt().asDiagonal() * Ha;
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(Ha.cols(), Ha.cols());
  G.selfadjointView<Eigen::Lower>().rankUpdate(B.transpose());
  G.triangularView<Eigen::StrictlyUpper>() = G.transpose();
  return G;
}

// Solves system * x = rhs and scatters x into an m-vector on `active`.
Eigen::VectorXd solve_active(const Eigen::MatrixXd& system, const Eigen::VectorXd& rhs,
                             const std::vector<int>& active, Eigen::Index m) {
  Eigen::LLT<Eigen::MatrixXd> llt(system);
  if (llt.info() != Eigen::Success) {
    const double dmax = system.diagonal().maxCoeff();
    const double dmin = system.diagonal().minCoeff();
    std::ostringstream msg;
    msg << "M-step system (H'A*H + W*) is not positive definite on " << active.size()
        << " active coordinates; diagonal range [" << dmin << ", " << dmax << "]";
    fail(Errc::numerical, msg.str());
  }
  const Eigen::VectorXd sol = llt.solve(rhs);
  if (!sol.allFinite()) fail(Errc::numerical, "M-step produced non-finite coefficients");
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(m);
  for (std::size_t k = 0; k < active.size(); ++k) beta[active[k]] = sol[static_cast<Eigen::Index>(k)];
  return beta;
}

}  // namespace

Eigen::VectorXd m_step(const Eigen::MatrixXd& H, const EStepQuantities& q, const std::vector<int>& active) {
  const Eigen::Index n = H.rows();
  if (q.a_star.size() != n || q.s_star.size() != n)
    fail(Errc::invalid_argument, "E-step vectors do not match the design rows");
  if (q.w_star.size() != static_cast<Eigen::Index>(active.size()))
    fail(Errc::invalid_argument, "prior weights do not match the active set");
  if (active.empty()) return Eigen::VectorXd::Zero(H.cols());

  const Eigen::MatrixXd Ha = H(Eigen::all, active);
  Eigen::MatrixXd system = weighted_gram(Ha, q.a_star);
  system.diagonal() += q.w_star;
  return solve_active(system, Ha.transpose() * q.s_star, active, H.cols());
}

Eigen::VectorXd m_step(const Eigen::MatrixXd& H, const EStepQuantities& q) {
  std::vector<int> all(static_cast<std::size_t>(H.cols()));
  for (std::size_t j = 0; j < all.size(); ++j) all[j] = static_cast<int>(j);
  return m_step(H, q, all);
}

double log_likelihood(const Eigen::VectorXd& beta, const Dataset& data, const LinkSpec& link) {
  if (beta.size() != data.cols()) fail(Errc::invalid_argument, "coefficient dimension mismatch");
  const LinkFunction psi(link);
  const Eigen::VectorXd eta = data.design * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i)
    ll += data.labels[i] == 1.0 ? std::log(psi.prob(eta[i])) : std::log(psi.complement(eta[i]));
  return ll;
}

double penalized_objective(const Eigen::VectorXd& beta, const Dataset& data, const LinkSpec& link,
                           double penalty_rate) {
  return log_likelihood(beta, data, link) - penalty_rate * beta.lpNorm<1>();
}

Dataset with_intercept(const Dataset& data) {
  Dataset out;
  out.design.resize(data.rows(), data.cols() + 1);
  out.design.col(0).setOnes();
  out.design.rightCols(data.cols()) = data.design;
  out.labels = data.labels;
  out.feature_names.reserve(data.feature_names.size() + 1);
  out.feature_names.push_back(kInterceptName);
  out.feature_names.insert(out.feature_names.end(), data.feature_names.begin(), data.feature_names.end());
  return out;
}

FitResult fit(const Dataset& input, const LinkSpec& link, const PriorSpec& prior, const FitConfig& config) {
  link.validate();
  prior.validate();
  config.validate();
  input.validate();

  const double positives = input.labels.sum();
  if (positives == 0.0 || positives == static_cast<double>(input.rows())) {
    fail(Errc::degenerate, std::string("all labels are ") + (positives == 0.0 ? "0" : "1") +
                               "; the likelihood is maximised at infinity (complete separation)");
  }

  const Dataset data = config.intercept ? with_intercept(input) : input;
  const Eigen::MatrixXd& H = data.design;
  const Eigen::Index n = H.rows();
  const Eigen::Index m = H.cols();
  const double rate = prior.penalty_rate();
  const EStepKernel kernel(link);
  const bool skew = !link.collapses_to_symmetric();
  const double kappa = std::max(link.delta * link.delta, 1.0 / (link.delta * link.delta));

  Eigen::VectorXd beta = init_beta(data, config.eps_init);
  std::vector<bool> frozen(static_cast<std::size_t>(m), false);
  auto freeze = [&](Eigen::VectorXd& b) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (frozen[j] || std::abs(b[j]) < config.zero_threshold) {
        frozen[j] = true;
        b[j] = 0.0;
      }
    }
  };
  auto active_set = [&] {
    std::vector<int> idx;
    for (Eigen::Index j = 0; j < m; ++j)
      if (!frozen[j]) idx.push_back(static_cast<int>(j));
    return idx;
  };
  freeze(beta);

  FitTrace trace;
  double obj = penalized_objective(beta, data, link, rate);
  trace.rel_change.push_back(std::numeric_limits<double>::quiet_NaN());
  trace.objective.push_back(obj);
  trace.update.push_back(UpdateKind::em);
  trace.active.push_back(static_cast<int>(active_set().size()));

  EStepQuantities q;
  q.a_star.resize(n);
  q.s_star.resize(n);
  if (skew) q.psi_star.resize(n);

  for (int it = 1; it <= config.max_iter; ++it) {
    const std::vector<int> active = active_set();
    const Eigen::VectorXd eta = H * beta;

    for (Eigen::Index i = 0; i < n; ++i) {
      const int y = data.labels[i] == 1.0 ? 1 : 0;
      if (skew) {
        const SkewMoments mom = kernel.skew_moments(eta[i], y);
        q.a_star[i] = mom.e_lambda;
        q.s_star[i] = mom.e_lambda_r;
        q.psi_star[i] = mom.e_lambda_psi;
      } else {
        q.a_star[i] = kernel.e_lambda(eta[i], y);
        q.s_star[i] = kernel.e_lambda_s(eta[i], y);
      }
    }
    q.w_star.resize(static_cast<Eigen::Index>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k)
      q.w_star[static_cast<Eigen::Index>(k)] = e_tau_inv(beta[active[k]], prior.gamma, config.zero_threshold);

    Eigen::VectorXd next = Eigen::VectorXd::Zero(m);
    UpdateKind kind = UpdateKind::em;
    if (!active.empty()) {
      const Eigen::MatrixXd Ha = H(Eigen::all, active);
      const Eigen::MatrixXd G = weighted_gram(Ha, q.a_star);
      Eigen::MatrixXd system = G;
      system.diagonal() += q.w_star;
      next = solve_active(system, Ha.transpose() * q.s_star, active, m);
      if (skew && penalized_objective(next, data, link, rate) < obj) {
        // The r-based update targets a stationary point that differs from the
        // posterior mode when delta != 1. Fall back to the majorized EM step:
        // g(u)^2 has curvature at most kappa, so this step never decreases the
        // penalized objective.
        system = kappa * G;
        system.diagonal() += q.w_star;
        const Eigen::VectorXd rhs = Ha.transpose() * (kappa * q.a_star.cwiseProduct(eta) + q.psi_star);
        next = solve_active(system, rhs, active, m);
        kind = UpdateKind::majorized;
      }
    }
    freeze(next);

    const double base = beta.norm();
    const double diff = (next - beta).norm();
    const double rel = base > 0.0 ? diff / base : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    beta = std::move(next);
    obj = penalized_objective(beta, data, link, rate);

    trace.iterations = it;
    trace.rel_change.push_back(rel);
    trace.objective.push_back(obj);
    trace.update.push_back(kind);
    trace.active.push_back(static_cast<int>(active_set().size()));
    if (rel < config.delta_tol) {
      trace.converged = true;
      break;
    }
  }

  FitResult result;
  result.model.beta = beta;
  result.model.link = link;
  result.model.gamma = prior.gamma;
  result.model.feature_names = data.feature_names;
  result.model.converged = trace.converged;
  result.model.intercept_included = config.intercept;
  result.trace = std::move(trace);
  return result;
}

}  // namespace fstglm
