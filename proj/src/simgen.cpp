#include "fstglm/simgen.hpp"

#include "fstglm/error.hpp"
#include "fstglm/rng.hpp"

namespace fstglm {

Eigen::VectorXd example1_probabilities() {
  Eigen::VectorXd p(kSimPredictors);
  p << 0.3, 0.3, 0.3, 0.5, 0.5, 0.5, 0.5, 0.5, 0.8, 0.8;
  return p;
}

Eigen::MatrixXd example2_correlation() {
  constexpr int k = kSimPredictors + 1;
  Eigen::MatrixXd c = Eigen::MatrixXd::Constant(k, k, 0.01);
  auto block = [&](int first, int last, double rho) {
    for (int i = first; i <= last; ++i)
      for (int j = first; j <= last; ++j) c(i, j) = rho;
  };
  block(0, 4, 0.8);   // y, x1..x4
  block(5, 7, 0.3);   // x5..x7
  block(8, 10, 0.4);  // x8..x10
  c.diagonal().setOnes();
  return c;
}

Dataset gen_example1(std::uint64_t seed, int rows) {
  if (rows < 1) fail(Errc::invalid_argument, "row count must be positive");
  CounterRng rng(seed, "simulate/example1");
  const Eigen::VectorXd p = example1_probabilities();
  Dataset data;
  data.design.resize(rows, kSimPredictors);
  data.labels.resize(rows);
  data.feature_names = default_feature_names(kSimPredictors);
  for (int i = 0; i < rows; ++i) {
    data.labels[i] = rng.uniform() < 0.6 ? 1.0 : 0.0;
    for (int j = 0; j < kSimPredictors; ++j) data.design(i, j) = rng.uniform() < p[j] ? 1.0 : 0.0;
  }
  return data;
}

Dataset gen_example2(std::uint64_t seed, const Eigen::MatrixXd& correlation, int rows) {
  if (rows < 1) fail(Errc::invalid_argument, "row count must be positive");
  const Eigen::Index k = correlation.rows();
  if (k < 2 || correlation.cols() != k) fail(Errc::invalid_argument, "correlation matrix must be square, size >= 2");
  if (!correlation.isApprox(correlation.transpose(), 0.0))
    fail(Errc::invalid_argument, "correlation matrix must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(correlation);
  if (llt.info() != Eigen::Success)
    fail(Errc::numerical, "correlation matrix is not positive definite (Cholesky factorisation failed)");
  const Eigen::MatrixXd L = llt.matrixL();

  CounterRng rng(seed, "simulate/example2");
  Dataset data;
  data.design.resize(rows, k - 1);
  data.labels.resize(rows);
  data.feature_names = default_feature_names(static_cast<std::size_t>(k - 1));
  Eigen::VectorXd eps(k);
  for (int i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) eps[j] = rng.normal();
    const Eigen::VectorXd g = L * eps;
    data.labels[i] = g[0] < 0.0 ? 0.0 : 1.0;
    for (Eigen::Index j = 1; j < k; ++j) data.design(i, j - 1) = g[j] < 0.0 ? 0.0 : 1.0;
  }
  return data;
}

Dataset gen_example2(std::uint64_t seed, int rows) { return gen_example2(seed, example2_correlation(), rows); }

Dataset simulate(int example, std::uint64_t seed, int rows) {
  switch (example) {
    case 1: return gen_example1(seed, rows);
    case 2: return gen_example2(seed, rows);
    default: fail(Errc::invalid_argument, "unknown simulation example " + std::to_string(example) + " (expected 1 or 2)");
  }
}

}  // namespace fstglm
