#include "fstglm/error.hpp"
#include "fstglm/simgen.hpp"

#include <doctest.h>

#include <cmath>

using namespace fstglm;

namespace {

double correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double ma = a.mean(), mb = b.mean();
  const Eigen::ArrayXd da = a.array() - ma, db = b.array() - mb;
  return (da * db).sum() / std::sqrt((da * da).sum() * (db * db).sum());
}

// Pools `reps` replicates of example 2 into columns (label, x1..x10).
Eigen::MatrixXd pooled_example2(int reps) {
  Eigen::MatrixXd all(static_cast<Eigen::Index>(reps) * kSimRows, kSimPredictors + 1);
  for (int r = 0; r < reps; ++r) {
    const Dataset d = gen_example2(static_cast<std::uint64_t>(r) + 1000);
    all.block(r * kSimRows, 0, kSimRows, 1) = d.labels;
    all.block(r * kSimRows, 1, kSimRows, kSimPredictors) = d.design;
  }
  return all;
}

}  // namespace

TEST_CASE("shapes and binary entries") {
  for (int ex : {1, 2}) {
    const Dataset d = simulate(ex, 7);
    CHECK(d.rows() == 100);
    CHECK(d.cols() == 10);
    CHECK(d.feature_names.front() == "x1");
    CHECK(((d.design.array() == 0.0) || (d.design.array() == 1.0)).all());
    CHECK(((d.labels.array() == 0.0) || (d.labels.array() == 1.0)).all());
  }
  CHECK_THROWS_AS(simulate(3, 1), Error);
}

TEST_CASE("same seed, same data; different seed, different data") {
  for (int ex : {1, 2}) {
    const Dataset a = simulate(ex, 5), b = simulate(ex, 5), c = simulate(ex, 6);
    CHECK(a.design == b.design);
    CHECK(a.labels == b.labels);
    CHECK(a.design != c.design);
  }
}

TEST_CASE("example 1 marginals") {
  const int reps = 10000;
  double label_sum = 0.0;
  Eigen::VectorXd col_sum = Eigen::VectorXd::Zero(kSimPredictors);
  for (int r = 0; r < reps; ++r) {
    const Dataset d = gen_example1(static_cast<std::uint64_t>(r));
    label_sum += d.labels.mean();
    col_sum += d.design.colwise().mean().transpose();
  }
  // Labels pooled over 1e4 replicates of 100 rows each.
  const double n = static_cast<double>(reps) * kSimRows;
  CHECK(std::abs(label_sum / reps - 0.6) < 4.0 * std::sqrt(0.24 / n));
  const Eigen::VectorXd p = example1_probabilities();
  for (int j = 0; j < kSimPredictors; ++j)
    CHECK(std::abs(col_sum[j] / reps - p[j]) < 4.0 * std::sqrt(p[j] * (1.0 - p[j]) / n));
}

TEST_CASE("example 2 orthant correlations") {
  const Eigen::MatrixXd all = pooled_example2(1000);
  const Eigen::MatrixXd R = example2_correlation();
  CHECK(std::abs(correlation(all.col(0), all.col(1)) - 2.0 * std::asin(0.8) / M_PI) < 0.02);
  CHECK(std::abs(correlation(all.col(5), all.col(8)) - 2.0 * std::asin(0.01) / M_PI) < 0.02);
  for (int i = 0; i <= kSimPredictors; ++i) {
    CHECK(std::abs(all.col(i).mean() - 0.5) < 0.02);
    for (int j = i + 1; j <= kSimPredictors; ++j)
      CHECK(std::abs(correlation(all.col(i), all.col(j)) - 2.0 * std::asin(R(i, j)) / M_PI) < 0.02);
  }
}

TEST_CASE("example 2 correlation matrix") {
  const Eigen::MatrixXd R = example2_correlation();
  CHECK(R.rows() == 11);
  CHECK(R.isApprox(R.transpose(), 0.0));
  CHECK((R.diagonal().array() == 1.0).all());
  CHECK(R(0, 4) == 0.8);
  CHECK(R(5, 7) == 0.3);
  CHECK(R(8, 10) == 0.4);
  CHECK(R(4, 5) == 0.01);
  CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(R).eigenvalues().minCoeff() > 0.0);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(11, 11);
  bad(0, 1) = bad(1, 0) = 1.5;
  CHECK_THROWS_AS(gen_example2(1, bad), Error);
}
