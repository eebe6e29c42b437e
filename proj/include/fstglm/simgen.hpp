#pragma once

// Seeded generators for the two simulation designs: independent Bernoulli
// predictors (example 1) and a dichotomised correlated Gaussian (example 2).

#include "fstglm/dataset.hpp"

#include <Eigen/Dense>

#include <cstdint>

namespace fstglm {

inline constexpr int kSimRows = 100;
inline constexpr int kSimPredictors = 10;

/// Success probabilities of the example-1 predictors, in column order.
Eigen::VectorXd example1_probabilities();

/// 11x11 correlation over (label, x1..x10): {y, x1..x4} pairwise 0.8,
/// {x5, x6, x7} pairwise 0.3, {x8, x9, x10} pairwise 0.4, all other pairs 0.01.
Eigen::MatrixXd example2_correlation();

/// Example 1: y ~ Bernoulli(0.6), x_j ~ Bernoulli(p_j) independently.
Dataset gen_example1(std::uint64_t seed, int rows = kSimRows);

/// Example 2: rows of N(0, correlation) thresholded at zero (x < 0 -> 0,
/// otherwise 1); the first coordinate is the label.
Dataset gen_example2(std::uint64_t seed, int rows = kSimRows);
Dataset gen_example2(std::uint64_t seed, const Eigen::MatrixXd& correlation, int rows = kSimRows);

/// Dispatch on the example number (1 or 2); anything else is invalid_argument.
Dataset simulate(int example, std::uint64_t seed, int rows = kSimRows);

}  // namespace fstglm
