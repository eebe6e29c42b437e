#pragma once

#include "fstglm/dist.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

namespace fstglm {

/// A fitted coefficient vector with its link. Immutable once built. When
/// intercept_included is set, beta[0] multiplies an implicit constant 1 and
/// feature_names[0] is "(intercept)".
struct FittedModel {
  Eigen::VectorXd beta;
  LinkSpec link;
  double gamma = 1.0;
  std::vector<std::string> feature_names;
  bool converged = false;
  bool intercept_included = false;

  void validate() const;
  /// Feature names the model expects in input data (intercept excluded).
  std::vector<std::string> input_features() const;
  Eigen::Index input_dim() const;

  friend bool operator==(const FittedModel& a, const FittedModel& b);
};

double linear_predictor(const FittedModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);
double predict_proba(const FittedModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);
/// Probabilities for every row of X.
Eigen::VectorXd predict_proba_rows(const FittedModel& model, const Eigen::MatrixXd& X);
/// 1 iff the probability is strictly above the threshold; ties go to 0.
int classify(const FittedModel& model, const Eigen::Ref<const Eigen::VectorXd>& x, double threshold = 0.5);
int classify_probability(double p, double threshold = 0.5);
std::vector<int> classify_rows(const FittedModel& model, const Eigen::MatrixXd& X, double threshold = 0.5);

std::size_t sparsity_count(const FittedModel& model);

// Model file: one JSON document,
//   {"format": "fstglm-model", "schema_version": 1,
//    "link": {"family": ..., "nu": ..., "delta": ...}, "gamma": ...,
//    "converged": ..., "intercept_included": ...,
//    "features": [...], "coefficients": [...]}
// Doubles are written in shortest round-trip form, so loading reproduces
// every field bit for bit.
inline constexpr int kModelSchemaVersion = 1;

void save_model(const FittedModel& model, std::ostream& out);
void save_model(const FittedModel& model, const std::string& path);
FittedModel load_model(std::istream& in);
FittedModel load_model(const std::string& path);

}  // namespace fstglm
