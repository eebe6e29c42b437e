#pragma once

// Evaluation metrics, the train/validation/test protocol, grid search over
// (nu, gamma, delta) and one-vs-rest orchestration for text categories.

#include "fstglm/dataset.hpp"
#include "fstglm/em.hpp"
#include "fstglm/textprep.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fstglm {

double misclassification_rate(const std::vector<int>& preds, const std::vector<int>& labels);

struct ConfusionCounts {
  long tp = 0, fp = 0, fn = 0, tn = 0;

  long total() const noexcept { return tp + fp + fn + tn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o);
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

ConfusionCounts confusion(const std::vector<int>& preds, const std::vector<int>& labels);

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Precision, recall and F1; each is defined as 0 when its denominator is 0.
PRF precision_recall_f1(const ConfusionCounts& c);
/// Pools the confusion cells across categories, then applies the formulas.
PRF micro_average(const std::vector<ConfusionCounts>& per_category);
/// Arithmetic mean of per-category metrics.
PRF macro_average(const std::vector<PRF>& per_category);

struct SplitIndices {
  std::vector<std::size_t> train, validation, test;
};

/// Seeded shuffle, then floor(n*f_train), floor(n*f_val) and the remainder.
SplitIndices split_indices(std::size_t n, std::uint64_t seed, double f_train = 0.50, double f_val = 0.25,
                           double f_test = 0.25);

struct DataSplit {
  Dataset train, validation, test;
};
DataSplit split_dataset(const Dataset& data, std::uint64_t seed, double f_train = 0.50, double f_val = 0.25,
                        double f_test = 0.25);

struct GridSpec {
  std::vector<double> nu_values;
  std::vector<double> gamma_values;
  std::vector<double> delta_values;

  /// nu in {1..8, 15, 30, 50, 100}, gamma in {0.01, 0.1, 1..10, 20, 50, 100},
  /// delta in {0.01, 0.1, 0.5, 0.7, 1, 1.2, 1.5, 2, 3, 4, 5, 10}.
  static GridSpec simulation_default();
  /// nu in {1, 2, 5, 8, 30}, gamma in {0.01, 0.05, 0.1, 1, 2},
  /// delta in {0.1, 0.5, 1, 1.5, 2}.
  static GridSpec text_default();

  void validate() const;
  std::size_t size() const noexcept { return nu_values.size() * gamma_values.size() * delta_values.size(); }
};

enum class Objective { f1, misclassification };
Objective objective_from_string(const std::string& name);
std::string to_string(Objective objective);

struct GridRow {
  double nu = 0.0;
  double gamma = 0.0;
  double delta = 1.0;
  double objective_value = 0.0;  // NaN when the fit failed
  bool converged = false;
  std::string error;             // empty on success

  bool ok() const noexcept { return error.empty(); }
};

struct GridResult {
  std::vector<GridRow> rows;  // ordered by (nu, delta, gamma)
  std::optional<std::size_t> best;
  Objective objective = Objective::misclassification;

  LinkSpec best_link(LinkFamily family) const;
  double best_gamma() const;
  void write_csv(std::ostream& out) const;
  void write_csv(const std::string& path) const;
};

/// Throws invalid_argument naming the first column where the data's feature
/// names differ from the ones the model was fitted on.
void require_matching_features(const FittedModel& model, const Dataset& data);

/// Scores one fitted model on a dataset with the 0.5 rule.
double score_model(const FittedModel& model, const Dataset& data, Objective objective, double threshold = 0.5);

/// Fits every grid point on `train` and scores it on `validation`. With the
/// symmetric family only delta = 1 is used. Fit failures are recorded in the
/// table. The winner is the best objective; ties go to the lexicographically
/// smallest (nu, delta, gamma). `threads` = 0 uses hardware concurrency.
GridResult grid_search(const Dataset& train, const Dataset& validation, LinkFamily family, const GridSpec& grid,
                       Objective objective, const FitConfig& config = {}, unsigned threads = 0);

struct MetricsReport {
  std::vector<std::string> categories;
  std::vector<ConfusionCounts> counts;
  std::vector<PRF> per_category;
  PRF micro;
  PRF macro;
  double misclassification = 0.0;  // over all (document, category) decisions

  static MetricsReport from_counts(std::vector<std::string> categories, std::vector<ConfusionCounts> counts);
};

/// Fits on train + validation with the chosen parameters, evaluates on test.
MetricsReport refit_and_test(const Dataset& train, const Dataset& validation, const Dataset& test,
                             const LinkSpec& link, double gamma, const FitConfig& config = {},
                             double threshold = 0.5);

struct SplitMetrics {
  PRF micro;
  PRF macro;
};

struct RepeatedSummary {
  std::vector<SplitMetrics> splits;
  SplitMetrics mean;
  SplitMetrics sd;  // sample standard deviation (n - 1); 0 for a single split

  static RepeatedSummary from(std::vector<SplitMetrics> splits);
  /// Columns split,micro_f1,macro_f1,micro_recall,macro_recall,
  /// micro_precision,macro_precision; rows 1..k, then "mean" and "sd".
  void write_csv(std::ostream& out) const;
  void write_csv(const std::string& path) const;
};

struct TextProtocolConfig {
  std::size_t top_k = 100;
  GridSpec grid = GridSpec::text_default();
  int splits = 5;
  std::uint64_t seed = 1;
  FitConfig fit;
  double threshold = 0.5;
  unsigned threads = 0;
};

struct CategoryOutcome {
  std::string category;
  std::optional<LinkSpec> link;  // empty when no grid point could be fitted
  double gamma = 0.0;
  double validation_objective = 0.0;
  std::size_t vocabulary_size = 0;
  bool vocabulary_truncated = false;
  GridResult grid;
};

struct SplitOutcome {
  int split = 0;
  std::vector<CategoryOutcome> categories;
  MetricsReport report;
};

struct TextProtocolResult {
  std::vector<SplitOutcome> splits;
  RepeatedSummary summary;

  /// split,category,nu,gamma,delta,validation_objective (the tuning table).
  void write_params_csv(std::ostream& out) const;
  /// split,category,nu,gamma,delta,objective_value,converged for every grid point.
  void write_results_csv(std::ostream& out) const;
};

/// Repeated 50/25/25 protocol: per split and category, information-gain
/// vocabulary on the training documents, grid search on F1 over validation,
/// refit on train + validation, evaluation on test.
TextProtocolResult run_text_protocol(const Corpus& corpus, const Stoplist& stoplist, const TextProtocolConfig& config);

struct DatasetProtocolConfig {
  LinkFamily family = LinkFamily::skew;
  GridSpec grid = GridSpec::simulation_default();
  Objective objective = Objective::misclassification;
  int splits = 5;
  std::uint64_t seed = 1;
  FitConfig fit;
  double threshold = 0.5;
  unsigned threads = 0;
};

/// The same repeated 50/25/25 protocol on one labelled dataset. Results use
/// the text layout with a single category named "label".
TextProtocolResult run_dataset_protocol(const Dataset& data, const DatasetProtocolConfig& config);

}  // namespace fstglm
