#include "fstglm/evalkit.hpp"

#include "fstglm/error.hpp"
#include "fstglm/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <thread>

namespace fstglm {
namespace {

double safe_div(double num, double den) { return den > 0.0 ? num / den : 0.0; }

std::vector<int> to_labels(const Eigen::VectorXd& y) {
  std::vector<int> out(static_cast<std::size_t>(y.size()));
  for (Eigen::Index i = 0; i < y.size(); ++i) out[static_cast<std::size_t>(i)] = y[i] == 1.0 ? 1 : 0;
  return out;
}

void check_grid_values(const std::vector<double>& v, const char* name) {
  if (v.empty()) fail(Errc::invalid_argument, std::string("grid '") + name + "' is empty");
  for (double x : v)
    if (!(x > 0.0) || !std::isfinite(x))
      fail(Errc::invalid_argument, std::string("grid '") + name + "' has a non-positive value");
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io, "cannot open '" + path + "' for writing");
  return out;
}

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  return format_double(x);
}

}  // namespace

double misclassification_rate(const std::vector<int>& preds, const std::vector<int>& labels) {
  if (preds.empty() || preds.size() != labels.size())
    fail(Errc::invalid_argument, "misclassification needs equal-length, non-empty inputs");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) wrong += preds[i] != labels[i];
  return static_cast<double>(wrong) / static_cast<double>(preds.size());
}

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  tn += o.tn;
  return *this;
}

ConfusionCounts confusion(const std::vector<int>& preds, const std::vector<int>& labels) {
  if (preds.size() != labels.size()) fail(Errc::invalid_argument, "prediction and label counts differ");
  ConfusionCounts c;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] == 1 && labels[i] == 1) ++c.tp;
    else if (preds[i] == 1) ++c.fp;
    else if (labels[i] == 1) ++c.fn;
    else ++c.tn;
  }
  return c;
}

PRF precision_recall_f1(const ConfusionCounts& c) {
  PRF m;
  m.precision = safe_div(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fp));
  m.recall = safe_div(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fn));
  // 2pr/(p+r) written over the counts, so it is a single rounding.
  m.f1 = safe_div(2.0 * static_cast<double>(c.tp), static_cast<double>(2 * c.tp + c.fp + c.fn));
  return m;
}

PRF micro_average(const std::vector<ConfusionCounts>& per_category) {
  if (per_category.empty()) fail(Errc::invalid_argument, "micro average needs at least one category");
  ConfusionCounts pooled;
  for (const auto& c : per_category) pooled += c;
  return precision_recall_f1(pooled);
}

PRF macro_average(const std::vector<PRF>& per_category) {
  if (per_category.empty()) fail(Errc::invalid_argument, "macro average needs at least one category");
  PRF m;
  for (const auto& p : per_category) {
    m.precision += p.precision;
    m.recall += p.recall;
    m.f1 += p.f1;
  }
  const double k = static_cast<double>(per_category.size());
  m.precision /= k;
  m.recall /= k;
  m.f1 /= k;
  return m;
}

SplitIndices split_indices(std::size_t n, std::uint64_t seed, double f_train, double f_val, double f_test) {
  if (n < 4) fail(Errc::invalid_argument, "splitting needs at least 4 rows");
  if (!(f_train > 0.0 && f_val > 0.0 && f_test > 0.0) || std::abs(f_train + f_val + f_test - 1.0) > 1e-12)
    fail(Errc::invalid_argument, "split fractions must be positive and sum to 1");

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  CounterRng rng(seed, "split");
  for (std::size_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i + 1));
    std::swap(perm[i], perm[std::min(j, i)]);
  }
  const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * f_train));
  const auto n_val = static_cast<std::size_t>(std::floor(static_cast<double>(n) * f_val));
  SplitIndices s;
  s.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.validation.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train),
                      perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  s.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), perm.end());
  return s;
}

DataSplit split_dataset(const Dataset& data, std::uint64_t seed, double f_train, double f_val, double f_test) {
  data.validate();
  const SplitIndices s = split_indices(static_cast<std::size_t>(data.rows()), seed, f_train, f_val, f_test);
  return {data.subset(s.train), data.subset(s.validation), data.subset(s.test)};
}

GridSpec GridSpec::simulation_default() {
  return {{1, 2, 3, 4, 5, 6, 7, 8, 15, 30, 50, 100},
          {0.01, 0.1, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 20, 50, 100},
          {0.01, 0.1, 0.5, 0.7, 1, 1.2, 1.5, 2, 3, 4, 5, 10}};
}

GridSpec GridSpec::text_default() {
  return {{1, 2, 5, 8, 30}, {0.01, 0.05, 0.1, 1, 2}, {0.1, 0.5, 1, 1.5, 2}};
}

void GridSpec::validate() const {
  check_grid_values(nu_values, "nu");
  check_grid_values(gamma_values, "gamma");
  check_grid_values(delta_values, "delta");
}

Objective objective_from_string(const std::string& name) {
  if (name == "f1") return Objective::f1;
  if (name == "misclassification") return Objective::misclassification;
  fail(Errc::invalid_argument, "unknown objective '" + name + "' (expected f1 or misclassification)");
}

std::string to_string(Objective objective) {
  return objective == Objective::f1 ? "f1" : "misclassification";
}

LinkSpec GridResult::best_link(LinkFamily family) const {
  if (!best) fail(Errc::numerical, "grid search produced no successful fit");
  const GridRow& r = rows[*best];
  return family == LinkFamily::symmetric ? LinkSpec::symmetric(r.nu) : LinkSpec::skew(r.nu, r.delta);
}

double GridResult::best_gamma() const {
  if (!best) fail(Errc::numerical, "grid search produced no successful fit");
  return rows[*best].gamma;
}

void GridResult::write_csv(std::ostream& out) const {
  out << "nu,gamma,delta,objective_value,converged\n";
  for (const auto& r : rows) {
    out << fmt(r.nu) << ',' << fmt(r.gamma) << ',' << fmt(r.delta) << ',' << fmt(r.objective_value) << ','
        << (r.converged ? 1 : 0) << '\n';
  }
}

void GridResult::write_csv(const std::string& path) const {
  auto out = open_out(path);
  write_csv(out);
}

void require_matching_features(const FittedModel& model, const Dataset& data) {
  const auto expected = model.input_features();
  const auto& got = data.feature_names;
  const std::size_t common = std::min(expected.size(), got.size());
  for (std::size_t j = 0; j < common; ++j) {
    if (expected[j] != got[j]) {
      fail(Errc::invalid_argument, "feature mismatch at column " + std::to_string(j + 1) + ": model expects '" +
                                       expected[j] + "', data has '" + got[j] + "'");
    }
  }
  if (expected.size() != got.size()) {
    fail(Errc::invalid_argument, "feature mismatch: model expects " + std::to_string(expected.size()) +
                                     " features, data has " + std::to_string(got.size()));
  }
}

double score_model(const FittedModel& model, const Dataset& data, Objective objective, double threshold) {
  const std::vector<int> preds = classify_rows(model, data.design, threshold);
  const std::vector<int> labels = to_labels(data.labels);
  if (objective == Objective::misclassification) return misclassification_rate(preds, labels);
  return precision_recall_f1(confusion(preds, labels)).f1;
}

GridResult grid_search(const Dataset& train, const Dataset& validation, LinkFamily family, const GridSpec& grid,
                       Objective objective, const FitConfig& config, unsigned threads) {
  grid.validate();
  train.validate();
  validation.validate();
  if (train.feature_names != validation.feature_names)
    fail(Errc::invalid_argument, "train and validation features differ");

  const auto nus = sorted_unique(grid.nu_values);
  const auto gammas = sorted_unique(grid.gamma_values);
  const auto deltas = family == LinkFamily::symmetric ? std::vector<double>{1.0} : sorted_unique(grid.delta_values);

  GridResult result;
  result.objective = objective;
  for (double nu : nus)
    for (double delta : deltas)
      for (double gamma : gammas) result.rows.push_back({nu, gamma, delta, 0.0, false, {}});

  parallel_for(result.rows.size(), threads, [&](std::size_t k) {
    GridRow& row = result.rows[k];
    try {
      const LinkSpec link = family == LinkFamily::symmetric ? LinkSpec::symmetric(row.nu)
                                                            : LinkSpec::skew(row.nu, row.delta);
      const FitResult fr = fit(train, link, PriorSpec{row.gamma}, config);
      row.converged = fr.model.converged;
      row.objective_value = score_model(fr.model, validation, objective);
    } catch (const std::exception& e) {
      row.objective_value = std::numeric_limits<double>::quiet_NaN();
      row.error = e.what();
    }
  });

  // Rows are already in (nu, delta, gamma) order, so the first optimum wins ties.
  for (std::size_t k = 0; k < result.rows.size(); ++k) {
    const GridRow& r = result.rows[k];
    if (!r.ok()) continue;
    if (!result.best) {
      result.best = k;
      continue;
    }
    const double cur = result.rows[*result.best].objective_value;
    const bool better = objective == Objective::misclassification ? r.objective_value < cur : r.objective_value > cur;
    if (better) result.best = k;
  }
  return result;
}

MetricsReport MetricsReport::from_counts(std::vector<std::string> categories, std::vector<ConfusionCounts> counts) {
  if (categories.size() != counts.size() || counts.empty())
    fail(Errc::invalid_argument, "report needs one confusion table per category");
  MetricsReport r;
  r.categories = std::move(categories);
  r.counts = std::move(counts);
  long wrong = 0, total = 0;
  for (const auto& c : r.counts) {
    r.per_category.push_back(precision_recall_f1(c));
    wrong += c.fp + c.fn;
    total += c.total();
  }
  r.micro = micro_average(r.counts);
  r.macro = macro_average(r.per_category);
  r.misclassification = safe_div(static_cast<double>(wrong), static_cast<double>(total));
  return r;
}

MetricsReport refit_and_test(const Dataset& train, const Dataset& validation, const Dataset& test,
                             const LinkSpec& link, double gamma, const FitConfig& config, double threshold) {
  const Dataset pooled = Dataset::concat(train, validation);
  const FitResult fr = fit(pooled, link, PriorSpec{gamma}, config);
  require_matching_features(fr.model, test);
  const auto preds = classify_rows(fr.model, test.design, threshold);
  return MetricsReport::from_counts({"label"}, {confusion(preds, to_labels(test.labels))});
}

RepeatedSummary RepeatedSummary::from(std::vector<SplitMetrics> splits) {
  if (splits.empty()) fail(Errc::invalid_argument, "summary needs at least one split");
  RepeatedSummary s;
  s.splits = std::move(splits);
  const double k = static_cast<double>(s.splits.size());

  auto field = [](SplitMetrics& m, int f) -> double& {
    switch (f) {
      case 0: return m.micro.f1;
      case 1: return m.macro.f1;
      case 2: return m.micro.recall;
      case 3: return m.macro.recall;
      case 4: return m.micro.precision;
      default: return m.macro.precision;
    }
  };
  for (int f = 0; f < 6; ++f) {
    double sum = 0.0;
    for (auto& m : s.splits) sum += field(m, f);
    const double mean = sum / k;
    double ss = 0.0;
    for (auto& m : s.splits) ss += (field(m, f) - mean) * (field(m, f) - mean);
    field(s.mean, f) = mean;
    field(s.sd, f) = s.splits.size() > 1 ? std::sqrt(ss / (k - 1.0)) : 0.0;
  }
  return s;
}

void RepeatedSummary::write_csv(std::ostream& out) const {
  out << "split,micro_f1,macro_f1,micro_recall,macro_recall,micro_precision,macro_precision\n";
  auto row = [&](const std::string& label, const SplitMetrics& m) {
    out << label << ',' << fmt(m.micro.f1) << ',' << fmt(m.macro.f1) << ',' << fmt(m.micro.recall) << ','
        << fmt(m.macro.recall) << ',' << fmt(m.micro.precision) << ',' << fmt(m.macro.precision) << '\n';
  };
  for (std::size_t k = 0; k < splits.size(); ++k) row(std::to_string(k + 1), splits[k]);
  row("mean", mean);
  row("sd", sd);
}

void RepeatedSummary::write_csv(const std::string& path) const {
  auto out = open_out(path);
  write_csv(out);
}

void TextProtocolResult::write_params_csv(std::ostream& out) const {
  out << "split,category,nu,gamma,delta,validation_objective\n";
  for (const auto& s : splits) {
    for (const auto& c : s.categories) {
      out << s.split << ',' << c.category << ',';
      if (c.link) out << fmt(c.link->nu) << ',' << fmt(c.gamma) << ',' << fmt(c.link->delta);
      else out << "nan,nan,nan";
      out << ',' << fmt(c.validation_objective) << '\n';
    }
  }
}

void TextProtocolResult::write_results_csv(std::ostream& out) const {
  out << "split,category,nu,gamma,delta,objective_value,converged\n";
  for (const auto& s : splits) {
    for (const auto& c : s.categories) {
      for (const auto& r : c.grid.rows) {
        out << s.split << ',' << c.category << ',' << fmt(r.nu) << ',' << fmt(r.gamma) << ',' << fmt(r.delta) << ','
            << fmt(r.objective_value) << ',' << (r.converged ? 1 : 0) << '\n';
      }
    }
  }
}

TextProtocolResult run_text_protocol(const Corpus& corpus, const Stoplist& stoplist, const TextProtocolConfig& config) {
  corpus.validate();
  config.grid.validate();
  if (config.splits < 1) fail(Errc::invalid_argument, "split count must be positive");
  if (corpus.categories.empty()) fail(Errc::invalid_argument, "corpus has no categories");

  const std::size_t n = corpus.documents.size();
  std::vector<WordSet> words;
  words.reserve(n);
  for (const auto& d : corpus.documents) words.push_back(document_words(d.text, stoplist));

  TextProtocolResult result;
  std::vector<SplitMetrics> summaries;
  for (int split = 1; split <= config.splits; ++split) {
    const std::uint64_t split_seed = CounterRng::mix(config.seed ^ CounterRng::mix(static_cast<std::uint64_t>(split)));
    const SplitIndices idx = split_indices(n, split_seed);

    auto gather = [&](const std::vector<std::size_t>& rows) {
      std::vector<WordSet> out;
      for (auto r : rows) out.push_back(words[r]);
      return out;
    };
    const auto train_words = gather(idx.train);
    const auto val_words = gather(idx.validation);
    const auto test_words = gather(idx.test);

    SplitOutcome outcome;
    outcome.split = split;
    std::vector<ConfusionCounts> counts;
    for (const auto& category : corpus.categories) {
      auto labels_of = [&](const std::vector<std::size_t>& rows) {
        Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
        for (std::size_t k = 0; k < rows.size(); ++k) {
          const auto& ls = corpus.documents[rows[k]].labels;
          y[static_cast<Eigen::Index>(k)] = std::find(ls.begin(), ls.end(), category) != ls.end() ? 1.0 : 0.0;
        }
        return y;
      };

      const Eigen::VectorXd y_train = labels_of(idx.train);
      std::vector<bool> positive(idx.train.size());
      for (std::size_t k = 0; k < positive.size(); ++k) positive[k] = y_train[static_cast<Eigen::Index>(k)] == 1.0;
      const Vocabulary vocab = select_top_k(score_words(train_words, positive), config.top_k);

      CategoryOutcome co;
      co.category = category;
      co.vocabulary_size = vocab.size();
      co.vocabulary_truncated = vocab.truncated;

      const Eigen::VectorXd y_test = labels_of(idx.test);
      std::vector<int> preds(idx.test.size(), 0);
      if (!vocab.words.empty()) {
        auto make = [&](const std::vector<WordSet>& ws, Eigen::VectorXd y) {
          Dataset d;
          d.design = feature_matrix(ws, vocab);
          d.labels = std::move(y);
          d.feature_names = vocab.words;
          return d;
        };
        const Dataset train = make(train_words, y_train);
        const Dataset val = make(val_words, labels_of(idx.validation));
        const Dataset test = make(test_words, y_test);

        co.grid = grid_search(train, val, LinkFamily::skew, config.grid, Objective::f1, config.fit, config.threads);
        if (co.grid.best) {
          co.link = co.grid.best_link(LinkFamily::skew);
          co.gamma = co.grid.best_gamma();
          co.validation_objective = co.grid.rows[*co.grid.best].objective_value;
          try {
            const FitResult fr = fit(Dataset::concat(train, val), *co.link, PriorSpec{co.gamma}, config.fit);
            preds = classify_rows(fr.model, test.design, config.threshold);
          } catch (const Error&) {
            // A refit that cannot run (e.g. no positives left) predicts the negative class.
          }
        }
      }
      std::vector<int> truth(idx.test.size());
      for (std::size_t k = 0; k < truth.size(); ++k) truth[k] = y_test[static_cast<Eigen::Index>(k)] == 1.0 ? 1 : 0;
      counts.push_back(confusion(preds, truth));
      outcome.categories.push_back(std::move(co));
    }
    outcome.report = MetricsReport::from_counts(corpus.categories, counts);
    summaries.push_back({outcome.report.micro, outcome.report.macro});
    result.splits.push_back(std::move(outcome));
  }
  result.summary = RepeatedSummary::from(std::move(summaries));
  return result;
}

TextProtocolResult run_dataset_protocol(const Dataset& data, const DatasetProtocolConfig& config) {
  data.validate();
  config.grid.validate();
  if (config.splits < 1) fail(Errc::invalid_argument, "split count must be positive");

  TextProtocolResult result;
  std::vector<SplitMetrics> summaries;
  for (int split = 1; split <= config.splits; ++split) {
    const std::uint64_t split_seed = CounterRng::mix(config.seed ^ CounterRng::mix(static_cast<std::uint64_t>(split)));
    const DataSplit parts = split_dataset(data, split_seed);

    CategoryOutcome co;
    co.category = "label";
    co.vocabulary_size = static_cast<std::size_t>(data.cols());
    co.grid = grid_search(parts.train, parts.validation, config.family, config.grid, config.objective, config.fit,
                          config.threads);
    std::vector<int> preds(static_cast<std::size_t>(parts.test.rows()), 0);
    if (co.grid.best) {
      co.link = co.grid.best_link(config.family);
      co.gamma = co.grid.best_gamma();
      co.validation_objective = co.grid.rows[*co.grid.best].objective_value;
      try {
        const FitResult fr =
            fit(Dataset::concat(parts.train, parts.validation), *co.link, PriorSpec{co.gamma}, config.fit);
        preds = classify_rows(fr.model, parts.test.design, config.threshold);
      } catch (const Error&) {
      }
    }
    SplitOutcome outcome;
    outcome.split = split;
    outcome.report = MetricsReport::from_counts({"label"}, {confusion(preds, to_labels(parts.test.labels))});
    outcome.categories.push_back(std::move(co));
    summaries.push_back({outcome.report.micro, outcome.report.macro});
    result.splits.push_back(std::move(outcome));
  }
  result.summary = RepeatedSummary::from(std::move(summaries));
  return result;
}

}  // namespace fstglm
