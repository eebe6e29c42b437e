#include "fstglm/fstglm.h"

#include "fstglm/curves.hpp"
#include "fstglm/dataset.hpp"
#include "fstglm/em.hpp"
#include "fstglm/error.hpp"
#include "fstglm/evalkit.hpp"
#include "fstglm/model.hpp"
#include "fstglm/simgen.hpp"
#include "fstglm/textprep.hpp"

#include <filesystem>
#include <fstream>
#include <new>
#include <string>

using namespace fstglm;

struct fst_dataset {
  Dataset data;
};
struct fst_model {
  FittedModel model;
};
struct fst_trace {
  FitTrace trace;
};
struct fst_grid_result {
  GridResult result;
  LinkFamily family;
};

namespace {

thread_local std::string g_last_error;

fst_status to_status(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return FST_E_INVALID_ARGUMENT;
    case Errc::io: return FST_E_IO;
    case Errc::parse: return FST_E_PARSE;
    case Errc::schema: return FST_E_SCHEMA;
    case Errc::numerical: return FST_E_NUMERICAL;
    case Errc::degenerate: return FST_E_DEGENERATE;
  }
  return FST_E_INTERNAL;
}

template <class Fn>
fst_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return FST_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown failure";
  }
  return FST_E_INTERNAL;
}

void need(const void* p, const char* what) {
  if (!p) fail(Errc::invalid_argument, std::string(what) + " must not be NULL");
}

LinkSpec to_link(const fst_link* link) {
  need(link, "link");
  LinkSpec s;
  if (link->family == FST_LINK_SYMMETRIC) s.family = LinkFamily::symmetric;
  else if (link->family == FST_LINK_SKEW) s.family = LinkFamily::skew;
  else fail(Errc::invalid_argument, "unknown link family " + std::to_string(link->family));
  s.nu = link->nu;
  s.delta = link->delta;
  s.validate();
  return s;
}

fst_link from_link(const LinkSpec& s) {
  return {s.family == LinkFamily::symmetric ? FST_LINK_SYMMETRIC : FST_LINK_SKEW, s.nu, s.delta};
}

LinkFamily to_family(int family) {
  if (family == FST_LINK_SYMMETRIC) return LinkFamily::symmetric;
  if (family == FST_LINK_SKEW) return LinkFamily::skew;
  fail(Errc::invalid_argument, "unknown link family " + std::to_string(family));
}

Objective to_objective(int objective) {
  if (objective == FST_OBJECTIVE_MISCLASSIFICATION) return Objective::misclassification;
  if (objective == FST_OBJECTIVE_F1) return Objective::f1;
  fail(Errc::invalid_argument, "unknown objective " + std::to_string(objective));
}

FitConfig to_config(const fst_fit_config* c) {
  FitConfig f;
  if (c) {
    f.delta_tol = c->delta_tol;
    f.eps_init = c->eps_init;
    f.max_iter = c->max_iter;
    f.zero_threshold = c->zero_threshold;
    f.intercept = c->intercept != 0;
  }
  f.validate();
  return f;
}

std::vector<double> values(const double* p, std::size_t n, const char* name) {
  if (n > 0) need(p, name);
  return std::vector<double>(p, p + n);
}

GridSpec to_grid(const fst_grid* g) {
  need(g, "grid");
  GridSpec s{values(g->nu, g->n_nu, "grid nu"), values(g->gamma, g->n_gamma, "grid gamma"),
             values(g->delta, g->n_delta, "grid delta")};
  s.validate();
  return s;
}

fst_metrics to_metrics(const ConfusionCounts& c) {
  const PRF m = precision_recall_f1(c);
  fst_metrics out{};
  out.tp = c.tp;
  out.fp = c.fp;
  out.fn = c.fn;
  out.tn = c.tn;
  out.misclassification =
      c.total() > 0 ? static_cast<double>(c.fp + c.fn) / static_cast<double>(c.total()) : 0.0;
  out.precision = m.precision;
  out.recall = m.recall;
  out.f1 = m.f1;
  return out;
}

std::vector<int> labels_of(const Dataset& d) {
  std::vector<int> y(static_cast<std::size_t>(d.rows()));
  for (Eigen::Index i = 0; i < d.rows(); ++i) y[static_cast<std::size_t>(i)] = d.labels[i] == 1.0 ? 1 : 0;
  return y;
}

void write_protocol(const TextProtocolResult& r, const std::string& dir, fst_protocol_summary* summary) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(Errc::io, "cannot create directory '" + dir + "': " + ec.message());
  auto open = [&](const char* name) {
    const std::string path = dir + "/" + name;
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::io, "cannot open '" + path + "' for writing");
    return out;
  };
  {
    auto out = open("params.csv");
    r.write_params_csv(out);
  }
  {
    auto out = open("results.csv");
    r.write_results_csv(out);
  }
  {
    auto out = open("summary.csv");
    r.summary.write_csv(out);
  }
  if (summary) {
    summary->splits = static_cast<int>(r.splits.size());
    summary->micro_f1_mean = r.summary.mean.micro.f1;
    summary->micro_f1_sd = r.summary.sd.micro.f1;
    summary->macro_f1_mean = r.summary.mean.macro.f1;
    summary->macro_f1_sd = r.summary.sd.macro.f1;
  }
}

}  // namespace

extern "C" {

const char* fst_last_error(void) { return g_last_error.c_str(); }

const char* fst_version(void) { return "1.0.0"; }

const char* fst_status_name(fst_status status) {
  switch (status) {
    case FST_OK: return "ok";
    case FST_E_INVALID_ARGUMENT: return "invalid argument";
    case FST_E_IO: return "i/o error";
    case FST_E_PARSE: return "parse error";
    case FST_E_SCHEMA: return "schema error";
    case FST_E_NUMERICAL: return "numerical failure";
    case FST_E_DEGENERATE: return "degenerate data";
    case FST_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void fst_fit_config_default(fst_fit_config* out) {
  if (!out) return;
  const FitConfig f;
  *out = {f.delta_tol, f.eps_init, f.max_iter, f.zero_threshold, f.intercept ? 1 : 0};
}

fst_status fst_grid_default(int preset, fst_grid* out) {
  return guarded([&] {
    need(out, "out");
    static const GridSpec sim = GridSpec::simulation_default();
    static const GridSpec text = GridSpec::text_default();
    const GridSpec* g = nullptr;
    if (preset == FST_GRID_SIMULATION) g = &sim;
    else if (preset == FST_GRID_TEXT) g = &text;
    else fail(Errc::invalid_argument, "unknown grid preset " + std::to_string(preset));
    *out = {g->nu_values.data(),    g->nu_values.size(),    g->gamma_values.data(),
            g->gamma_values.size(), g->delta_values.data(), g->delta_values.size()};
  });
}

fst_status fst_dataset_read(const char* path, fst_dataset** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new fst_dataset{read_dataset_csv(std::string(path))};
  });
}

fst_status fst_dataset_write(const fst_dataset* data, const char* path) {
  return guarded([&] {
    need(data, "data");
    need(path, "path");
    write_dataset_csv(data->data, std::string(path));
  });
}

fst_status fst_dataset_simulate(int example, uint64_t seed, int rows, fst_dataset** out) {
  return guarded([&] {
    need(out, "out");
    *out = new fst_dataset{simulate(example, seed, rows)};
  });
}

fst_status fst_dataset_split(const fst_dataset* data, uint64_t seed, fst_dataset** train, fst_dataset** validation,
                             fst_dataset** test) {
  return guarded([&] {
    need(data, "data");
    need(train, "train");
    need(validation, "validation");
    need(test, "test");
    DataSplit s = split_dataset(data->data, seed);
    *train = new fst_dataset{std::move(s.train)};
    *validation = new fst_dataset{std::move(s.validation)};
    *test = new fst_dataset{std::move(s.test)};
  });
}

size_t fst_dataset_rows(const fst_dataset* data) { return data ? static_cast<size_t>(data->data.rows()) : 0; }
size_t fst_dataset_cols(const fst_dataset* data) { return data ? static_cast<size_t>(data->data.cols()) : 0; }
void fst_dataset_free(fst_dataset* data) { delete data; }

fst_status fst_fit(const fst_dataset* data, const fst_link* link, double gamma, const fst_fit_config* config,
                   fst_model** model_out, fst_trace** trace_out) {
  return guarded([&] {
    need(data, "data");
    need(model_out, "model_out");
    FitResult r = fit(data->data, to_link(link), PriorSpec{gamma}, to_config(config));
    auto* model = new fst_model{std::move(r.model)};
    if (trace_out) {
      try {
        *trace_out = new fst_trace{std::move(r.trace)};
      } catch (...) {
        delete model;
        throw;
      }
    }
    *model_out = model;
  });
}

fst_status fst_trace_write(const fst_trace* trace, const char* path) {
  return guarded([&] {
    need(trace, "trace");
    need(path, "path");
    trace->trace.write_csv(std::string(path));
  });
}

int fst_trace_iterations(const fst_trace* trace) { return trace ? trace->trace.iterations : 0; }
int fst_trace_converged(const fst_trace* trace) { return trace && trace->trace.converged ? 1 : 0; }
void fst_trace_free(fst_trace* trace) { delete trace; }

fst_status fst_model_save(const fst_model* model, const char* path) {
  return guarded([&] {
    need(model, "model");
    need(path, "path");
    save_model(model->model, std::string(path));
  });
}

fst_status fst_model_load(const char* path, fst_model** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new fst_model{load_model(std::string(path))};
  });
}

size_t fst_model_size(const fst_model* model) { return model ? static_cast<size_t>(model->model.beta.size()) : 0; }

fst_status fst_model_coefficients(const fst_model* model, double* out, size_t n) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    const auto& b = model->model.beta;
    if (n != static_cast<size_t>(b.size()))
      fail(Errc::invalid_argument, "buffer holds " + std::to_string(n) + " values, model has " + std::to_string(b.size()));
    for (Eigen::Index j = 0; j < b.size(); ++j) out[j] = b[j];
  });
}

size_t fst_model_zero_count(const fst_model* model) { return model ? sparsity_count(model->model) : 0; }

fst_status fst_model_link(const fst_model* model, fst_link* out) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    *out = from_link(model->model.link);
  });
}

double fst_model_gamma(const fst_model* model) { return model ? model->model.gamma : 0.0; }
int fst_model_converged(const fst_model* model) { return model && model->model.converged ? 1 : 0; }
void fst_model_free(fst_model* model) { delete model; }

fst_status fst_predict(const fst_model* model, const fst_dataset* data, double threshold, double* proba, int* labels,
                       size_t n) {
  return guarded([&] {
    need(model, "model");
    need(data, "data");
    require_matching_features(model->model, data->data);
    if (n != static_cast<size_t>(data->data.rows()))
      fail(Errc::invalid_argument, "buffers hold " + std::to_string(n) + " rows, data has " +
                                       std::to_string(data->data.rows()));
    const Eigen::VectorXd p = predict_proba_rows(model->model, data->data.design);
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      if (proba) proba[i] = p[i];
      if (labels) labels[i] = classify_probability(p[i], threshold);
    }
  });
}

fst_status fst_predict_write(const fst_model* model, const fst_dataset* data, double threshold, const char* path) {
  return guarded([&] {
    need(model, "model");
    need(data, "data");
    need(path, "path");
    require_matching_features(model->model, data->data);
    const Eigen::VectorXd p = predict_proba_rows(model->model, data->data.design);
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::io, std::string("cannot open '") + path + "' for writing");
    out << "row,probability,prediction,label\n";
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      out << (i + 1) << ',' << format_double(p[i]) << ',' << classify_probability(p[i], threshold) << ','
          << (data->data.labels[i] == 1.0 ? 1 : 0) << '\n';
    }
    if (!out) fail(Errc::io, std::string("write to '") + path + "' failed");
  });
}

fst_status fst_evaluate(const fst_model* model, const fst_dataset* data, double threshold, fst_metrics* out) {
  return guarded([&] {
    need(model, "model");
    need(data, "data");
    need(out, "out");
    require_matching_features(model->model, data->data);
    const auto preds = classify_rows(model->model, data->data.design, threshold);
    *out = to_metrics(confusion(preds, labels_of(data->data)));
  });
}

fst_status fst_grid_search(const fst_dataset* train, const fst_dataset* validation, int family, const fst_grid* grid,
                           int objective, const fst_fit_config* config, unsigned threads, fst_grid_result** out) {
  return guarded([&] {
    need(train, "train");
    need(validation, "validation");
    need(out, "out");
    const LinkFamily fam = to_family(family);
    GridResult r = grid_search(train->data, validation->data, fam, to_grid(grid), to_objective(objective),
                               to_config(config), threads);
    *out = new fst_grid_result{std::move(r), fam};
  });
}

size_t fst_grid_result_rows(const fst_grid_result* result) { return result ? result->result.rows.size() : 0; }

fst_status fst_grid_result_best(const fst_grid_result* result, fst_link* link, double* gamma,
                                double* objective_value) {
  return guarded([&] {
    need(result, "result");
    const GridResult& r = result->result;
    const LinkSpec best = r.best_link(result->family);
    if (link) *link = from_link(best);
    if (gamma) *gamma = r.best_gamma();
    if (objective_value) *objective_value = r.rows[*r.best].objective_value;
  });
}

fst_status fst_grid_result_write(const fst_grid_result* result, const char* path) {
  return guarded([&] {
    need(result, "result");
    need(path, "path");
    result->result.write_csv(std::string(path));
  });
}

void fst_grid_result_free(fst_grid_result* result) { delete result; }

fst_status fst_refit_evaluate(const fst_dataset* train, const fst_dataset* validation, const fst_dataset* test,
                              const fst_link* link, double gamma, const fst_fit_config* config, double threshold,
                              fst_metrics* out) {
  return guarded([&] {
    need(train, "train");
    need(validation, "validation");
    need(test, "test");
    need(out, "out");
    const MetricsReport r =
        refit_and_test(train->data, validation->data, test->data, to_link(link), gamma, to_config(config), threshold);
    *out = to_metrics(r.counts.front());
  });
}

fst_status fst_dataset_protocol(const fst_dataset* data, int family, const fst_grid* grid, int objective, int splits,
                                uint64_t seed, const fst_fit_config* config, double threshold, unsigned threads,
                                const char* out_dir, fst_protocol_summary* summary) {
  return guarded([&] {
    need(data, "data");
    need(out_dir, "out_dir");
    DatasetProtocolConfig c;
    c.family = to_family(family);
    c.grid = to_grid(grid);
    c.objective = to_objective(objective);
    c.splits = splits;
    c.seed = seed;
    c.fit = to_config(config);
    c.threshold = threshold;
    c.threads = threads;
    write_protocol(run_dataset_protocol(data->data, c), out_dir, summary);
  });
}

fst_status fst_text_protocol(const char* corpus_path, const char* stoplist_path, size_t top_k, const fst_grid* grid,
                             int splits, uint64_t seed, const fst_fit_config* config, double threshold,
                             unsigned threads, const char* out_dir, fst_protocol_summary* summary) {
  return guarded([&] {
    need(corpus_path, "corpus_path");
    need(stoplist_path, "stoplist_path");
    need(out_dir, "out_dir");
    TextProtocolConfig c;
    c.top_k = top_k;
    c.grid = to_grid(grid);
    c.splits = splits;
    c.seed = seed;
    c.fit = to_config(config);
    c.threshold = threshold;
    c.threads = threads;
    const Corpus corpus = read_corpus(corpus_path);
    const Stoplist stoplist = Stoplist::load(stoplist_path);
    write_protocol(run_text_protocol(corpus, stoplist, c), out_dir, summary);
  });
}

fst_status fst_curve_write(const char* kind, double nu, double delta, double gamma, const char* path) {
  return guarded([&] {
    need(kind, "kind");
    need(path, "path");
    make_curve(kind, nu, delta, gamma).write_csv(std::string(path));
  });
}

}  // extern "C"
