// Command-line driver. Talks to the library only through the C interface.
//
// Exit status: 0 success, 1 I/O or internal failure, 2 usage or invalid
// argument, 3 malformed input file, 4 numerical failure or degenerate data.

#include "fstglm/fstglm.h"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

enum Exit { kOk = 0, kFailure = 1, kUsage = 2, kInput = 3, kNumerical = 4 };

struct CommandError {
  int exit_code;
  std::string message;
};

int exit_for(fst_status s) {
  switch (s) {
    case FST_OK: return kOk;
    case FST_E_INVALID_ARGUMENT: return kUsage;
    case FST_E_PARSE:
    case FST_E_SCHEMA: return kInput;
    case FST_E_NUMERICAL:
    case FST_E_DEGENERATE: return kNumerical;
    default: return kFailure;
  }
}

void check(fst_status s) {
  if (s != FST_OK) throw CommandError{exit_for(s), std::string(fst_status_name(s)) + ": " + fst_last_error()};
}

// Small RAII holders for the opaque handles.
template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
  T** out() { return &p; }
  operator T*() const { return p; }
};
using Data = Handle<fst_dataset, fst_dataset_free>;
using Model = Handle<fst_model, fst_model_free>;
using Trace = Handle<fst_trace, fst_trace_free>;
using Grid = Handle<fst_grid_result, fst_grid_result_free>;

fst_link make_link(double nu, double delta) {
  return {delta == 1.0 ? FST_LINK_SYMMETRIC : FST_LINK_SKEW, nu, delta};
}

std::string link_text(const fst_link& l) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "nu=%g delta=%g (%s)", l.nu, l.delta,
                l.family == FST_LINK_SYMMETRIC ? "symmetric" : "skew");
  return buf;
}

struct FitFlags {
  fst_fit_config config{};
  bool intercept = false;

  FitFlags() { fst_fit_config_default(&config); }

  void attach(CLI::App* cmd) {
    cmd->add_option("--delta-tol", config.delta_tol, "relative-change stopping threshold")
        ->check(CLI::Range(1e-300, 1.0 - 1e-12))
        ->capture_default_str();
    cmd->add_option("--eps-init", config.eps_init, "ridge jitter of the starting point")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--max-iter", config.max_iter, "iteration cap")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--zero-threshold", config.zero_threshold, "coefficients below this are frozen at 0")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_flag("--intercept", intercept, "add a leading constant column");
  }

  const fst_fit_config* get() {
    config.intercept = intercept ? 1 : 0;
    return &config;
  }
};

void write_metrics(const fst_metrics& m, std::ostream& out) {
  out << "misclassification,precision,recall,f1,tp,fp,fn,tn\n";
  out.precision(17);
  out << m.misclassification << ',' << m.precision << ',' << m.recall << ',' << m.f1 << ',' << m.tp << ',' << m.fp
      << ',' << m.fn << ',' << m.tn << '\n';
}

void emit_metrics(const fst_metrics& m, const std::string& path) {
  if (path.empty() || path == "-") {
    write_metrics(m, std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CommandError{kFailure, "cannot open '" + path + "' for writing"};
  write_metrics(m, out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse Student-t / skew Student-t binary regression"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(fst_version()));
  app.set_config("--config", "", "INI/TOML file with option values; unknown keys are rejected");
  app.allow_config_extras(CLI::config_extras_mode::error);

  std::uint64_t seed = 1;
  unsigned threads = 0;
  double threshold = 0.5;
  std::function<void()> run;

  // simulate
  auto* sim = app.add_subcommand("simulate", "generate an example dataset");
  int example = 1;
  int rows = 100;
  std::string sim_out;
  sim->add_option("--example", example, "design number")->required()->check(CLI::IsMember({1, 2}));
  sim->add_option("--seed", seed, "random seed")->capture_default_str();
  sim->add_option("--rows", rows, "observations")->check(CLI::PositiveNumber)->capture_default_str();
  sim->add_option("--out", sim_out, "output CSV")->required();
  sim->callback([&] {
    run = [&] {
      Data d;
      check(fst_dataset_simulate(example, seed, rows, d.out()));
      check(fst_dataset_write(d, sim_out.c_str()));
      std::cout << "wrote " << fst_dataset_rows(d) << " x " << fst_dataset_cols(d) << " to " << sim_out << '\n';
    };
  });

  // fit
  auto* fitc = app.add_subcommand("fit", "fit a model by MAP-EM");
  std::string fit_data, fit_model, fit_trace;
  double nu = 8.0, delta = 1.0, gamma = 1.0;
  FitFlags fit_flags;
  fitc->add_option("--data", fit_data, "training CSV")->required();
  fitc->add_option("--nu", nu, "degrees of freedom")->check(CLI::PositiveNumber)->capture_default_str();
  fitc->add_option("--delta", delta, "skewness (1 = symmetric)")->check(CLI::PositiveNumber)->capture_default_str();
  fitc->add_option("--gamma", gamma, "sparsity hyperparameter")->check(CLI::PositiveNumber)->capture_default_str();
  fitc->add_option("--model", fit_model, "output model file")->required();
  fitc->add_option("--trace", fit_trace, "output per-iteration trace CSV");
  fit_flags.attach(fitc);
  fitc->callback([&] {
    run = [&] {
      Data d;
      check(fst_dataset_read(fit_data.c_str(), d.out()));
      const fst_link link = make_link(nu, delta);
      Model m;
      Trace t;
      check(fst_fit(d, &link, gamma, fit_flags.get(), m.out(), t.out()));
      check(fst_model_save(m, fit_model.c_str()));
      if (!fit_trace.empty()) check(fst_trace_write(t, fit_trace.c_str()));
      std::cout << (fst_trace_converged(t) ? "converged" : "not converged") << " after " << fst_trace_iterations(t)
                << " iterations; " << fst_model_zero_count(m) << " of " << fst_model_size(m)
                << " coefficients are zero\n";
    };
  });

  // predict
  auto* pred = app.add_subcommand("predict", "probabilities and 0/1 decisions");
  std::string pred_model, pred_data, pred_out;
  pred->add_option("--model", pred_model, "model file")->required();
  pred->add_option("--data", pred_data, "data CSV")->required();
  pred->add_option("--out", pred_out, "output CSV")->required();
  pred->add_option("--threshold", threshold, "decision threshold")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  pred->callback([&] {
    run = [&] {
      Model m;
      Data d;
      check(fst_model_load(pred_model.c_str(), m.out()));
      check(fst_dataset_read(pred_data.c_str(), d.out()));
      check(fst_predict_write(m, d, threshold, pred_out.c_str()));
    };
  });

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "misclassification, precision, recall and F1");
  std::string eval_model, eval_data, eval_out;
  eval->add_option("--model", eval_model, "model file")->required();
  eval->add_option("--data", eval_data, "data CSV")->required();
  eval->add_option("--out", eval_out, "metrics CSV (default stdout)");
  eval->add_option("--threshold", threshold, "decision threshold")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  eval->callback([&] {
    run = [&] {
      Model m;
      Data d;
      check(fst_model_load(eval_model.c_str(), m.out()));
      check(fst_dataset_read(eval_data.c_str(), d.out()));
      fst_metrics met{};
      check(fst_evaluate(m, d, threshold, &met));
      emit_metrics(met, eval_out);
    };
  });

  // grid
  auto* grid = app.add_subcommand("grid", "tune (nu, gamma, delta) on a validation set");
  std::string g_train, g_val, g_test, g_data, g_corpus, g_stoplist, g_results, g_report, g_outdir = ".";
  std::string family = "skew", objective, preset;
  std::vector<double> nu_grid, gamma_grid, delta_grid;
  std::size_t top_k = 100;
  int splits = 5;
  FitFlags grid_flags;
  auto* o_train = grid->add_option("--train", g_train, "training CSV");
  auto* o_val = grid->add_option("--val", g_val, "validation CSV");
  auto* o_test = grid->add_option("--test", g_test, "test CSV (refit on train + val, report here)");
  auto* o_data = grid->add_option("--data", g_data, "single CSV for the repeated-split protocol");
  auto* o_corpus = grid->add_option("--corpus", g_corpus, "corpus file for the text protocol");
  auto* o_stop = grid->add_option("--stoplist", g_stoplist, "stoplist, one word per line");
  o_train->needs(o_val);
  o_val->needs(o_train);
  o_test->needs(o_train);
  o_corpus->needs(o_stop);
  o_stop->needs(o_corpus);
  o_train->excludes(o_data)->excludes(o_corpus);
  o_data->excludes(o_corpus);
  grid->add_option("--family", family, "link family")->check(CLI::IsMember({"skew", "symmetric"}))->capture_default_str();
  grid->add_option("--objective", objective, "misclassification or f1 (default: f1 for corpora)")
      ->check(CLI::IsMember({"misclassification", "f1"}));
  grid->add_option("--preset", preset, "simulation or text grid (default: text for corpora)")
      ->check(CLI::IsMember({"simulation", "text"}));
  grid->add_option("--nu-grid", nu_grid, "comma-separated nu values")->delimiter(',')->check(CLI::PositiveNumber);
  grid->add_option("--gamma-grid", gamma_grid, "comma-separated gamma values")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  grid->add_option("--delta-grid", delta_grid, "comma-separated delta values")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  grid->add_option("--top-k", top_k, "vocabulary size per category")->check(CLI::PositiveNumber)->capture_default_str();
  grid->add_option("--splits", splits, "repeated splits")->check(CLI::PositiveNumber)->capture_default_str();
  grid->add_option("--seed", seed, "random seed")->capture_default_str();
  grid->add_option("--threads", threads, "worker threads (0 = all cores)")->capture_default_str();
  grid->add_option("--threshold", threshold, "decision threshold")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  grid->add_option("--results", g_results, "results table CSV (train/val mode)");
  grid->add_option("--report", g_report, "test metrics CSV (train/val/test mode, default stdout)");
  grid->add_option("--out-dir", g_outdir, "output directory (protocol modes)")->capture_default_str();
  grid_flags.attach(grid);
  grid->callback([&] {
    if (g_train.empty() && g_data.empty() && g_corpus.empty())
      throw CLI::ValidationError("grid", "one of --train/--val, --data or --corpus/--stoplist is required");
    run = [&] {
      const bool text = !g_corpus.empty();
      if (preset.empty()) preset = text ? "text" : "simulation";
      if (objective.empty()) objective = text ? "f1" : "misclassification";
      fst_grid g{};
      check(fst_grid_default(preset == "text" ? FST_GRID_TEXT : FST_GRID_SIMULATION, &g));
      if (!nu_grid.empty()) g.nu = nu_grid.data(), g.n_nu = nu_grid.size();
      if (!gamma_grid.empty()) g.gamma = gamma_grid.data(), g.n_gamma = gamma_grid.size();
      if (!delta_grid.empty()) g.delta = delta_grid.data(), g.n_delta = delta_grid.size();
      const int fam = family == "symmetric" ? FST_LINK_SYMMETRIC : FST_LINK_SKEW;
      const int obj = objective == "f1" ? FST_OBJECTIVE_F1 : FST_OBJECTIVE_MISCLASSIFICATION;

      if (!g_train.empty()) {
        Data tr, va;
        check(fst_dataset_read(g_train.c_str(), tr.out()));
        check(fst_dataset_read(g_val.c_str(), va.out()));
        Grid res;
        check(fst_grid_search(tr, va, fam, &g, obj, grid_flags.get(), threads, res.out()));
        if (!g_results.empty()) check(fst_grid_result_write(res, g_results.c_str()));
        fst_link best{};
        double best_gamma = 0.0, best_value = 0.0;
        check(fst_grid_result_best(res, &best, &best_gamma, &best_value));
        std::cout << "best " << link_text(best) << " gamma=" << best_gamma << " validation " << objective << "="
                  << best_value << '\n';
        if (!g_test.empty()) {
          Data te;
          check(fst_dataset_read(g_test.c_str(), te.out()));
          fst_metrics met{};
          check(fst_refit_evaluate(tr, va, te, &best, best_gamma, grid_flags.get(), threshold, &met));
          emit_metrics(met, g_report);
        }
        return;
      }

      std::error_code ec;
      std::filesystem::create_directories(g_outdir, ec);
      if (ec) throw CommandError{kFailure, "cannot create '" + g_outdir + "': " + ec.message()};
      fst_protocol_summary summary{};
      if (text) {
        check(fst_text_protocol(g_corpus.c_str(), g_stoplist.c_str(), top_k, &g, splits, seed, grid_flags.get(),
                                threshold, threads, g_outdir.c_str(), &summary));
      } else {
        Data d;
        check(fst_dataset_read(g_data.c_str(), d.out()));
        check(fst_dataset_protocol(d, fam, &g, obj, splits, seed, grid_flags.get(), threshold, threads,
                                   g_outdir.c_str(), &summary));
      }
      std::cout << summary.splits << " splits: micro-F1 " << summary.micro_f1_mean << " (sd " << summary.micro_f1_sd
                << "), macro-F1 " << summary.macro_f1_mean << " (sd " << summary.macro_f1_sd << "); tables in "
                << g_outdir << '\n';
    };
  });

  // curve
  auto* curve = app.add_subcommand("curve", "plot-point tables");
  std::string kind, curve_out;
  double c_nu = 8.0, c_delta = 1.0, c_gamma = 1.0;
  curve->add_option("kind", kind, "link, qq, hyperprior or skewpdf")
      ->required()
      ->check(CLI::IsMember({"link", "qq", "hyperprior", "skewpdf"}));
  curve->add_option("--nu", c_nu, "degrees of freedom")->check(CLI::PositiveNumber)->capture_default_str();
  curve->add_option("--delta", c_delta, "skewness")->check(CLI::PositiveNumber)->capture_default_str();
  curve->add_option("--gamma", c_gamma, "hyperprior parameter")->check(CLI::PositiveNumber)->capture_default_str();
  curve->add_option("--out", curve_out, "output CSV")->required();
  curve->callback([&] {
    run = [&] { check(fst_curve_write(kind.c_str(), c_nu, c_delta, c_gamma, curve_out.c_str())); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (run) run();
  } catch (const CommandError& e) {
    std::cerr << "error: " << e.message << '\n';
    return e.exit_code;
  }
  return kOk;
}
