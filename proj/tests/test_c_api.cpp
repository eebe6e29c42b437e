// Exercises the shared library through its C interface only.

#include "fstglm/fstglm.h"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "fstglm_c_api_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(fst_version()) == "1.0.0");
  CHECK(std::string(fst_status_name(FST_OK)) == "ok");
  CHECK(std::string(fst_status_name(FST_E_DEGENERATE)) == "degenerate data");
}

TEST_CASE("simulate, fit, save, load, predict") {
  fst_dataset* data = nullptr;
  REQUIRE(fst_dataset_simulate(1, 7, 100, &data) == FST_OK);
  CHECK(fst_dataset_rows(data) == 100);
  CHECK(fst_dataset_cols(data) == 10);

  fst_fit_config cfg;
  fst_fit_config_default(&cfg);
  CHECK(cfg.delta_tol == 0.005);
  const fst_link link{FST_LINK_SKEW, 8.0, 2.0};
  fst_model* model = nullptr;
  fst_trace* trace = nullptr;
  REQUIRE(fst_fit(data, &link, 0.1, &cfg, &model, &trace) == FST_OK);
  CHECK(fst_trace_iterations(trace) >= 1);
  CHECK(fst_model_size(model) == 10);
  CHECK(fst_model_gamma(model) == 0.1);

  const fs::path mpath = scratch("model.json");
  REQUIRE(fst_model_save(model, mpath.c_str()) == FST_OK);
  fst_model* back = nullptr;
  REQUIRE(fst_model_load(mpath.c_str(), &back) == FST_OK);
  std::vector<double> b1(10), b2(10);
  fst_model_coefficients(model, b1.data(), b1.size());
  fst_model_coefficients(back, b2.data(), b2.size());
  CHECK(b1 == b2);
  fst_link got{};
  fst_model_link(back, &got);
  CHECK(got.family == FST_LINK_SKEW);
  CHECK(got.delta == 2.0);

  std::vector<double> p(100);
  std::vector<int> y(100);
  REQUIRE(fst_predict(back, data, 0.5, p.data(), y.data(), 100) == FST_OK);
  for (std::size_t i = 0; i < 100; ++i) CHECK(y[i] == (p[i] > 0.5 ? 1 : 0));
  CHECK(fst_predict(back, data, 0.5, p.data(), y.data(), 99) == FST_E_INVALID_ARGUMENT);

  fst_metrics m{};
  REQUIRE(fst_evaluate(back, data, 0.5, &m) == FST_OK);
  CHECK(m.tp + m.fp + m.fn + m.tn == 100);

  fst_model_free(back);
  fst_model_free(model);
  fst_trace_free(trace);
  fst_dataset_free(data);
}

TEST_CASE("errors carry status and message") {
  fst_dataset* data = nullptr;
  CHECK(fst_dataset_simulate(3, 1, 100, &data) == FST_E_INVALID_ARGUMENT);
  CHECK(data == nullptr);
  CHECK(std::string(fst_last_error()).size() > 0);
  CHECK(fst_dataset_read("/nonexistent/data.csv", &data) == FST_E_IO);

  const fs::path bad = scratch("bad.csv");
  std::ofstream(bad) << "label,x1\n1,0\n0,zz\n";
  CHECK(fst_dataset_read(bad.c_str(), &data) == FST_E_PARSE);
  CHECK(std::string(fst_last_error()).find("line 3") != std::string::npos);

  const fs::path bad_model = scratch("bad_model.json");
  std::ofstream(bad_model) << "{\"format\": \"fstglm-model\", \"schema_version\": 99}";
  fst_model* model = nullptr;
  CHECK(fst_model_load(bad_model.c_str(), &model) == FST_E_SCHEMA);

  REQUIRE(fst_dataset_simulate(2, 1, 100, &data) == FST_OK);
  const fst_link link{FST_LINK_SYMMETRIC, 8.0, 1.0};
  CHECK(fst_fit(data, &link, 0.0, nullptr, &model, nullptr) == FST_E_INVALID_ARGUMENT);
  const fst_link inconsistent{FST_LINK_SYMMETRIC, 8.0, 2.0};
  CHECK(fst_fit(data, &inconsistent, 1.0, nullptr, &model, nullptr) == FST_E_INVALID_ARGUMENT);
  CHECK(fst_fit(nullptr, &link, 1.0, nullptr, &model, nullptr) == FST_E_INVALID_ARGUMENT);
  fst_dataset_free(data);
}

TEST_CASE("grid search and protocol") {
  fst_dataset* data = nullptr;
  REQUIRE(fst_dataset_simulate(2, 4, 200, &data) == FST_OK);
  fst_dataset *tr = nullptr, *va = nullptr, *te = nullptr;
  REQUIRE(fst_dataset_split(data, 4, &tr, &va, &te) == FST_OK);
  CHECK(fst_dataset_rows(tr) == 100);
  CHECK(fst_dataset_rows(te) == 50);

  const double nus[] = {2, 30}, gammas[] = {0.1, 1}, deltas[] = {0.5, 1, 2};
  const fst_grid grid{nus, 2, gammas, 2, deltas, 3};
  fst_grid_result* res = nullptr;
  REQUIRE(fst_grid_search(tr, va, FST_LINK_SKEW, &grid, FST_OBJECTIVE_MISCLASSIFICATION, nullptr, 0, &res) == FST_OK);
  CHECK(fst_grid_result_rows(res) == 12);
  fst_link best{};
  double gamma = 0, value = 0;
  REQUIRE(fst_grid_result_best(res, &best, &gamma, &value) == FST_OK);
  fst_metrics m{};
  REQUIRE(fst_refit_evaluate(tr, va, te, &best, gamma, nullptr, 0.5, &m) == FST_OK);
  CHECK(m.tp + m.fp + m.fn + m.tn == 50);
  fst_grid_result_free(res);

  fst_grid def{};
  REQUIRE(fst_grid_default(FST_GRID_TEXT, &def) == FST_OK);
  CHECK(def.n_nu == 5);
  CHECK(def.n_gamma == 5);
  CHECK(def.n_delta == 5);

  const fs::path out = scratch("protocol");
  fst_protocol_summary s{};
  REQUIRE(fst_dataset_protocol(data, FST_LINK_SKEW, &grid, FST_OBJECTIVE_MISCLASSIFICATION, 2, 1, nullptr, 0.5, 0,
                               out.c_str(), &s) == FST_OK);
  CHECK(s.splits == 2);
  CHECK(fs::exists(out / "params.csv"));
  CHECK(fs::exists(out / "results.csv"));
  CHECK(fs::exists(out / "summary.csv"));

  fst_dataset_free(tr);
  fst_dataset_free(va);
  fst_dataset_free(te);
  fst_dataset_free(data);
}

TEST_CASE("curves") {
  const fs::path p = scratch("link.csv");
  REQUIRE(fst_curve_write("link", 30.0, 1.0, 1.0, p.c_str()) == FST_OK);
  const std::string text = slurp(p);
  CHECK(text.find("\n0,0.5\n") != std::string::npos);
  CHECK(fst_curve_write("histogram", 30.0, 1.0, 1.0, p.c_str()) == FST_E_INVALID_ARGUMENT);
}
