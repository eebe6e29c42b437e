#include "fstglm/model.hpp"

#include "fstglm/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace fstglm {

using nlohmann::json;

void FittedModel::validate() const {
  link.validate();
  if (!beta.allFinite()) fail(Errc::invalid_argument, "model coefficients must be finite");
  if (static_cast<std::size_t>(beta.size()) != feature_names.size())
    fail(Errc::invalid_argument, "coefficient count does not match feature names");
  if (!(gamma > 0.0)) fail(Errc::invalid_argument, "model gamma must be positive");
  if (intercept_included && (feature_names.empty() || feature_names.front() != "(intercept)"))
    fail(Errc::invalid_argument, "intercept model must name its first coefficient '(intercept)'");
}

std::vector<std::string> FittedModel::input_features() const {
  if (!intercept_included) return feature_names;
  return {feature_names.begin() + 1, feature_names.end()};
}

Eigen::Index FittedModel::input_dim() const { return beta.size() - (intercept_included ? 1 : 0); }

bool operator==(const FittedModel& a, const FittedModel& b) {
  if (a.beta.size() != b.beta.size()) return false;
  for (Eigen::Index j = 0; j < a.beta.size(); ++j) {
    // Bitwise comparison: distinguishes -0.0 from 0.0.
    if (std::signbit(a.beta[j]) != std::signbit(b.beta[j]) || a.beta[j] != b.beta[j]) return false;
  }
  return a.link == b.link && a.gamma == b.gamma && a.feature_names == b.feature_names &&
         a.converged == b.converged && a.intercept_included == b.intercept_included;
}

double linear_predictor(const FittedModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != model.input_dim()) {
    fail(Errc::invalid_argument, "input has " + std::to_string(x.size()) + " features, model expects " +
                                     std::to_string(model.input_dim()));
  }
  if (!model.intercept_included) return x.dot(model.beta);
  return model.beta[0] + x.dot(model.beta.tail(model.beta.size() - 1));
}

double predict_proba(const FittedModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return skew_t_link(linear_predictor(model, x), model.link);
}

Eigen::VectorXd predict_proba_rows(const FittedModel& model, const Eigen::MatrixXd& X) {
  const LinkFunction psi(model.link);
  Eigen::VectorXd out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) out[i] = psi.prob(linear_predictor(model, X.row(i).transpose()));
  return out;
}

int classify_probability(double p, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) fail(Errc::invalid_argument, "threshold must lie in (0, 1)");
  return p > threshold ? 1 : 0;
}

int classify(const FittedModel& model, const Eigen::Ref<const Eigen::VectorXd>& x, double threshold) {
  return classify_probability(predict_proba(model, x), threshold);
}

std::vector<int> classify_rows(const FittedModel& model, const Eigen::MatrixXd& X, double threshold) {
  const Eigen::VectorXd p = predict_proba_rows(model, X);
  std::vector<int> out(static_cast<std::size_t>(p.size()));
  for (Eigen::Index i = 0; i < p.size(); ++i) out[static_cast<std::size_t>(i)] = classify_probability(p[i], threshold);
  return out;
}

std::size_t sparsity_count(const FittedModel& model) {
  return static_cast<std::size_t>((model.beta.array() == 0.0).count());
}

void save_model(const FittedModel& model, std::ostream& out) {
  model.validate();
  json doc;
  doc["format"] = "fstglm-model";
  doc["schema_version"] = kModelSchemaVersion;
  doc["link"] = {{"family", to_string(model.link.family)}, {"nu", model.link.nu}, {"delta", model.link.delta}};
  doc["gamma"] = model.gamma;
  doc["converged"] = model.converged;
  doc["intercept_included"] = model.intercept_included;
  doc["features"] = model.feature_names;
  doc["coefficients"] = std::vector<double>(model.beta.data(), model.beta.data() + model.beta.size());
  out << doc.dump(2) << '\n';
}

void save_model(const FittedModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io, "cannot open '" + path + "' for writing");
  save_model(model, out);
  if (!out) fail(Errc::io, "write to '" + path + "' failed");
}

FittedModel load_model(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(Errc::parse, "model file is malformed at byte " + std::to_string(e.byte) + ": " + e.what());
  }

  try {
    if (!doc.is_object() || doc.value("format", "") != "fstglm-model")
      fail(Errc::schema, "not an fstglm model file (missing format tag)");
    if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer())
      fail(Errc::schema, "model file has no schema_version");
    const int version = doc["schema_version"].get<int>();
    if (version != kModelSchemaVersion) {
      fail(Errc::schema, "unsupported model schema_version " + std::to_string(version) + " (expected " +
                             std::to_string(kModelSchemaVersion) + ")");
    }

    FittedModel model;
    const json& link = doc.at("link");
    model.link.family = link_family_from_string(link.at("family").get<std::string>());
    model.link.nu = link.at("nu").get<double>();
    model.link.delta = link.at("delta").get<double>();
    model.gamma = doc.at("gamma").get<double>();
    model.converged = doc.at("converged").get<bool>();
    model.intercept_included = doc.at("intercept_included").get<bool>();
    model.feature_names = doc.at("features").get<std::vector<std::string>>();
    const auto coef = doc.at("coefficients").get<std::vector<double>>();
    model.beta = Eigen::Map<const Eigen::VectorXd>(coef.data(), static_cast<Eigen::Index>(coef.size()));
    model.validate();
    return model;
  } catch (const json::exception& e) {
    fail(Errc::schema, std::string("model file has an invalid field: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::invalid_argument) fail(Errc::schema, std::string("model file is inconsistent: ") + e.what());
    throw;
  }
}

FittedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, "cannot open '" + path + "' for reading");
  try {
    return load_model(in);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

}  // namespace fstglm
