#include "fstglm/dataset.hpp"

#include "fstglm/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fstglm {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

double parse_cell(const std::string& cell, std::size_t line_no, std::size_t col) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    fail(Errc::parse, "line " + std::to_string(line_no) + ", column " + std::to_string(col + 1) +
                          ": not a finite number: '" + cell + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

void Dataset::validate() const {
  if (design.rows() < 1 || design.cols() < 1)
    fail(Errc::invalid_argument, "dataset needs at least one row and one column");
  if (labels.size() != design.rows())
    fail(Errc::invalid_argument, "label count does not match design rows");
  if (feature_names.size() != static_cast<std::size_t>(design.cols()))
    fail(Errc::invalid_argument, "feature name count does not match design columns");
  if (!design.allFinite()) fail(Errc::invalid_argument, "design matrix has non-finite entries");
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0.0 && labels[i] != 1.0)
      fail(Errc::invalid_argument, "label in row " + std::to_string(i + 1) + " is not 0 or 1");
  }
}

Dataset Dataset::subset(const std::vector<std::size_t>& idx) const {
  Dataset out;
  out.design.resize(static_cast<Eigen::Index>(idx.size()), design.cols());
  out.labels.resize(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(idx[k]);
    out.design.row(static_cast<Eigen::Index>(k)) = design.row(r);
    out.labels[static_cast<Eigen::Index>(k)] = labels[r];
  }
  out.feature_names = feature_names;
  return out;
}

Dataset Dataset::concat(const Dataset& a, const Dataset& b) {
  if (a.feature_names != b.feature_names)
    fail(Errc::invalid_argument, "cannot concatenate datasets with different features");
  Dataset out;
  out.design.resize(a.rows() + b.rows(), a.cols());
  out.design << a.design, b.design;
  out.labels.resize(a.rows() + b.rows());
  out.labels << a.labels, b.labels;
  out.feature_names = a.feature_names;
  return out;
}

std::vector<std::string> default_feature_names(std::size_t m) {
  std::vector<std::string> names;
  names.reserve(m);
  for (std::size_t j = 1; j <= m; ++j) names.push_back("x" + std::to_string(j));
  return names;
}

void write_dataset_csv(const Dataset& data, std::ostream& out) {
  out << "label";
  for (const auto& n : data.feature_names) out << ',' << n;
  out << '\n';
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    out << (data.labels[i] == 1.0 ? '1' : '0');
    for (Eigen::Index j = 0; j < data.cols(); ++j) out << ',' << format_double(data.design(i, j));
    out << '\n';
  }
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io, "cannot open '" + path + "' for writing");
  write_dataset_csv(data, out);
  if (!out) fail(Errc::io, "write to '" + path + "' failed");
}

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(Errc::parse, "line 1: missing header row");
  const auto header = split_csv_line(strip_cr(line));
  if (header.size() < 2 || header.front() != "label")
    fail(Errc::parse, "line 1: header must start with 'label' followed by feature names");

  Dataset data;
  data.feature_names.assign(header.begin() + 1, header.end());
  const std::size_t m = data.feature_names.size();

  std::vector<double> values;
  std::vector<double> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != m + 1) {
      fail(Errc::parse, "line " + std::to_string(line_no) + ": expected " + std::to_string(m + 1) +
                            " fields, found " + std::to_string(cells.size()));
    }
    const double y = parse_cell(cells[0], line_no, 0);
    if (y != 0.0 && y != 1.0)
      fail(Errc::parse, "line " + std::to_string(line_no) + ": label must be 0 or 1");
    labels.push_back(y);
    for (std::size_t j = 1; j <= m; ++j) values.push_back(parse_cell(cells[j], line_no, j));
  }
  if (labels.empty()) fail(Errc::parse, "dataset has no rows");

  const auto n = static_cast<Eigen::Index>(labels.size());
  data.design = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), n, static_cast<Eigen::Index>(m));
  data.labels = Eigen::Map<const Eigen::VectorXd>(labels.data(), n);
  return data;
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, "cannot open '" + path + "' for reading");
  try {
    return read_dataset_csv(in);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

}  // namespace fstglm
