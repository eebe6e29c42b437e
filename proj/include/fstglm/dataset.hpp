#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

namespace fstglm {

/// Dense design matrix with binary labels. Rows are observations.
struct Dataset {
  Eigen::MatrixXd design;
  Eigen::VectorXd labels;  // entries exactly 0.0 or 1.0
  std::vector<std::string> feature_names;

  Eigen::Index rows() const noexcept { return design.rows(); }
  Eigen::Index cols() const noexcept { return design.cols(); }

  /// Throws Errc::invalid_argument on shape mismatch, non-finite entries or
  /// non-binary labels.
  void validate() const;

  /// Rows selected by index, in the given order.
  Dataset subset(const std::vector<std::size_t>& rows) const;
  /// Row-wise concatenation; feature names must agree.
  static Dataset concat(const Dataset& a, const Dataset& b);
};

std::vector<std::string> default_feature_names(std::size_t m);

// Dataset CSV: header "label,<name_1>,...,<name_m>", then one row per
// observation with the 0/1 label first. Values use shortest round-trip
// formatting, so write/read reproduces every entry exactly.
void write_dataset_csv(const Dataset& data, std::ostream& out);
void write_dataset_csv(const Dataset& data, const std::string& path);
Dataset read_dataset_csv(std::istream& in);
Dataset read_dataset_csv(const std::string& path);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double x);

}  // namespace fstglm
