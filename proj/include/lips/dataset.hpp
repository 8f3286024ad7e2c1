#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lips/regression.hpp"

namespace lips {

/// Raw data plus the centering offsets needed to predict on new rows.
struct Dataset {
  Eigen::MatrixXd x_raw;  // n x p
  Eigen::VectorXd y_raw;
  std::vector<std::string> names;  // predictor column names
  std::string response_name;
  Eigen::VectorXd x_mean;
  double y_mean = 0.0;
  RegressionData reg;

  static Dataset from_arrays(Eigen::MatrixXd x, Eigen::VectorXd y,
                             std::vector<std::string> names = {},
                             std::string response_name = "y");

  int n() const { return reg.n; }
  int p() const { return reg.p; }
};

/// Parses a headered all-numeric CSV; the response column is selected by name
/// or 1-based index. Parse failures report the offending row and column.
Dataset load_csv(const std::string& path, const std::string& response_selector = "");
Dataset parse_csv_text(const std::string& text, const std::string& response_selector,
                       const std::string& origin);

/// Reads a CSV of new observations whose columns cover the dataset's
/// predictors (by name when headers match, otherwise by position); a response
/// column, if present, is ignored.
Eigen::MatrixXd load_prediction_rows(const std::string& path, const Dataset& data);

struct SplitSpec {
  int n_train = 0;
  int n_test = 0;
  std::uint64_t seed = 0;
};

struct TrainTestSplit {
  Dataset train;
  Eigen::MatrixXd x_test;
  Eigen::VectorXd y_test;
  bool small_train_warning = false;  // n_train < p + 2
};

TrainTestSplit split_dataset(const Dataset& data, const SplitSpec& spec);

}  // namespace lips
