#include "lips/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "lips/errors.hpp"
#include "lips/rng.hpp"

namespace lips {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    // trim surrounding whitespace
    const auto begin = cell.find_first_not_of(" \t\r");
    const auto end = cell.find_last_not_of(" \t\r");
    cells.push_back(begin == std::string::npos ? "" : cell.substr(begin, end - begin + 1));
  }
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& column,
                  const std::string& origin) {
  const auto where = [&] {
    return origin + ": row " + std::to_string(row) + ", column '" + column + "'";
  };
  if (cell.empty()) throw DataError("missing value at " + where());
  double value = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw DataError("non-numeric cell '" + cell + "' at " + where());
  return value;
}

int find_response_column(const std::vector<std::string>& header,
                         const std::string& selector) {
  if (selector.empty()) return static_cast<int>(header.size()) - 1;  // default: last column
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == selector) return static_cast<int>(i);
  // fall back to a 1-based index
  int index = 0;
  const auto [ptr, ec] = std::from_chars(selector.data(), selector.data() + selector.size(), index);
  if (ec == std::errc() && ptr == selector.data() + selector.size() && index >= 1 &&
      index <= static_cast<int>(header.size()))
    return index - 1;
  throw DataError("response column '" + selector + "' not found");
}

}  // namespace

Dataset Dataset::from_arrays(Eigen::MatrixXd x, Eigen::VectorXd y,
                             std::vector<std::string> names, std::string response_name) {
  Dataset out;
  if (names.empty()) {
    names.reserve(x.cols());
    for (int j = 1; j <= x.cols(); ++j) names.push_back("x" + std::to_string(j));
  }
  if (static_cast<int>(names.size()) != x.cols())
    throw DataError("column name count must match the design width");
  out.reg = RegressionData::from_raw(x, y);
  out.x_raw = std::move(x);
  out.y_raw = std::move(y);
  out.names = std::move(names);
  out.response_name = std::move(response_name);
  out.x_mean = out.x_raw.colwise().mean();
  out.y_mean = out.y_raw.mean();
  return out;
}

Dataset parse_csv_text(const std::string& text, const std::string& response_selector,
                       const std::string& origin) {
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line)) throw DataError(origin + ": empty file");
  const std::vector<std::string> header = split_line(line);
  if (header.size() < 2) throw DataError(origin + ": need at least two columns");
  for (std::size_t i = 0; i < header.size(); ++i)
    for (std::size_t j = i + 1; j < header.size(); ++j)
      if (header[i] == header[j])
        throw DataError(origin + ": duplicate column name '" + header[i] + "'");

  std::vector<std::vector<double>> rows;
  std::size_t row_number = 1;
  while (std::getline(ss, line)) {
    ++row_number;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size())
      throw DataError(origin + ": row " + std::to_string(row_number) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(header.size()));
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c)
      row[c] = parse_cell(cells[c], row_number, header[c], origin);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(origin + ": no data rows");

  const int response = find_response_column(header, response_selector);
  const int n = static_cast<int>(rows.size());
  const int p = static_cast<int>(header.size()) - 1;
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd y(n);
  std::vector<std::string> names;
  for (int c = 0; c < static_cast<int>(header.size()); ++c)
    if (c != response) names.push_back(header[c]);
  for (int i = 0; i < n; ++i) {
    int out_col = 0;
    for (int c = 0; c < static_cast<int>(header.size()); ++c) {
      if (c == response)
        y[i] = rows[i][c];
      else
        x(i, out_col++) = rows[i][c];
    }
  }
  return Dataset::from_arrays(std::move(x), std::move(y), std::move(names), header[response]);
}

Dataset load_csv(const std::string& path, const std::string& response_selector) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_csv_text(buffer.str(), response_selector, path);
}

Eigen::MatrixXd load_prediction_rows(const std::string& path, const Dataset& data) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  const std::vector<std::string> header = split_line(line);

  // map dataset predictors onto file columns by name; fall back to position
  std::vector<int> source(data.p(), -1);
  bool by_name = true;
  for (int j = 0; j < data.p(); ++j) {
    const auto it = std::find(header.begin(), header.end(), data.names[j]);
    if (it == header.end()) {
      by_name = false;
      break;
    }
    source[j] = static_cast<int>(it - header.begin());
  }
  if (!by_name) {
    if (static_cast<int>(header.size()) < data.p())
      throw DataError(path + ": expected at least " + std::to_string(data.p()) + " columns");
    for (int j = 0; j < data.p(); ++j) source[j] = j;
  }

  std::vector<std::vector<double>> rows;
  std::size_t row_number = 1;
  while (std::getline(in, line)) {
    ++row_number;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> cells = split_line(line);
    std::vector<double> row(data.p());
    for (int j = 0; j < data.p(); ++j) {
      if (source[j] >= static_cast<int>(cells.size()))
        throw DataError(path + ": row " + std::to_string(row_number) + " is too short");
      row[j] = parse_cell(cells[source[j]], row_number, header[source[j]], path);
    }
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd x(static_cast<int>(rows.size()), data.p());
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < data.p(); ++j) x(i, j) = rows[i][j];
  return x;
}

TrainTestSplit split_dataset(const Dataset& data, const SplitSpec& spec) {
  const int n = data.n();
  if (spec.n_train < 3 || spec.n_test < 1)
    throw ConfigError("split needs n_train >= 3 and n_test >= 1");
  if (spec.n_train + spec.n_test > n)
    throw ConfigError("split sizes exceed the available rows");

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  rng::Stream stream = rng::substream(spec.seed, rng::Tag::split);
  for (int i = n - 1; i > 0; --i)
    std::swap(order[i], order[stream.below(static_cast<std::uint64_t>(i) + 1)]);

  Eigen::MatrixXd x_train(spec.n_train, data.p());
  Eigen::VectorXd y_train(spec.n_train);
  for (int i = 0; i < spec.n_train; ++i) {
    x_train.row(i) = data.x_raw.row(order[i]);
    y_train[i] = data.y_raw[order[i]];
  }
  TrainTestSplit out;
  out.train = Dataset::from_arrays(std::move(x_train), std::move(y_train), data.names,
                                   data.response_name);
  out.x_test.resize(spec.n_test, data.p());
  out.y_test.resize(spec.n_test);
  for (int i = 0; i < spec.n_test; ++i) {
    out.x_test.row(i) = data.x_raw.row(order[spec.n_train + i]);
    out.y_test[i] = data.y_raw[order[spec.n_train + i]];
  }
  out.small_train_warning = spec.n_train < data.p() + 2;
  return out;
}

}  // namespace lips
