#include "uqbench/bench/dataset.hpp"

#include "uqbench/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <string_view>

namespace uqb::bench {

namespace {

std::vector<std::string_view> split_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view cell = line.substr(start, comma == std::string_view::npos ? comma : comma - start);
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '"')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '"')) cell.remove_suffix(1);
    cells.push_back(cell);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool parse_double(std::string_view cell, double& out) {
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(out);
}

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line) + ": ";
}

// Reads every row; `skip_first` drops a leading id column without parsing it.
std::vector<std::vector<double>> read_numeric(const std::filesystem::path& path, bool& skip_first,
                                              std::size_t& columns) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IngestionError(path.string() + ": empty file");
  const auto header = split_csv_line(line);
  columns = header.size();
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != columns) {
      throw IngestionError(where(path, line_no) + "expected " + std::to_string(columns) +
                           " columns, found " + std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(columns);
    for (std::size_t c = skip_first ? 1 : 0; c < cells.size(); ++c) {
      double v = 0.0;
      if (!parse_double(cells[c], v)) {
        throw IngestionError(where(path, line_no) + "column " + std::to_string(c + 1) +
                             " is not a finite number: '" + std::string(cells[c]) + "'");
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IngestionError(path.string() + ": no data rows");
  if (skip_first) --columns;
  return rows;
}

}  // namespace

Matrix Standardization::apply(const Matrix& x) const {
  detail::require(x.cols() == mean.size(), "Standardization: column count mismatch");
  return ((x.rowwise() - mean).array().rowwise() / std.array()).matrix();
}

Standardization fit_standardization(const Matrix& x, const Indices& rows) {
  detail::require(!rows.empty(), "fit_standardization: no rows");
  const Matrix sub = take_rows(x, rows);
  Standardization s;
  s.mean = sub.colwise().mean();
  s.std = ((sub.rowwise() - s.mean).array().square().colwise().mean()).sqrt().matrix();
  for (Eigen::Index j = 0; j < s.std.size(); ++j) {
    if (!(s.std(j) > 0.0)) s.std(j) = 1.0;
  }
  return s;
}

Split make_split(Eigen::Index n, std::uint64_t seed) {
  detail::require(n >= 5, "make_split: need at least 5 rows");
  Indices order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::llround(0.8 * static_cast<double>(n)));
  Split s;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  const auto n_inner = static_cast<std::size_t>(std::llround(0.8 * static_cast<double>(n_train)));
  s.inner_train.assign(s.train.begin(), s.train.begin() + static_cast<std::ptrdiff_t>(n_inner));
  s.inner_val.assign(s.train.begin() + static_cast<std::ptrdiff_t>(n_inner), s.train.end());
  return s;
}

Dataset load_csv(const std::filesystem::path& path, const std::string& name, TaskKind task,
                 const CsvLayout& layout, std::uint64_t seed) {
  bool skip_first = false;
  std::size_t columns = 0;
  const auto rows = read_numeric(path, skip_first, columns);
  if (columns < 2) throw IngestionError(path.string() + ": need a target and at least one feature");
  const auto cols = static_cast<int>(columns);
  const int target = layout.target_column < 0 ? cols + layout.target_column : layout.target_column;
  if (target < 0 || target >= cols) throw IngestionError(path.string() + ": target column out of range");
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (layout.expected_features > 0 && cols - 1 != layout.expected_features) {
    throw IngestionError(path.string() + ": expected " + std::to_string(layout.expected_features) +
                         " features, found " + std::to_string(cols - 1));
  }
  if (layout.expected_rows > 0 && n != layout.expected_rows) {
    throw IngestionError(path.string() + ": expected " + std::to_string(layout.expected_rows) +
                         " data rows, found " + std::to_string(n));
  }
  Dataset d;
  d.name = name;
  d.task = task;
  d.x.resize(n, cols - 1);
  d.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    Eigen::Index k = 0;
    for (int c = 0; c < cols; ++c) {
      if (c == target) d.y(i) = r[static_cast<std::size_t>(c)];
      else d.x(i, k++) = r[static_cast<std::size_t>(c)];
    }
  }
  d.split = make_split(n, seed);
  return d;
}

Dataset load_casp(const std::filesystem::path& path, std::uint64_t seed, bool check_size) {
  CsvLayout layout{0, check_size ? 45730 : 0, 9};
  return load_csv(path, "casp", TaskKind::kRegression, layout, seed);
}

Dataset load_esr(const std::filesystem::path& path, std::uint64_t seed, bool check_size) {
  // The public file has an unnamed id column first; detect it by width.
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open " + path.string());
  std::string header;
  std::getline(in, header);
  in.close();
  const std::size_t width = split_csv_line(header).size();
  bool skip_first = width == 180;
  std::size_t columns = 0;
  const auto rows = read_numeric(path, skip_first, columns);
  if (columns != 179) {
    throw IngestionError(path.string() + ": expected 178 features and a label, found " +
                         std::to_string(columns) + " columns");
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (check_size && n != 11500) {
    throw IngestionError(path.string() + ": expected 11500 data rows, found " + std::to_string(n));
  }
  Dataset d;
  d.name = "esr";
  d.task = TaskKind::kClassification;
  d.num_classes = 2;
  d.x.resize(n, 178);
  d.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < 178; ++j) d.x(i, j) = r[static_cast<std::size_t>(j)];
    const double label = r[178];
    if (label != std::floor(label) || label < 1.0 || label > 5.0) {
      throw IngestionError(where(path, static_cast<std::size_t>(i) + 2) + "unknown label " +
                           std::to_string(label));
    }
    d.y(i) = label == 1.0 ? 1.0 : 0.0;
  }
  d.split = make_split(n, seed);
  return d;
}

Dataset synthetic_regression(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::normal_distribution<double> noise(0.0, 0.1);
  Dataset d;
  d.name = "synthetic";
  d.x.resize(n, 1);
  d.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d.x(i, 0) = u(rng);
    d.y(i) = std::sin(d.x(i, 0)) + noise(rng);
  }
  d.split = make_split(n, seed);
  return d;
}

Dataset synthetic_classification(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  Dataset d;
  d.name = "synthetic";
  d.task = TaskKind::kClassification;
  d.num_classes = 2;
  d.x.resize(n, 2);
  d.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    const double centre = label == 1 ? 1.0 : -1.0;
    d.x(i, 0) = centre + z(rng);
    d.x(i, 1) = centre + z(rng);
    d.y(i) = label;
  }
  d.split = make_split(n, seed);
  return d;
}

Matrix take_rows(const Matrix& x, const Indices& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
  return out;
}

Vector take_rows(const Vector& y, const Indices& rows) {
  Vector out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Eigen::Index>(i)) = y(rows[i]);
  return out;
}

Partition make_partition(const Dataset& data) {
  const Split& s = data.split;
  detail::require(!s.inner_train.empty() && !s.inner_val.empty() && !s.test.empty(),
                  "make_partition: empty split");
  Partition p;
  p.features = fit_standardization(data.x, s.inner_train);
  p.x_train = p.features.apply(take_rows(data.x, s.inner_train));
  p.x_val = p.features.apply(take_rows(data.x, s.inner_val));
  p.x_test = p.features.apply(take_rows(data.x, s.test));
  p.y_train = take_rows(data.y, s.inner_train);
  p.y_val = take_rows(data.y, s.inner_val);
  p.y_test = take_rows(data.y, s.test);
  p.y_test_raw = p.y_test;
  if (data.task == TaskKind::kRegression) {
    p.target_shift = p.y_train.mean();
    const double sd = std::sqrt((p.y_train.array() - p.target_shift).square().mean());
    p.target_scale = sd > 0.0 ? sd : 1.0;
    for (Vector* v : {&p.y_train, &p.y_val, &p.y_test}) {
      *v = ((v->array() - p.target_shift) / p.target_scale).matrix();
    }
  }
  const Eigen::RowVectorXd m = p.x_train.colwise().mean();
  p.feature_stds = ((p.x_train.rowwise() - m).array().square().colwise().mean()).sqrt().transpose();
  return p;
}

}  // namespace uqb::bench
