#pragma once

#include "uqbench/models/likelihood.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace uqb::bench {

using diff::Matrix;
using diff::Vector;
using models::TaskKind;

using Indices = std::vector<Eigen::Index>;

/// Seeded 80:20 outer split and an 80:20 inner split of the outer train rows.
struct Split {
  Indices train;
  Indices test;
  Indices inner_train;
  Indices inner_val;
};

/// Raw features and targets; classification targets are class indices.
struct Dataset {
  std::string name;
  TaskKind task = TaskKind::kRegression;
  int num_classes = 0;
  Matrix x;
  Vector y;
  Split split;
};

struct Standardization {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd std;  ///< constant columns get 1

  Matrix apply(const Matrix& x) const;
};

/// Per-column mean and population std over `rows` of `x`.
Standardization fit_standardization(const Matrix& x, const Indices& rows);

Split make_split(Eigen::Index n, std::uint64_t seed);

struct CsvLayout {
  /// Target column; negative counts from the end.
  int target_column = 0;
  /// Row and feature counts the file must have; 0 skips the check.
  Eigen::Index expected_rows = 0;
  Eigen::Index expected_features = 0;
};

/// Numeric CSV with a header row. Errors name the file line.
Dataset load_csv(const std::filesystem::path& path, const std::string& name, TaskKind task,
                 const CsvLayout& layout, std::uint64_t seed);

/// CASP: 45,730 x 9 features, RMSD target in the first column.
Dataset load_casp(const std::filesystem::path& path, std::uint64_t seed, bool check_size = true);

/// ESR: 11,500 x 178 features, label 1..5 in the last column, mapped to
/// 1 -> 1 and 2..5 -> 0. A leading non-numeric id column (180 columns in all)
/// is dropped.
Dataset load_esr(const std::filesystem::path& path, std::uint64_t seed, bool check_size = true);

/// y = sin(x) + N(0, 0.1^2), x ~ U(-3, 3).
Dataset synthetic_regression(Eigen::Index n, std::uint64_t seed);

/// Two Gaussian clusters in 2-D at (-1, -1) and (1, 1), unit std, balanced.
Dataset synthetic_classification(Eigen::Index n, std::uint64_t seed);

/// The rows a model sees: train = inner train, val = inner val, test = outer
/// test. Features and regression targets are standardized with statistics of
/// the train rows only.
struct Partition {
  Matrix x_train, x_val, x_test;
  Vector y_train, y_val, y_test;  ///< regression targets standardized
  Vector y_test_raw;
  Standardization features;
  double target_shift = 0.0;
  double target_scale = 1.0;
  /// Std of each standardized train feature, for noise and outlier shifts.
  Vector feature_stds;
};

Partition make_partition(const Dataset& data);

Matrix take_rows(const Matrix& x, const Indices& rows);
Vector take_rows(const Vector& y, const Indices& rows);

}  // namespace uqb::bench
