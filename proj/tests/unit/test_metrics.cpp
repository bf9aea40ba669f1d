#include <doctest.h>

#include "uqbench/errors.hpp"
#include "uqbench/metrics/calibration.hpp"
#include "uqbench/metrics/normal.hpp"
#include "uqbench/models/likelihood.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace uqb;
using namespace uqb::metrics;

namespace {

// Confidences drawn uniformly in [1/C, 1], labels drawn from the stated
// probabilities: calibrated by construction.
std::pair<Matrix, std::vector<int>> calibrated_classifier(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> conf(0.5, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix probs(n, 2);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double p = conf(rng);
    const int top = u(rng) < 0.5 ? 0 : 1;
    probs(i, top) = p;
    probs(i, 1 - top) = 1.0 - p;
    labels[static_cast<std::size_t>(i)] = u(rng) < p ? top : 1 - top;
  }
  return {probs, labels};
}

}  // namespace

TEST_CASE("normal quantile agrees with a reference inverse CDF") {
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-13));
  CHECK(std::abs(normal_quantile(1e-10) + 6.361340902404056) < 1e-9);
  CHECK(std::abs(normal_quantile(0.02) + 2.053748910631823) < 1e-12);
  CHECK(std::abs(normal_quantile(0.3) + 0.5244005127080409) < 1e-12);
  CHECK(std::abs(normal_quantile(0.999999) - 4.753424308817087) < 1e-10);
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::abs(normal_cdf(1.3) - 0.9031995154143897) < 1e-15);
  CHECK(std::abs(normal_pdf(0.7) - 0.31225393336676127) < 1e-15);
  for (double p : {1e-6, 0.01, 0.2, 0.45, 0.7, 0.99}) {
    CHECK(std::abs(normal_cdf(normal_quantile(p)) - p) < 1e-14);
  }
  CHECK_THROWS_AS(normal_quantile(0.0), ContractViolation);
  CHECK_THROWS_AS(normal_quantile(1.0), ContractViolation);
}

TEST_CASE("classification NLL") {
  Matrix certain(3, 2);
  certain << 1, 0, 0, 1, 1, 0;
  CHECK(nll_classification(certain, {0, 1, 0}) == 0.0);

  Matrix half = Matrix::Constant(4, 2, 0.5);
  CHECK(nll_classification(half, {0, 1, 1, 0}) == doctest::Approx(std::numbers::ln2).epsilon(1e-15));

  Matrix p(3, 3);
  p << 0.2, 0.5, 0.3, 0.6, 0.3, 0.1, 0.1, 0.1, 0.8;
  const double a = nll_classification(p, {1, 0, 2});
  Matrix swapped(3, 3);
  swapped << p.row(2), p.row(0), p.row(1);
  CHECK(nll_classification(swapped, {2, 1, 0}) == doctest::Approx(a).epsilon(1e-15));
  CHECK(a == doctest::Approx(-(std::log(0.5) + std::log(0.6) + std::log(0.8)) / 3).epsilon(1e-15));

  CHECK(std::isfinite(nll_classification(certain, {1, 1, 1})));
  CHECK_THROWS_AS(nll_classification(certain, {0, 2, 0}), ContractViolation);
}

TEST_CASE("regression NLL for Gaussian and mixture predictions") {
  models::GaussianPrediction g{Vector::Constant(2, 1.5), Vector::Constant(2, 1.0 / (2 * std::numbers::pi))};
  CHECK(std::abs(nll_regression(g, Vector::Constant(2, 1.5))) < 1e-15);

  Vector y(3);
  y << 0.3, -1.2, 2.0;
  models::GaussianPrediction single{Vector(3), Vector(3)};
  single.mean << 0.1, -1.0, 1.0;
  single.var << 0.5, 2.0, 0.7;
  models::MixturePrediction one{single.mean, single.var, Vector::Ones(1)};
  CHECK(nll_regression(one, y) == nll_regression(single, y));

  models::MixturePrediction mix{Matrix(3, 2), Matrix(3, 2), Vector(2)};
  mix.means << 0.0, 1.0, -1.0, 0.5, 2.5, 1.5;
  mix.vars << 0.3, 1.2, 0.4, 0.9, 0.2, 2.0;
  mix.weights << 0.35, 0.65;
  double direct = 0.0;
  double bound = 0.0;
  for (int i = 0; i < 3; ++i) {
    double density = 0.0;
    double best = 1e300;
    for (int j = 0; j < 2; ++j) {
      const double v = mix.vars(i, j);
      const double r = y(i) - mix.means(i, j);
      density += mix.weights(j) * std::exp(-r * r / (2 * v)) / std::sqrt(2 * std::numbers::pi * v);
      best = std::min(best, r * r / (2 * v) + 0.5 * std::log(2 * std::numbers::pi * v) -
                                std::log(mix.weights(j)));
    }
    direct -= std::log(density);
    bound += best;
  }
  CHECK(std::abs(nll_regression(mix, y) - direct / 3) < 1e-10);
  CHECK(nll_regression(mix, y) <= bound / 3 + 1e-12);
}

TEST_CASE("accuracy, MAE and tie-break") {
  Matrix tie(1, 2);
  tie << 0.5, 0.5;
  CHECK(argmax_class(tie.row(0)) == 0);
  Matrix three(1, 3);
  three << 0.2, 0.4, 0.4;
  CHECK(argmax_class(three.row(0)) == 1);

  Matrix p(4, 2);
  p << 0.9, 0.1, 0.3, 0.7, 0.5, 0.5, 0.6, 0.4;
  CHECK(accuracy(p, {0, 1, 1, 1}) == 0.5);

  Vector y(3);
  y << 1.0, -2.0, 0.5;
  CHECK(mae(y, y) == 0.0);
  CHECK(mae((y.array() + 1.0).matrix(), y) == 1.0);
}

TEST_CASE("ECE closed-form cases") {
  Matrix sure(4, 2);
  sure << 1, 0, 0, 1, 1, 0, 0, 1;
  CHECK(ece_classification(sure, {0, 1, 0, 1}).ece == 0.0);
  const EceResult half = ece_classification(sure, {0, 1, 1, 0});
  CHECK(half.ece == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(half.bins[9].count == 4);

  // Bin edges: 0.3 sits in (0.2, 0.3], 0.30000000000000004 just above.
  Matrix edge(2, 4);
  edge << 0.3, 0.25, 0.25, 0.2, 0.30000000000000004, 0.3, 0.2, 0.19999999999999996;
  const EceResult e = ece_classification(edge, {0, 0});
  CHECK(e.bins[2].count == 1);
  CHECK(e.bins[3].count == 1);

  long total = 0;
  for (const auto& b : half.bins) total += b.count;
  CHECK(total == 4);
}

TEST_CASE("calibrated classifier has small ECE and a near-diagonal reliability curve") {
  const auto [probs, labels] = calibrated_classifier(100000, 7);
  const EceResult e = ece_classification(probs, labels);
  CHECK(e.ece <= 0.01);
  CHECK(e.ece >= 0.0);

  const auto rows = reliability_curve(probs, labels);
  CHECK(rows.size() <= 10);
  long total = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    total += rows[i].count;
    CHECK(std::abs(rows[i].accuracy - rows[i].confidence) <= 0.02);
    if (i > 0) CHECK(rows[i - 1].confidence <= rows[i].confidence);
  }
  CHECK(total == 100000);

  // Permutation invariance.
  Matrix reversed = probs.colwise().reverse();
  std::vector<int> rev_labels(labels.rbegin(), labels.rend());
  CHECK(ece_classification(reversed, rev_labels).ece == doctest::Approx(e.ece).epsilon(1e-12));
}

TEST_CASE("regression calibration error") {
  Vector mu = Vector::LinSpaced(50, -2, 3);
  Vector sd = Vector::Constant(50, 0.7);
  const RegressionCalibration exact = regression_calibration(mu, sd, mu);
  double expected = 0.0;
  for (int k = 1; k <= 10; ++k) expected += 1.0 - k / 11.0;
  CHECK(exact.error == doctest::Approx(expected / 10).epsilon(1e-14));
  CHECK(exact.rows.size() == 10);
  CHECK(exact.rows[0].alpha == doctest::Approx(1.0 / 11));

  std::mt19937_64 rng(11);
  std::normal_distribution<double> z;
  const int n = 100000;
  Vector m(n), s(n), y(n);
  for (int i = 0; i < n; ++i) {
    m(i) = 3.0 * z(rng);
    s(i) = 0.2 + std::abs(z(rng));
    y(i) = m(i) + s(i) * z(rng);
  }
  const RegressionCalibration cal = regression_calibration(m, s, y);
  CHECK(cal.error <= 0.02);
  const auto rows = reliability_curve(m, s, y);
  CHECK(rows.size() == 10);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i - 1].confidence < rows[i].confidence);

  // Intervals 2x too wide over-cover.
  CHECK(regression_calibration(m, (s * 2.0).eval(), y).error > 0.1);
}

TEST_CASE("reliability CSV layout") {
  const std::string csv = reliability_csv({{3, 0.25, 0.5, 4}});
  CHECK(csv == "bin,confidence,accuracy,count\n3,0.25,0.5,4\n");
}
