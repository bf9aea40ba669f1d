// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "support/finite_diff.hpp"
#include "uqbench/bench/config.hpp"
#include "uqbench/bench/runner.hpp"
#include "uqbench/diff/adam.hpp"
#include "uqbench/diff/ops.hpp"
#include "uqbench/gp/exact_gp.hpp"
#include "uqbench/gp/svgp_layer.hpp"
#include "uqbench/hpo/bayesopt.hpp"
#include "uqbench/metrics/calibration.hpp"
#include "uqbench/metrics/normal.hpp"
#include "uqbench/models/deep_gp.hpp"
#include "uqbench/models/dspp.hpp"
#include "uqbench/models/ensemble.hpp"
#include "uqbench/shift/perturb.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <numbers>
#include <string>

using namespace uqb;
using diff::Matrix;
using diff::Tape;
using diff::Var;
using diff::Vector;
using uqb::testing::compare_gradients;
using uqb::testing::random_matrix;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void randomize(models::LayerStack& stack, std::mt19937_64& rng, double scale = 0.3) {
  for (gp::SVGPLayer& layer : stack.layers()) {
    for (gp::SVGPUnit& u : layer.units()) {
      u.var_mean.raw() = random_matrix(rng, u.var_mean.rows(), 1);
      u.scale_raw.raw() = random_matrix(rng, u.scale_raw.rows(), u.scale_raw.cols(), scale);
    }
  }
}

void randomize(gp::SVGPLayer& layer, std::mt19937_64& rng) {
  for (gp::SVGPUnit& u : layer.units()) {
    u.var_mean.raw() = random_matrix(rng, u.var_mean.rows(), 1);
    u.scale_raw.raw() = random_matrix(rng, u.scale_raw.rows(), u.scale_raw.cols(), 0.3);
  }
}

// Sample mean and variance of a per-row Gaussian mixture.
std::pair<double, double> sample_mixture(const Eigen::RowVectorXd& means,
                                         const Eigen::RowVectorXd& vars, const Vector& weights,
                                         int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> pick(weights.data(), weights.data() + weights.size());
  std::normal_distribution<double> z;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const int j = pick(rng);
    const double v = means(j) + std::sqrt(vars(j)) * z(rng);
    s1 += v;
    s2 += v * v;
  }
  const double mean = s1 / n;
  return {mean, s2 / n - mean * mean};
}

Outcome gradients() {
  Outcome o;
  double worst = 0.0;
  auto check = [&](const char* name, const testing::GradientComparison& r) {
    worst = std::max(worst, r.relative_error);
    o.require(r.relative_error <= 1e-4 && r.analytic_norm > 0.0,
              std::string(name) + " rel err " + fmt("%.2e", r.relative_error));
  };

  {
    std::mt19937_64 rng(1);
    const Matrix x = random_matrix(rng, 6, 2);
    const Vector y = random_matrix(rng, 6, 1);
    gp::ExactGP model(x, y, gp::RBFKernel(2, true, 0.8, 1.2), 0.5);
    check("marginal likelihood",
          compare_gradients(model.parameters(), [&](Tape& t) { return model.log_marginal_likelihood(t); }));
  }
  {
    std::mt19937_64 rng(2);
    const Matrix x = random_matrix(rng, 5, 2);
    const Vector y = random_matrix(rng, 5, 1);
    gp::SVGPLayerOptions opt;
    opt.input_dim = 2;
    opt.ard = true;
    gp::SVGPLayer layer(opt, random_matrix(rng, 3, 2));
    layer.use_constant_mean(0.3);
    randomize(layer, rng);
    models::GaussianLikelihood lik(0.5);
    diff::ParameterList params = layer.parameters();
    params.push_back(&lik.noise_parameter());
    check("svgp elbo", compare_gradients(params, [&](Tape& t) {
            return gp::svgp_elbo(t, layer, x, y, lik, 20.0);
          }));
  }
  for (models::TaskKind task : {models::TaskKind::kRegression, models::TaskKind::kClassification}) {
    const bool cls = task == models::TaskKind::kClassification;
    std::mt19937_64 rng(3);
    const Matrix x = random_matrix(rng, 6, 2);
    Vector y = random_matrix(rng, 6, 1);
    if (cls) y << 0, 1, 1, 0, 1, 0;

    models::DeepGPOptions d;
    d.task = task;
    d.hidden = {2};
    d.num_inducing = 3;
    d.mc_samples = 3;
    models::DeepGP dgp(d, x, rng);
    randomize(dgp.stack(), rng);
    check(cls ? "deep gp elbo (classification)" : "deep gp elbo (regression)",
          compare_gradients(dgp.parameters(), [&](Tape& t) {
            std::mt19937_64 fixed(99);
            return dgp.elbo(t, x, y, 10.0, fixed);
          }));

    models::DSPPOptions s;
    s.task = task;
    s.hidden = {1};
    s.num_inducing = 3;
    s.quadrature_sites = 4;
    models::DSPP dspp(s, x, rng);
    randomize(dspp.stack(), rng);
    dspp.weight_logits().raw() = random_matrix(rng, 1, 4);
    check(cls ? "dspp objective (classification)" : "dspp objective (regression)",
          compare_gradients(dspp.parameters(), [&](Tape& t) { return dspp.objective(t, x, y, 10.0); }));

    models::EnsembleOptions e;
    e.task = task;
    e.hidden = {8, 4};
    e.num_models = 3;
    const Matrix xe = random_matrix(rng, 8, 2);
    Vector ye = random_matrix(rng, 8, 1);
    if (cls) ye << 0, 1, 0, 1, 1, 0, 0, 1;
    models::DeepEnsemble ens(e, 2, rng);
    check(cls ? "ensemble loss (classification)" : "ensemble loss (regression)",
          compare_gradients(ens.parameters(), [&](Tape& t) { return ens.loss(t, xe, ye); }));
  }
  o.note("max rel err " + fmt("%.2e", worst));
  return o;
}

Outcome svgp_vs_exact() {
  Outcome o;
  std::mt19937_64 rng(6);
  const Matrix x = random_matrix(rng, 40, 1, 1.5);
  const Vector y = (x.array() * 2.0).sin().matrix() + random_matrix(rng, 40, 1, 0.1);
  const double noise = 0.1;
  gp::ExactGP exact(x, y, gp::RBFKernel(1, false, 0.7, 1.0), noise, 0.0);

  gp::SVGPLayerOptions opt;
  opt.input_dim = 1;
  opt.init_lengthscale = 0.7;
  models::GaussianLikelihood lik(noise);
  gp::SVGPLayer layer(opt, x);
  diff::ParameterList trained;
  for (gp::SVGPUnit& u : layer.units()) {
    trained.push_back(&u.var_mean);
    trained.push_back(&u.scale_raw);
  }
  diff::Adam adam(trained, 0.02);
  for (int step = 0; step < 2000; ++step) {
    Tape tape;
    const Var loss = -gp::svgp_elbo(tape, layer, x, y, lik, 40.0);
    tape.backward(loss);
    adam.step();
  }
  Matrix xq(65, 1);
  xq << x, random_matrix(rng, 25, 1, 1.5);
  const auto [mean, var] = layer.predict(xq);
  const gp::GaussianMarginals post = exact.posterior(xq);
  const double sd_y = std::sqrt((y.array() - y.mean()).square().mean());
  const double mean_dev = (mean.col(0) - post.mean).cwiseAbs().maxCoeff();
  const double var_dev = ((var.col(0) - post.var).array().abs() / post.var.array()).maxCoeff();
  o.require(mean_dev <= 0.05 * sd_y, "mean deviation");
  o.require(var_dev <= 0.10, "variance deviation");
  o.note("mean dev " + fmt("%.3g", mean_dev) + " (limit " + fmt("%.3g", 0.05 * sd_y) +
         "), var rel dev " + fmt("%.3g", var_dev));
  return o;
}

Outcome evidence_bound() {
  Outcome o;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.3, 2.0);
  std::uniform_int_distribution<int> m_count(1, 6);
  double worst = 1e300;
  for (int instance = 0; instance < 20; ++instance) {
    const Matrix x = random_matrix(rng, 6, 1, 1.5);
    const Vector y = random_matrix(rng, 6, 1);
    const double l = u(rng), sf = u(rng), noise = 0.2 * u(rng);
    gp::ExactGP exact(x, y, gp::RBFKernel(1, false, l, sf), noise, 0.0);
    const double mll = exact.log_marginal_likelihood();
    gp::SVGPLayerOptions opt;
    opt.input_dim = 1;
    opt.init_lengthscale = l;
    opt.init_outputscale = sf;
    gp::SVGPLayer layer(opt, instance % 4 == 0 ? x : random_matrix(rng, m_count(rng), 1, 1.5));
    randomize(layer, rng);
    models::GaussianLikelihood lik(noise);
    Tape tape;
    const double elbo = gp::svgp_elbo(tape, layer, x, y, lik, 6.0).item();
    worst = std::min(worst, mll - elbo);
  }
  o.require(worst >= -1e-8, "margin below -1e-8");
  o.note("min(MLL - ELBO) over 20 instances " + fmt("%.3e", worst));
  return o;
}

Outcome dspp_checks() {
  Outcome o;
  std::mt19937_64 rng(8);
  const Matrix x = random_matrix(rng, 12, 2);
  const Vector y = (x.col(0).array() * 2.0).sin().matrix() + random_matrix(rng, 12, 1, 0.1);
  models::DSPPOptions s;
  s.hidden = {2};
  s.num_inducing = 6;
  models::DSPP dspp(s, x, rng);
  randomize(dspp.stack(), rng);
  dspp.weight_logits().raw() = random_matrix(rng, 1, 8);

  Tape a, b;
  const double first = dspp.objective(a, x, y, 12.0).item();
  const double second = dspp.objective(b, x, y, 12.0).item();
  o.require(std::memcmp(&first, &second, sizeof first) == 0, "objective not bit-identical");

  const auto pred = std::get<models::MixturePrediction>(dspp.predict(x));
  double direct = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    double density = 0.0;
    for (Eigen::Index j = 0; j < pred.weights.size(); ++j) {
      const double v = pred.vars(i, j);
      const double r = y(i) - pred.means(i, j);
      density += pred.weights(j) * std::exp(-r * r / (2 * v)) / std::sqrt(2 * std::numbers::pi * v);
    }
    direct -= std::log(density);
  }
  direct /= static_cast<double>(y.size());
  const double nll = metrics::nll_regression(pred, y);
  o.require(std::abs(nll - direct) <= 1e-10, "mixture NLL vs direct density");

  diff::Adam adam(dspp.parameters(), 0.05);
  double worst = 0.0;
  for (int step = 0; step < 500; ++step) {
    Tape t;
    t.backward(-dspp.objective(t, x, y, 12.0));
    adam.step();
    const Vector w = dspp.weights();
    worst = std::max(worst, std::abs(w.sum() - 1.0));
    o.require((w.array() > 0.0).all(), "non-positive weight");
  }
  o.require(worst <= 1e-12, "weights left the simplex");
  o.note("|NLL - direct| " + fmt("%.2e", std::abs(nll - direct)) + ", max |sum w - 1| " +
         fmt("%.2e", worst));
  return o;
}

Outcome ensemble_moments() {
  Outcome o;
  std::mt19937_64 rng(9);
  double worst_mean = 0.0, worst_var = 0.0;
  for (int k = 1; k <= 10; ++k) {
    const Matrix means = random_matrix(rng, 1, k, 2.0);
    const Matrix vars = (random_matrix(rng, 1, k).array().abs() + 0.05).matrix();
    const models::GaussianPrediction g = models::aggregate_regression(means, vars);
    const auto [m, v] = sample_mixture(means.row(0), vars.row(0), Vector::Constant(k, 1.0 / k),
                                       1000000, 100 + static_cast<std::uint64_t>(k));
    const double sd = std::sqrt(g.var(0));
    worst_mean = std::max(worst_mean, std::abs(m - g.mean(0)) / std::max(std::abs(g.mean(0)), sd));
    worst_var = std::max(worst_var, std::abs(v - g.var(0)) / g.var(0));
  }
  o.require(worst_mean <= 0.01, "mean");
  o.require(worst_var <= 0.01, "variance");
  o.note("K = 1..10, worst mean dev " + fmt("%.2e", worst_mean) + ", worst var rel dev " +
         fmt("%.2e", worst_var));
  return o;
}

Outcome calibration() {
  Outcome o;
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> conf(0.5, 1.0), u(0.0, 1.0);
  const int n = 100000;
  Matrix probs(n, 2);
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) {
    const double p = conf(rng);
    const int top = u(rng) < 0.5 ? 0 : 1;
    probs(i, top) = p;
    probs(i, 1 - top) = 1.0 - p;
    labels[static_cast<std::size_t>(i)] = u(rng) < p ? top : 1 - top;
  }
  const double ece = metrics::ece_classification(probs, labels).ece;
  o.require(ece <= 0.01, "calibrated ECE");

  Matrix sure(n, 2);
  std::vector<int> half(n);
  for (int i = 0; i < n; ++i) {
    sure(i, 0) = 1.0;
    sure(i, 1) = 0.0;
    half[static_cast<std::size_t>(i)] = i % 2;
  }
  const double miscal = metrics::ece_classification(sure, half).ece;
  o.require(std::abs(miscal - 0.5) <= 0.01, "miscalibrated ECE");

  std::normal_distribution<double> z;
  Vector m(n), s(n), y(n);
  for (int i = 0; i < n; ++i) {
    m(i) = 3.0 * z(rng);
    s(i) = 0.2 + std::abs(z(rng));
    y(i) = m(i) + s(i) * z(rng);
  }
  const double ce = metrics::regression_calibration(m, s, y).error;
  o.require(ce <= 0.02, "calibrated CE_reg");
  const double q = metrics::normal_quantile(0.975);
  o.require(std::abs(q - 1.95996) <= 1e-4, "z(0.95)");
  o.note("ECE " + fmt("%.4f", ece) + ", half-correct ECE " + fmt("%.4f", miscal) + ", CE_reg " +
         fmt("%.4f", ce) + ", z " + fmt("%.6f", q));
  return o;
}

Outcome perturbations() {
  Outcome o;
  std::mt19937_64 rng(11);
  const Matrix x = random_matrix(rng, 50, 8);
  const Vector stds = (random_matrix(rng, 8, 1).array().abs() + 0.5).matrix();
  for (shift::PerturbationKind kind : shift::kAllPerturbations) {
    const Matrix p = shift::perturb(x, {kind, 0.0, 3, stds});
    o.require(std::memcmp(p.data(), x.data(), sizeof(double) * static_cast<std::size_t>(x.size())) == 0,
              std::string(shift::to_string(kind)) + " at s = 0");
  }
  o.require(shift::perturb(x, {shift::PerturbationKind::kFeatureMasking, 1.0, 3, stds}).isZero(0.0),
            "masking at s = 1");
  for (double s : {0.1, 0.5, 1.0}) {
    const Matrix p = shift::perturb(x, {shift::PerturbationKind::kFeaturePermutation, s, 4, stds});
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      std::vector<double> a(x.col(j).data(), x.col(j).data() + x.rows());
      std::vector<double> b(p.col(j).data(), p.col(j).data() + p.rows());
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      o.require(a == b, "permutation multiset");
    }
  }
  const Eigen::Index side = 1000;
  Vector sigma(side);
  for (Eigen::Index j = 0; j < side; ++j) sigma(j) = 0.5 + 1.5 * static_cast<double>(j) / side;
  const double s = 0.4;
  const Matrix zero = Matrix::Zero(side, side);
  const Matrix noisy = shift::perturb(zero, {shift::PerturbationKind::kGaussianNoise, s, 5, sigma});
  const Matrix scaled = (noisy.array().rowwise() / sigma.transpose().array()).matrix();
  const double mean = scaled.mean();
  const double sd = std::sqrt((scaled.array() - mean).square().sum() / (scaled.size() - 1));
  o.require(std::abs(sd - s) <= 0.01 * s, "noise std");
  const auto& sched = shift::severity_schedule();
  o.require(sched == std::array<double, 6>{0.0, 0.1, 0.2, 0.4, 0.6, 0.8}, "severity schedule");
  o.note("noise std / (sigma_j s) = " + fmt("%.5f", sd / s) + " at 1e6 cells");
  return o;
}

Outcome bayesopt() {
  Outcome o;
  hpo::SearchSpace space;
  space.continuous("x", -5, 5);
  int hits = 0;
  bool monotone = true;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    hpo::TuneOptions opt;
    opt.seed = seed;
    const hpo::TuneResult r = hpo::tune([](const hpo::Config& c, std::uint64_t) {
      const double d = c.at("x") - 2.0;
      return d * d;
    }, space, opt);
    o.require(r.history.size() == 20, "history length");
    for (std::size_t i = 1; i < r.history.size(); ++i) {
      monotone = monotone && r.history[i].incumbent <= r.history[i - 1].incumbent;
    }
    hits += std::abs(r.best.config.at("x") - 2.0) <= 0.3;
  }
  o.require(hits >= 18, "fewer than 18 of 20 seeds within 0.3");
  o.require(monotone, "incumbent not monotone");
  o.require(hpo::expected_improvement(1.5, 0.0, 1.5) == 0.0, "EI(sigma = 0, mu = best)");
  o.note(std::to_string(hits) + "/20 seeds within 0.3");
  return o;
}

std::map<std::string, double> finite_check(const bench::MetricReport& m, Outcome& o,
                                           const std::string& who) {
  for (const auto& [name, value] : m) o.require(std::isfinite(value), who + " " + name);
  return m;
}

Outcome end_to_end() {
  Outcome o;
  for (const std::string task : {"regression", "classification"}) {
    const std::string dataset = task == "regression" ? "casp" : "esr";
    for (const std::string model : {"dgp", "dspp", "ensemble"}) {
      bench::ExperimentConfig c = bench::preset(model + "-" + dataset);
      c.dataset = "synthetic";
      c.synthetic_task = task;
      c.synthetic_size = 500;
      c.num_inducing = 32;
      c.epochs = 20;
      c.seed = 1;
      bench::validate(c);
      const bench::RunResult r = bench::run_experiment(c, bench::load_dataset(c));
      const std::string who = model + "/" + task;
      finite_check(r.metrics, o, who);
      const double drop = r.curve.front().train_loss - r.curve.back().train_loss;
      o.require(drop > 0.0, who + " loss did not decrease");
      o.note(who + " nll " + fmt("%.3f", r.metrics.at("nll")) +
             (task == "regression" ? " mae " + fmt("%.3f", r.metrics.at("mae"))
                                   : " acc " + fmt("%.3f", r.metrics.at("acc"))));
    }
  }
  return o;
}

Outcome shift_structure() {
  Outcome o;
  for (const std::string model : {"dgp", "dspp", "ensemble"}) {
    bench::ExperimentConfig c = bench::preset(model + "-esr");
    c.dataset = "synthetic";
    c.synthetic_task = "classification";
    c.num_inducing = 32;
    c.epochs = 20;
    const bench::ShiftResult r = bench::run_shift_experiment(c, bench::load_dataset(c));
    std::map<std::pair<double, std::string>, int> counts;
    for (const bench::ShiftRow& row : r.rows) ++counts[{row.severity, row.metric}];
    o.require(counts.size() == 18, model + " (severity, metric) groups");
    for (const auto& [key, n] : counts) o.require(n == 25, model + " rows per group");
    for (const bench::ShiftRow& row : r.rows) {
      if (row.severity != 0.0) continue;
      for (const auto& [seed, metrics] : r.baselines) {
        if (seed != row.seed) continue;
        const double base = metrics.at(row.metric);
        o.require(std::memcmp(&base, &row.value, sizeof base) == 0, model + " severity-0 row");
      }
    }
    o.note(model + " " + std::to_string(r.rows.size()) + " rows");
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient suite", gradients},
      {"svgp vs exact posterior", svgp_vs_exact},
      {"evidence bound", evidence_bound},
      {"dspp determinism and mixture", dspp_checks},
      {"ensemble aggregation", ensemble_moments},
      {"calibration metrics", calibration},
      {"perturbations", perturbations},
      {"bayesopt sanity", bayesopt},
      {"end-to-end desk run", end_to_end},
      {"shift protocol structure", shift_structure},
  };
  const std::vector<double> limits{30, 60, 0, 0, 0, 0, 0, 60, 300, 0};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (limits[i] > 0 && seconds >= limits[i]) out.require(false, "runtime over " + fmt("%.0f s", limits[i]));
    if (!out.pass) ++failed;
    std::printf("criterion %zu %-30s %s  (%.1f s) %s\n", i + 1, criteria[i].first.c_str(),
                out.pass ? "PASS" : "FAIL", seconds, out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
