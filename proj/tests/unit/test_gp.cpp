#include <doctest.h>

#include "support/finite_diff.hpp"
#include "uqbench/diff/linalg.hpp"
#include "uqbench/diff/ops.hpp"
#include "uqbench/errors.hpp"
#include "uqbench/gp/exact_gp.hpp"
#include "uqbench/gp/kernel.hpp"
#include "uqbench/gp/kl.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

using namespace uqb;
using namespace uqb::gp;
using uqb::diff::Tape;
using uqb::testing::random_matrix;
using uqb::testing::random_spd;

namespace {

// Brute-force kernel: double loop, no vectorization shared with the library.
Matrix loop_kernel(const Matrix& a, const Matrix& b, double l, double sf) {
  Matrix k(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      double d2 = 0.0;
      for (Eigen::Index c = 0; c < a.cols(); ++c) d2 += std::pow(a(i, c) - b(j, c), 2);
      k(i, j) = sf * std::exp(-d2 / (2.0 * l * l));
    }
  }
  return k;
}

double dense_log_density(const Vector& y, double c, const Matrix& cov) {
  const Matrix inv = cov.inverse();
  const Vector r = y.array() - c;
  const double n = static_cast<double>(y.size());
  return -0.5 * r.dot(inv * r) - 0.5 * std::log(cov.determinant()) -
         0.5 * n * std::log(2.0 * std::numbers::pi);
}

}  // namespace

TEST_CASE("rbf kernel examples") {
  RBFParams p;
  p.lengthscales = Vector::Constant(1, 0.7);
  p.outputscale = 2.5;
  Matrix x(1, 3);
  x << 0.3, -1.2, 4.0;
  CHECK(rbf_kernel(x, x, p)(0, 0) == doctest::Approx(2.5).epsilon(1e-15));

  RBFParams unit;
  Matrix a(1, 2), b(1, 2);
  a << 0.0, 0.0;
  b << 1.0, 1.0;
  CHECK(rbf_kernel(a, b, unit)(0, 0) == doctest::Approx(0.36787944117144233).epsilon(1e-14));

  std::mt19937_64 rng(3);
  const Matrix xs = random_matrix(rng, 12, 4);
  const Matrix k = rbf_kernel(xs, xs, p);
  CHECK(k == k.transpose());
  CHECK((k - loop_kernel(xs, xs, 0.7, 2.5)).cwiseAbs().maxCoeff() < 1e-13);

  Matrix jittered = k;
  jittered.diagonal().array() += 1e-8;
  CHECK(diff::cholesky_jittered(jittered).jitter == 0.0);

  CHECK_THROWS_AS(rbf_kernel(xs, random_matrix(rng, 2, 3), p), ContractViolation);
}

TEST_CASE("ard kernel scales dimensions separately") {
  RBFParams p;
  p.lengthscales = Vector(2);
  p.lengthscales << 1.0, 2.0;
  Matrix a = Matrix::Zero(1, 2), b(1, 2);
  b << 1.0, 2.0;
  CHECK(rbf_kernel(a, b, p)(0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("differentiable kernel matches the plain kernel") {
  std::mt19937_64 rng(11);
  const Matrix x = random_matrix(rng, 5, 2);
  const Matrix x2 = random_matrix(rng, 4, 2);
  RBFKernel kernel(2, false, 0.8, 1.7);
  Tape tape;
  const Matrix k = kernel(tape, tape.constant(x), tape.constant(x2)).value();
  CHECK((k - rbf_kernel(x, x2, kernel.params())).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("marginal likelihood of a single point") {
  Matrix x(1, 1);
  x << 0.4;
  Vector y(1);
  y << 0.0;
  ExactGP gp(x, y, RBFKernel(1, false, 1.0, 1.0), 1.0, 0.0);
  CHECK(gp.log_marginal_likelihood() ==
        doctest::Approx(-0.5 * std::log(4.0 * std::numbers::pi)).epsilon(1e-14));
  CHECK(gp.log_marginal_likelihood() == doctest::Approx(-1.26551).epsilon(1e-5));
}

TEST_CASE("marginal likelihood matches a dense-inverse oracle") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    std::mt19937_64 rng(seed);
    const Matrix x = random_matrix(rng, 6, 2);
    const Vector y = random_matrix(rng, 6, 1);
    ExactGP gp(x, y, RBFKernel(2, false, 0.9, 1.3), 0.4, 0.2);
    Matrix cov = loop_kernel(x, x, 0.9, 1.3);
    cov.diagonal().array() += 0.16;
    CHECK(std::abs(gp.log_marginal_likelihood() - dense_log_density(y, 0.2, cov)) <= 1e-8);
  }
}

TEST_CASE("marginal likelihood is invariant to permuting the data") {
  std::mt19937_64 rng(21);
  const Matrix x = random_matrix(rng, 7, 3);
  const Vector y = random_matrix(rng, 7, 1);
  std::vector<int> order(7);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  Matrix xp(7, 3);
  Vector yp(7);
  for (int i = 0; i < 7; ++i) {
    xp.row(i) = x.row(order[static_cast<std::size_t>(i)]);
    yp(i) = y(order[static_cast<std::size_t>(i)]);
  }
  ExactGP a(x, y, RBFKernel(3, false, 1.1, 0.9), 0.3);
  ExactGP b(xp, yp, RBFKernel(3, false, 1.1, 0.9), 0.3);
  CHECK(a.log_marginal_likelihood() == doctest::Approx(b.log_marginal_likelihood()).epsilon(1e-12));
}

TEST_CASE("marginal likelihood gradient matches finite differences") {
  for (bool ard : {false, true}) {
    std::mt19937_64 rng(ard ? 5 : 6);
    const Matrix x = random_matrix(rng, 6, 2);
    const Vector y = random_matrix(rng, 6, 1);
    ExactGP gp(x, y, RBFKernel(2, ard, 0.8, 1.2), 0.5);
    const auto result = uqb::testing::compare_gradients(
        gp.parameters(), [&](Tape& t) { return gp.log_marginal_likelihood(t); });
    CHECK(result.relative_error <= 1e-4);
    CHECK(result.analytic_norm > 0.0);
  }
}

TEST_CASE("posterior interpolates training targets with vanishing noise") {
  Matrix x(3, 1);
  x << -1.0, 0.5, 2.0;
  Vector y(3);
  y << 0.3, -0.8, 1.1;
  ExactGP gp(x, y, RBFKernel(1, false, 1.0, 1.0), 1e-8);
  const GaussianMarginals post = gp.posterior(x);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(post.mean(i) - y(i)) <= 1e-4);
}

TEST_CASE("posterior reverts to the prior far from the data") {
  Matrix x(3, 1);
  x << -1.0, 0.5, 2.0;
  Vector y(3);
  y << 0.3, -0.8, 1.1;
  ExactGP gp(x, y, RBFKernel(1, false, 0.5, 1.8), 0.1, 0.25);
  Matrix far(1, 1);
  far << 100.0;
  const GaussianMarginals post = gp.posterior(far);
  CHECK(std::abs(post.mean(0) - 0.25) <= 1e-6);
  CHECK(std::abs(post.var(0) - 1.8) <= 1e-6);
  CHECK(std::abs(gp.posterior(far, true).var(0) - (1.8 + 0.01)) <= 1e-6);
}

TEST_CASE("posterior matches joint-Gaussian conditioning") {
  std::mt19937_64 rng(33);
  const Matrix x = random_matrix(rng, 5, 2);
  const Vector y = random_matrix(rng, 5, 1);
  const Matrix xq = random_matrix(rng, 3, 2);
  const double l = 1.1, sf = 0.9, noise = 0.2, c = -0.1;
  ExactGP gp(x, y, RBFKernel(2, false, l, sf), noise, c);

  // Joint covariance over [f(xq); y], conditioned via the explicit inverse.
  Matrix all(8, 2);
  all << xq, x;
  Matrix joint = loop_kernel(all, all, l, sf);
  joint.bottomRightCorner(5, 5).diagonal().array() += noise * noise;
  const Matrix kyy_inv = joint.bottomRightCorner(5, 5).inverse();
  const Matrix kqy = joint.topRightCorner(3, 5);
  const Vector mean = (kqy * kyy_inv * (y.array() - c).matrix()).array() + c;
  const Matrix cov = joint.topLeftCorner(3, 3) - kqy * kyy_inv * kqy.transpose();

  const GaussianMarginals post = gp.posterior(xq);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(post.mean(i) - mean(i)) <= 1e-8);
    CHECK(std::abs(post.var(i) - cov(i, i)) <= 1e-8);
  }
}

TEST_CASE("posterior variance never exceeds the prior variance") {
  std::mt19937_64 rng(44);
  const Matrix x = random_matrix(rng, 15, 2);
  const Vector y = random_matrix(rng, 15, 1);
  ExactGP gp(x, y, RBFKernel(2, false, 0.6, 2.0), 0.05);
  const GaussianMarginals post = gp.posterior(random_matrix(rng, 200, 2, 2.0));
  CHECK((post.var.array() <= 2.0 + 1e-10).all());
  CHECK((post.var.array() > 0.0).all());
}

TEST_CASE("fitting increases the marginal likelihood") {
  std::mt19937_64 rng(8);
  Matrix x = random_matrix(rng, 20, 1, 2.0);
  Vector y = (x.array() * 1.5).sin().matrix() + random_matrix(rng, 20, 1, 0.05);
  ExactGP gp(x, y, RBFKernel(1, false, 3.0, 0.3), 0.8);
  const double before = gp.log_marginal_likelihood();
  gp.fit({200, 0.05});
  CHECK(gp.log_marginal_likelihood() > before + 5.0);
  CHECK(gp.noise_std() < 0.3);
}

TEST_CASE("gaussian kl examples") {
  Tape tape;
  SUBCASE("identical distributions") {
    std::mt19937_64 rng(2);
    const Matrix k = random_spd(rng, 4);
    const Matrix l = k.llt().matrixL();
    const Matrix m = random_matrix(rng, 4, 1);
    const double kl =
        gaussian_kl(tape.constant(m), tape.constant(l), tape.constant(m), tape.constant(k)).item();
    CHECK(std::abs(kl) <= 1e-12);
  }
  SUBCASE("unit shift in one dimension") {
    const double kl = gaussian_kl(tape.constant(1.0), tape.constant(1.0), tape.constant(0.0),
                                  tape.constant(1.0))
                          .item();
    CHECK(kl == doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("nonnegative on random inputs") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 50; ++trial) {
      Matrix l = random_matrix(rng, 3, 3).triangularView<Eigen::Lower>();
      l.diagonal() = l.diagonal().cwiseAbs().array() + 0.1;
      const double kl = gaussian_kl(tape.constant(random_matrix(rng, 3, 1)), tape.constant(l),
                                    tape.constant(random_matrix(rng, 3, 1)),
                                    tape.constant(random_spd(rng, 3)))
                            .item();
      CHECK(kl >= 0.0);
    }
  }
  SUBCASE("whitened form agrees with the general form") {
    std::mt19937_64 rng(10);
    Matrix l = random_matrix(rng, 3, 3).triangularView<Eigen::Lower>();
    l.diagonal() = l.diagonal().cwiseAbs().array() + 0.2;
    const Matrix m = random_matrix(rng, 3, 1);
    const double general = gaussian_kl(tape.constant(m), tape.constant(l),
                                       tape.constant(Matrix::Zero(3, 1)),
                                       tape.constant(Matrix::Identity(3, 3)))
                               .item();
    const double whitened = whitened_kl(tape.constant(m), tape.constant(l)).item();
    CHECK(whitened == doctest::Approx(general).epsilon(1e-12));
  }
  SUBCASE("non-factorizable prior covariance") {
    CHECK_THROWS_AS(gaussian_kl(tape.constant(0.0), tape.constant(1.0), tape.constant(0.0),
                                tape.constant(-1.0)),
                    NumericError);
  }
}

TEST_CASE("gaussian kl gradient matches finite differences") {
  std::mt19937_64 rng(12);
  diff::Parameter m("m", random_matrix(rng, 3, 1));
  diff::Parameter raw("raw", random_matrix(rng, 3, 3, 0.3));
  diff::Parameter m0("m0", random_matrix(rng, 3, 1));
  const Matrix k0 = random_spd(rng, 3);
  const auto result = uqb::testing::compare_gradients({&m, &raw, &m0}, [&](Tape& t) {
    return gaussian_kl(t.bind(m), diff::lower_from_raw(t.bind(raw)), t.bind(m0), t.constant(k0));
  });
  CHECK(result.relative_error <= 1e-4);
}
