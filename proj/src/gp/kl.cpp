#include "uqbench/gp/kl.hpp"

#include "uqbench/diff/linalg.hpp"
#include "uqbench/diff/ops.hpp"
#include "uqbench/errors.hpp"

namespace uqb::gp {

using namespace uqb::diff;

Var gaussian_kl(const Var& m, const Var& scale_tril, const Var& m0, const Var& k0) {
  const auto size = m.rows();
  detail::require(m.cols() == 1 && m0.rows() == size && m0.cols() == 1,
                  "gaussian_kl: means must be M x 1");
  detail::require(scale_tril.rows() == size && scale_tril.cols() == size && k0.rows() == size &&
                      k0.cols() == size,
                  "gaussian_kl: covariance factors must be M x M");
  const Var prior_lower = cholesky(k0);
  const Var a = tri_solve_lower(prior_lower, scale_tril);
  const Var d = tri_solve_lower(prior_lower, m0 - m);
  const Var log_det_prior = sum(log(diag(prior_lower))) * 2.0;
  const Var log_det_q = sum(log(diag(scale_tril))) * 2.0;
  return (sum(square(a)) + sum(square(d)) - static_cast<double>(size) + log_det_prior -
          log_det_q) *
         0.5;
}

Var whitened_kl(const Var& m, const Var& scale_tril) {
  const auto size = m.rows();
  detail::require(m.cols() == 1 && scale_tril.rows() == size && scale_tril.cols() == size,
                  "whitened_kl: shapes must be M x 1 and M x M");
  const Var log_det_q = sum(log(diag(scale_tril))) * 2.0;
  return (sum(square(scale_tril)) + sum(square(m)) - static_cast<double>(size) - log_det_q) * 0.5;
}

}  // namespace uqb::gp
