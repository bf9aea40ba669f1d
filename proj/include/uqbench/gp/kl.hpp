#pragma once

#include "uqbench/diff/tape.hpp"

namespace uqb::gp {

/// KL( N(m, Ls Ls^T) || N(m0, K0) ) in closed form:
///   0.5 * ( tr(K0^{-1} S) + (m0 - m)^T K0^{-1} (m0 - m) - M + log|K0| - log|S| ).
/// `scale_tril` must be lower-triangular with a positive diagonal; `m`, `m0`
/// are M x 1.
diff::Var gaussian_kl(const diff::Var& m, const diff::Var& scale_tril, const diff::Var& m0,
                      const diff::Var& k0);

/// Same divergence against the standard normal prior N(0, I), which is what a
/// whitened inducing distribution is regularized towards.
diff::Var whitened_kl(const diff::Var& m, const diff::Var& scale_tril);

}  // namespace uqb::gp
