#pragma once

namespace uqb::metrics {

double normal_pdf(double z);
double normal_cdf(double z);

/// Inverse standard normal CDF for p in (0, 1). Rational approximation
/// followed by one Halley step; absolute error below 1e-12 on (1e-300, 1).
double normal_quantile(double p);

}  // namespace uqb::metrics
