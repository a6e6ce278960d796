// Standard normal distribution functions.
//
// norm_ppf uses Wichura's rational approximations (algorithm AS 241,
// double precision branch). It is pure arithmetic plus sqrt/log, which
// keeps quantiles reproducible and accurate to ~1e-15 relative error
// over (0,1). norm_cdf goes through erfc to stay accurate in the tails.
#pragma once

namespace spikecycle {

// P(Z <= x) for Z ~ N(0,1).
[[nodiscard]] double norm_cdf(double x);

// Density of N(0,1).
[[nodiscard]] double norm_pdf(double x);

// Quantile function: norm_cdf(norm_ppf(u)) == u for u in (0,1).
// u <= 0 or u >= 1 is a domain error.
[[nodiscard]] double norm_ppf(double u);

}  // namespace spikecycle
