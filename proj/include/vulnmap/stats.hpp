#pragma once

#include <Eigen/Core>

namespace vulnmap::stats {

using Eigen::VectorXd;
using ConstVec = Eigen::Ref<const Eigen::VectorXd>;

/// Type-7 quantile: linear interpolation between order statistics at rank
/// 1 + p * (n - 1).
double quantile(ConstVec values, double p);

/// Tukey trimean, 0.25 Q(.25) + 0.5 Q(.5) + 0.25 Q(.75).
double trimean(ConstVec values);

/// 1-based ranks with ties averaged (midranks).
VectorXd midranks(ConstVec values);

/// (rank - 0.5) / n per entry; strictly inside (0, 1).
VectorXd rankit(ConstVec values);

/// Standard normal quantile (AS 241, PPND16); |error| well under 1e-9.
double inv_normal_cdf(double p);

/// Standard normal CDF (erfc based), used as the oracle counterpart.
double normal_cdf(double x);

double pearson(ConstVec x, ConstVec y);

/// Pearson correlation of midranks.
double spearman_rho(ConstVec x, ConstVec y);

}  // namespace vulnmap::stats
