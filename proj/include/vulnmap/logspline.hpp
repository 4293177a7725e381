#pragma once

#include <Eigen/Core>
#include <vector>

namespace vulnmap::logspline {

/// Monotone CDF backed either by a fitted log-spline density (piecewise
/// linear log-density between quantile-placed knots, maximum likelihood,
/// knot count selected by AIC) or, after FitDiverged, by the interpolated
/// empirical CDF. Evaluations clamp to [0, 1].
class LogsplineCdf {
 public:
  double operator()(double x) const;

  bool fallback() const { return fallback_; }
  int knot_count() const { return static_cast<int>(knots_.size()); }
  double loglik() const { return loglik_; }
  double aic() const { return aic_; }

 private:
  friend LogsplineCdf fit(const Eigen::Ref<const Eigen::VectorXd>&, int, int);

  // fitted spline
  std::vector<double> knots_;
  std::vector<double> log_density_;  // knot values of log f + log normalizer
  std::vector<double> cum_mass_;     // CDF at knots, cum_mass_.back() == 1
  // fallback: interpolated empirical CDF
  std::vector<double> ecdf_x_;
  std::vector<double> ecdf_p_;
  bool fallback_ = false;
  double loglik_ = 0.0;
  double aic_ = 0.0;
};

/// Fits over knot counts in [min_knots, max_knots] and keeps the AIC
/// minimizer, AIC = -2 loglik + 2 (knots - 1). Falls back to the empirical
/// CDF when every knot count fails to fit; the result is flagged.
LogsplineCdf fit(const Eigen::Ref<const Eigen::VectorXd>& values,
                 int min_knots = 3, int max_knots = 10);

}  // namespace vulnmap::logspline
