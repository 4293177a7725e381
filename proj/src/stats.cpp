#include "vulnmap/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "vulnmap/errors.hpp"

namespace vulnmap::stats {

double quantile(ConstVec values, double p) {
  if (values.size() == 0) throw EmptyInput("quantile of empty sample");
  if (p < 0.0 || p > 1.0) throw DomainError("quantile level outside [0, 1]");
  std::vector<double> v(values.data(), values.data() + values.size());
  std::sort(v.begin(), v.end());
  const double h = p * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= v.size()) return v.back();
  const double frac = h - static_cast<double>(lo);
  return v[lo] + frac * (v[lo + 1] - v[lo]);
}

double trimean(ConstVec values) {
  return 0.25 * quantile(values, 0.25) + 0.5 * quantile(values, 0.5) +
         0.25 * quantile(values, 0.75);
}

VectorXd midranks(ConstVec values) {
  const Eigen::Index n = values.size();
  if (n == 0) throw EmptyInput("ranks of empty sample");
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::sort(idx.begin(), idx.end(),
            [&](Eigen::Index a, Eigen::Index b) { return values[a] < values[b]; });
  VectorXd ranks(n);
  Eigen::Index i = 0;
  while (i < n) {
    Eigen::Index j = i;
    while (j + 1 < n && values[idx[j + 1]] == values[idx[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based
    for (Eigen::Index t = i; t <= j; ++t) ranks[idx[t]] = mid;
    i = j + 1;
  }
  return ranks;
}

VectorXd rankit(ConstVec values) {
  VectorXd r = midranks(values);
  return (r.array() - 0.5) / static_cast<double>(values.size());
}

double inv_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw DomainError("inverse normal CDF defined on (0, 1)");

  // Wichura's algorithm AS 241 (PPND16).
  const double q = p - 0.5;
  double r, x;
  if (std::abs(q) <= 0.425) {
    r = 0.180625 - q * q;
    x = q *
        (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
              6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
            1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
          1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
        (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
              3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
            5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
          4.2313330701600911252e+1) * r + 1.0);
    return x;
  }
  r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  if (r <= 5.0) {
    r -= 1.6;
    x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
            3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
          4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
          2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= 5.0;
    x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
          5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -x : x;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double pearson(ConstVec x, ConstVec y) {
  if (x.size() != y.size())
    throw LengthMismatch("correlation inputs differ in length");
  if (x.size() < 3) throw LengthMismatch("correlation needs at least 3 pairs");
  const double mx = x.mean();
  const double my = y.mean();
  const VectorXd cx = x.array() - mx;
  const VectorXd cy = y.array() - my;
  const double sx = cx.squaredNorm();
  const double sy = cy.squaredNorm();
  if (sx == 0.0 || sy == 0.0)
    throw ZeroVariance("correlation of a constant sample");
  return cx.dot(cy) / std::sqrt(sx * sy);
}

double spearman_rho(ConstVec x, ConstVec y) {
  return pearson(midranks(x), midranks(y));
}

}  // namespace vulnmap::stats
