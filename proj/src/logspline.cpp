#include "vulnmap/logspline.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>

#include "vulnmap/errors.hpp"

namespace vulnmap::logspline {

namespace {

// 16-point Gauss-Legendre rule on [0, 1].
constexpr int kQuad = 16;
constexpr double kQx[kQuad] = {
    0.0052995325041750337, 0.0277124884633837103, 0.0671843988060841224,
    0.1222977958224984868, 0.1910618777986781147, 0.2709916111713863151,
    0.3591982246103705422, 0.4524937450811812866, 0.5475062549188187134,
    0.6408017753896294578, 0.7290083888286136849, 0.8089381222013218853,
    0.8777022041775015132, 0.9328156011939158776, 0.9722875115366162897,
    0.9947004674958249663};
constexpr double kQw[kQuad] = {
    0.0135762297058770482, 0.0311267619693239468, 0.0475792558412463928,
    0.0623144856277669384, 0.0747979944082883680, 0.0845782596975012679,
    0.0913017075224617918, 0.0947253052275342510, 0.0947253052275342510,
    0.0913017075224617918, 0.0845782596975012679, 0.0747979944082883680,
    0.0623144856277669384, 0.0475792558412463928, 0.0311267619693239468,
    0.0135762297058770482};

/// (exp(y) - 1) / y with the y -> 0 limit.
double exprel(double y) {
  if (y == 0.0) return 1.0;
  return std::expm1(y) / y;
}

struct Moments {
  double z = 0.0;             // integral of exp(g)
  Eigen::VectorXd eb;         // integral of exp(g) * B_k
  Eigen::MatrixXd ebb;        // integral of exp(g) * B_k * B_l
};

Moments quadrature_moments(const std::vector<double>& knots,
                           const Eigen::VectorXd& a) {
  const int m = static_cast<int>(knots.size());
  Moments mo;
  mo.eb = Eigen::VectorXd::Zero(m);
  mo.ebb = Eigen::MatrixXd::Zero(m, m);
  const double amax = a.maxCoeff();
  for (int i = 0; i + 1 < m; ++i) {
    const double h = knots[i + 1] - knots[i];
    for (int q = 0; q < kQuad; ++q) {
      const double u = kQx[q];
      const double g = a[i] * (1.0 - u) + a[i + 1] * u - amax;
      const double w = kQw[q] * h * std::exp(g);
      const double b0 = 1.0 - u, b1 = u;
      mo.z += w;
      mo.eb[i] += w * b0;
      mo.eb[i + 1] += w * b1;
      mo.ebb(i, i) += w * b0 * b0;
      mo.ebb(i + 1, i + 1) += w * b1 * b1;
      mo.ebb(i, i + 1) += w * b0 * b1;
      mo.ebb(i + 1, i) += w * b0 * b1;
    }
  }
  // Moments carry the common exp(amax) factor; it cancels in E[.] = eb / z.
  return mo;
}

int segment_of(const std::vector<double>& knots, double x) {
  const int m = static_cast<int>(knots.size());
  if (x <= knots.front()) return 0;
  if (x >= knots[static_cast<std::size_t>(m - 2)]) return m - 2;
  const auto it = std::upper_bound(knots.begin(), knots.end(), x);
  return static_cast<int>(it - knots.begin()) - 1;
}

struct FitOutcome {
  Eigen::VectorXd a;
  double loglik;
};

/// Maximum-likelihood knot values of the log density (a[0] pinned at 0);
/// the problem is concave, solved by damped Newton.
FitOutcome fit_knots(const std::vector<double>& knots,
                     const std::vector<double>& sorted_values) {
  const int m = static_cast<int>(knots.size());
  const auto n = static_cast<double>(sorted_values.size());

  // Hat-function sums over the data.
  Eigen::VectorXd c = Eigen::VectorXd::Zero(m);
  for (double x : sorted_values) {
    const int i = segment_of(knots, x);
    const double u = (x - knots[i]) / (knots[i + 1] - knots[i]);
    c[i] += 1.0 - u;
    c[i + 1] += u;
  }

  Eigen::VectorXd a = Eigen::VectorXd::Zero(m);
  const auto objective = [&](const Eigen::VectorXd& av) {
    const Moments mo = quadrature_moments(knots, av);
    if (!(mo.z > 0.0) || !std::isfinite(mo.z))
      return -std::numeric_limits<double>::infinity();
    return c.dot(av) - n * (std::log(mo.z) + av.maxCoeff());
  };

  double cur = objective(a);
  if (!std::isfinite(cur)) throw FitDiverged("log-spline objective not finite");

  const int reduced = m - 1;
  for (int iter = 0; iter < 60; ++iter) {
    const Moments mo = quadrature_moments(knots, a);
    if (!(mo.z > 0.0) || !std::isfinite(mo.z))
      throw FitDiverged("log-spline normalizer not finite");
    const Eigen::VectorXd eb = mo.eb / mo.z;
    const Eigen::MatrixXd ebb = mo.ebb / mo.z;

    Eigen::VectorXd grad(reduced);
    Eigen::MatrixXd hess(reduced, reduced);
    for (int k = 0; k < reduced; ++k) {
      grad[k] = c[k + 1] - n * eb[k + 1];
      for (int l = 0; l < reduced; ++l)
        hess(k, l) = -n * (ebb(k + 1, l + 1) - eb[k + 1] * eb[l + 1]);
    }
    if (grad.lpNorm<Eigen::Infinity>() <= 1e-9 * n + 1e-12)
      return {a, cur};

    Eigen::MatrixXd neg = -hess;
    neg.diagonal().array() += 1e-10 * n;
    const Eigen::VectorXd step = neg.ldlt().solve(grad);
    if (!step.allFinite()) throw FitDiverged("log-spline Newton step not finite");

    double t = 1.0;
    bool accepted = false;
    const double slope = grad.dot(step);
    while (t > 1e-12) {
      Eigen::VectorXd trial = a;
      trial.tail(reduced) += t * step;
      if (trial.lpNorm<Eigen::Infinity>() < 200.0) {
        const double val = objective(trial);
        if (std::isfinite(val) && val >= cur + 1e-4 * t * slope) {
          a = trial;
          cur = val;
          accepted = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!accepted) throw FitDiverged("log-spline line search stalled");
  }
  throw FitDiverged("log-spline Newton did not converge");
}

}  // namespace

double LogsplineCdf::operator()(double x) const {
  if (fallback_) {
    if (x <= ecdf_x_.front()) return ecdf_p_.front();
    if (x >= ecdf_x_.back()) return ecdf_p_.back();
    const auto it = std::upper_bound(ecdf_x_.begin(), ecdf_x_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - ecdf_x_.begin()) - 1;
    const double u = (x - ecdf_x_[i]) / (ecdf_x_[i + 1] - ecdf_x_[i]);
    return ecdf_p_[i] + u * (ecdf_p_[i + 1] - ecdf_p_[i]);
  }
  if (x <= knots_.front()) return 0.0;
  if (x >= knots_.back()) return 1.0;
  const int i = segment_of(knots_, x);
  const double h = knots_[i + 1] - knots_[i];
  const double slope = (log_density_[i + 1] - log_density_[i]) / h;
  const double dx = x - knots_[i];
  const double partial = std::exp(log_density_[i]) * dx * exprel(slope * dx);
  return std::clamp(cum_mass_[i] + partial, 0.0, 1.0);
}

LogsplineCdf fit(const Eigen::Ref<const Eigen::VectorXd>& values, int min_knots,
                 int max_knots) {
  if (values.size() < 50)
    throw EmptyInput("log-spline fit needs at least 50 observations");
  if (min_knots < 3 || max_knots < min_knots)
    throw DomainError("invalid knot range");

  std::vector<double> sorted(values.data(), values.data() + values.size());
  std::sort(sorted.begin(), sorted.end());
  const double range = sorted.back() - sorted.front();

  LogsplineCdf best;
  bool have_fit = false;
  double best_aic = std::numeric_limits<double>::infinity();

  const auto quantile_sorted = [&](double p) {
    const double h = p * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
  };

  for (int m = min_knots; m <= max_knots; ++m) {
    std::vector<double> knots;
    knots.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      const double p = static_cast<double>(i) / static_cast<double>(m - 1);
      const double t = quantile_sorted(p);
      if (knots.empty() || t - knots.back() > 1e-12 * range) knots.push_back(t);
    }
    if (knots.size() < 3) continue;

    try {
      const FitOutcome fit_res = fit_knots(knots, sorted);
      const double aic =
          -2.0 * fit_res.loglik + 2.0 * static_cast<double>(knots.size() - 1);
      if (aic < best_aic) {
        best_aic = aic;
        // Normalize with the closed-form segment masses so the CDF tops
        // out at exactly 1.
        const int mm = static_cast<int>(knots.size());
        std::vector<double> mass(static_cast<std::size_t>(mm - 1));
        double z = 0.0;
        for (int i = 0; i + 1 < mm; ++i) {
          const double h = knots[i + 1] - knots[i];
          const double s = (fit_res.a[i + 1] - fit_res.a[i]) / h;
          mass[static_cast<std::size_t>(i)] =
              std::exp(fit_res.a[i]) * h * exprel(s * h);
          z += mass[static_cast<std::size_t>(i)];
        }
        best = LogsplineCdf();
        best.knots_ = knots;
        best.log_density_.resize(knots.size());
        for (int i = 0; i < mm; ++i)
          best.log_density_[static_cast<std::size_t>(i)] =
              fit_res.a[i] - std::log(z);
        best.cum_mass_.assign(knots.size(), 0.0);
        double acc = 0.0;
        for (int i = 0; i + 1 < mm; ++i) {
          acc += mass[static_cast<std::size_t>(i)] / z;
          best.cum_mass_[static_cast<std::size_t>(i + 1)] = acc;
        }
        best.cum_mass_.back() = 1.0;
        best.loglik_ = fit_res.loglik;
        best.aic_ = aic;
        have_fit = true;
      }
    } catch (const FitDiverged&) {
      continue;  // try the next knot count
    }
  }

  if (have_fit) return best;

  // Every knot count failed: interpolated empirical CDF, flagged.
  LogsplineCdf fb;
  fb.fallback_ = true;
  const auto n = static_cast<double>(sorted.size());
  double cum = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    const double count = static_cast<double>(j - i + 1);
    fb.ecdf_x_.push_back(sorted[i]);
    fb.ecdf_p_.push_back((cum + 0.5 * count) / n);
    cum += count;
    i = j + 1;
  }
  fb.loglik_ = std::numeric_limits<double>::quiet_NaN();
  fb.aic_ = std::numeric_limits<double>::quiet_NaN();
  return fb;
}

}  // namespace vulnmap::logspline
