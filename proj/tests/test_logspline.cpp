#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "fixtures.hpp"
#include "vulnmap/errors.hpp"
#include "vulnmap/logspline.hpp"
#include "vulnmap/stats.hpp"

using namespace vulnmap;
using Eigen::VectorXd;

TEST_SUITE_BEGIN("logspline");

namespace {

double kolmogorov_distance(const logspline::LogsplineCdf& cdf,
                           double lo, double hi,
                           const std::function<double(double)>& truth) {
  double d = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double x = lo + (hi - lo) * i / 2000.0;
    d = std::max(d, std::abs(cdf(x) - truth(x)));
  }
  return d;
}

}  // namespace

TEST_CASE("recovers the normal CDF within Kolmogorov distance 0.02") {
  Rng rng(61);
  VectorXd draws(10000);
  for (int i = 0; i < draws.size(); ++i) draws[i] = rng.normal();
  const auto cdf = logspline::fit(draws);
  CHECK_FALSE(cdf.fallback());
  CHECK(cdf.knot_count() >= 3);
  CHECK(cdf.knot_count() <= 10);

  const double d =
      kolmogorov_distance(cdf, draws.minCoeff(), draws.maxCoeff(), stats::normal_cdf);
  MESSAGE("kolmogorov distance to normal: ", d);
  CHECK(d < 0.02);
}

TEST_CASE("recovers the uniform CDF within Kolmogorov distance 0.02") {
  Rng rng(62);
  VectorXd draws(10000);
  for (int i = 0; i < draws.size(); ++i) draws[i] = rng.uniform();
  const auto cdf = logspline::fit(draws);
  CHECK_FALSE(cdf.fallback());
  const double d = kolmogorov_distance(
      cdf, 0.0, 1.0, [](double x) { return std::clamp(x, 0.0, 1.0); });
  MESSAGE("kolmogorov distance to identity: ", d);
  CHECK(d < 0.02);
}

TEST_CASE("the CDF is nondecreasing at sorted inputs and bounded") {
  Rng rng(63);
  VectorXd draws(500);
  for (int i = 0; i < draws.size(); ++i) draws[i] = rng.normal() * 3.0 + 1.0;
  const auto cdf = logspline::fit(draws);

  std::vector<double> sorted(draws.data(), draws.data() + draws.size());
  std::sort(sorted.begin(), sorted.end());
  double prev = -1.0;
  for (double x : sorted) {
    const double v = cdf(x);
    REQUIRE(v >= prev);
    REQUIRE(v >= 0.0);
    REQUIRE(v <= 1.0);
    prev = v;
  }
  // strictly increasing away from the extremes
  CHECK(cdf(0.0) < cdf(0.5));
  CHECK(cdf(0.5) < cdf(1.0));
}

TEST_CASE("unlike rankit, the CDF preserves relative distances") {
  // two tight modes with a wide empty valley
  Rng rng(64);
  VectorXd draws(2000);
  for (int i = 0; i < draws.size(); ++i) {
    const double core = rng.normal() * 0.05;
    draws[i] = (i % 2 == 0) ? core : core + 10.0;
  }
  const auto cdf = logspline::fit(draws);

  std::vector<double> sorted(draws.data(), draws.data() + draws.size());
  std::sort(sorted.begin(), sorted.end());

  // a consecutive pair inside the first mode vs the pair straddling the
  // valley: equal rank gaps, very different score gaps
  const std::size_t n = sorted.size();
  std::size_t straddle = 0;
  double widest = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (sorted[i + 1] - sorted[i] > widest) {
      widest = sorted[i + 1] - sorted[i];
      straddle = i;
    }
  REQUIRE(widest > 5.0);
  const double gap_valley = cdf(sorted[straddle + 1]) - cdf(sorted[straddle]);
  const double gap_mode = cdf(sorted[n / 4 + 1]) - cdf(sorted[n / 4]);
  MESSAGE("valley vs mode cdf gaps: ", gap_valley, " ", gap_mode);

  // rankit maps both pairs to exactly the same gap (1/n); the fitted CDF
  // respects the score distances and separates them
  const Eigen::Map<const Eigen::VectorXd> all(sorted.data(),
                                              static_cast<Eigen::Index>(n));
  const Eigen::VectorXd ranks = stats::midranks(all);
  CHECK(ranks[static_cast<Eigen::Index>(straddle + 1)] -
            ranks[static_cast<Eigen::Index>(straddle)] ==
        ranks[static_cast<Eigen::Index>(n / 4 + 1)] -
            ranks[static_cast<Eigen::Index>(n / 4)]);
  CHECK(gap_valley > 1.5 * gap_mode);
}

TEST_CASE("degenerate samples fall back to the empirical CDF") {
  VectorXd values = VectorXd::Constant(50, 3.0);
  values[49] = 4.0;
  const auto cdf = logspline::fit(values);
  CHECK(cdf.fallback());
  CHECK(cdf(3.0) == doctest::Approx(24.5 / 50.0));
  CHECK(cdf(2.0) >= 0.0);
  CHECK(cdf(5.0) <= 1.0);
  CHECK(cdf(3.5) > cdf(3.0));
}

TEST_CASE("preconditions") {
  VectorXd tiny = VectorXd::LinSpaced(10, 0, 1);
  CHECK_THROWS_AS(logspline::fit(tiny), EmptyInput);
  VectorXd ok = VectorXd::LinSpaced(100, 0, 1);
  CHECK_THROWS_AS(logspline::fit(ok, 2, 10), DomainError);
}

TEST_SUITE_END();
