#include "vulnmap/spca.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <vector>

#include "vulnmap/errors.hpp"
#include "vulnmap/stats.hpp"

namespace vulnmap::spca {

namespace {

Eigen::VectorXd gaussianize(const Eigen::Ref<const Eigen::VectorXd>& col) {
  Eigen::VectorXd u = stats::rankit(col);
  for (Eigen::Index i = 0; i < u.size(); ++i)
    u[i] = stats::inv_normal_cdf(u[i]);
  return u;
}

bool has_two_distinct(const Eigen::Ref<const Eigen::VectorXd>& col) {
  for (Eigen::Index i = 1; i < col.size(); ++i)
    if (col[i] != col[0]) return true;
  return false;
}

}  // namespace

SPCAResult spca(const Eigen::Ref<const Eigen::VectorXd>& socio,
                const Eigen::Ref<const Eigen::VectorXd>& travel) {
  if (socio.size() != travel.size())
    throw LengthMismatch("spca columns differ in length");
  const Eigen::Index n = socio.size();
  if (n < 3) throw EmptyInput("spca needs at least 3 observations");
  if (!has_two_distinct(socio) || !has_two_distinct(travel))
    throw ConstantColumn("spca column has fewer than 2 distinct values");

  SPCAResult res;
  res.z.resize(n, 2);
  res.z.col(0) = gaussianize(socio);
  res.z.col(1) = gaussianize(travel);

  // Accumulate moments in sorted-row order so that permuting the input
  // rows cannot change the covariance in the low bits.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (res.z(a, 0) != res.z(b, 0)) return res.z(a, 0) < res.z(b, 0);
    return res.z(a, 1) < res.z(b, 1);
  });
  double m0 = 0, m1 = 0;
  for (Eigen::Index i : order) {
    m0 += res.z(i, 0);
    m1 += res.z(i, 1);
  }
  m0 /= static_cast<double>(n);
  m1 /= static_cast<double>(n);
  double c00 = 0, c01 = 0, c11 = 0;
  for (Eigen::Index i : order) {
    const double d0 = res.z(i, 0) - m0;
    const double d1 = res.z(i, 1) - m1;
    c00 += d0 * d0;
    c01 += d0 * d1;
    c11 += d1 * d1;
  }
  Eigen::Matrix2d cov;
  cov << c00, c01, c01, c11;
  cov /= static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
  // Eigen reports eigenvalues ascending; store descending.
  res.eigenvalues << eig.eigenvalues()[1], eig.eigenvalues()[0];
  res.loadings.col(0) = eig.eigenvectors().col(1);
  res.loadings.col(1) = eig.eigenvectors().col(0);

  // Orientation: vulnerability direction has positive travel-time loading.
  if (res.loadings(1, 0) < 0.0 ||
      (res.loadings(1, 0) == 0.0 && res.loadings(0, 0) > 0.0))
    res.loadings.col(0) = -res.loadings.col(0);
  if (res.loadings(0, 1) < 0.0) res.loadings.col(1) = -res.loadings.col(1);

  res.scores = res.z * res.loadings;
  const double total = res.eigenvalues.sum();
  res.variance_share_1 = total > 0.0 ? res.eigenvalues[0] / total : 1.0;
  return res;
}

}  // namespace vulnmap::spca
