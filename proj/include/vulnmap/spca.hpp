#pragma once

#include <Eigen/Core>

namespace vulnmap::spca {

/// Two-column semiparametric PCA: each column is Gaussianized through
/// inv_normal_cdf(rankit(.)), the 2x2 covariance of Z is eigendecomposed,
/// and scores are the Z coordinates in the eigenbasis.
struct SPCAResult {
  Eigen::MatrixXd z;            // N x 2 Gaussianized columns (socio, travel)
  Eigen::Vector2d eigenvalues;  // descending, nonnegative
  Eigen::Matrix2d loadings;     // orthonormal columns
  Eigen::MatrixXd scores;       // N x 2, scores = z * loadings
  double variance_share_1 = 0;  // lambda1 / (lambda1 + lambda2)
};

/// The leading loading is oriented so vulnerability grows with the score:
/// positive coefficient on the travel-time column, negative on the
/// socioeconomic column.
SPCAResult spca(const Eigen::Ref<const Eigen::VectorXd>& socio,
                const Eigen::Ref<const Eigen::VectorXd>& travel);

}  // namespace vulnmap::spca
