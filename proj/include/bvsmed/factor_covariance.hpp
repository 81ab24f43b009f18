#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "bvsmed/error.hpp"

namespace bvsmed {

using Eigen::Index;

/// Sigma = sigma_sq_Sigma * (lambda lambda^T + I). Inverse and determinant come
/// from the rank-one Woodbury identity, so nothing here is worse than O(q).
class FactorCovariance {
 public:
  FactorCovariance(Eigen::VectorXd lambda, double sigma_sq_Sigma)
      : lambda_(std::move(lambda)), scale_(sigma_sq_Sigma) {
    if (!(scale_ > 0.0)) throw NumericalError("sigma_sq_Sigma must be positive");
    lambda_norm_sq_ = lambda_.squaredNorm();
    log_det_ = static_cast<double>(lambda_.size()) * std::log(scale_) + std::log1p(lambda_norm_sq_);
  }

  [[nodiscard]] const Eigen::VectorXd& lambda() const { return lambda_; }
  [[nodiscard]] double scale() const { return scale_; }
  [[nodiscard]] double lambda_norm_sq() const { return lambda_norm_sq_; }
  [[nodiscard]] double log_det() const { return log_det_; }
  [[nodiscard]] Index dim() const { return lambda_.size(); }

  /// Sigma_(j,j).
  [[nodiscard]] double variance(Index j) const { return scale_ * (lambda_(j) * lambda_(j) + 1.0); }

  /// |lambda_j| / sqrt(1 + lambda_j^2); |c_rj| = weight(r) * weight(j).
  [[nodiscard]] double correlation_weight(Index j) const {
    return std::abs(lambda_(j)) / std::sqrt(1.0 + lambda_(j) * lambda_(j));
  }

  /// Sigma^{-1} x = (x - lambda (lambda^T x) / (1 + |lambda|^2)) / sigma_sq_Sigma.
  [[nodiscard]] Eigen::VectorXd apply_inverse(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return (x - lambda_ * (lambda_.dot(x) / (1.0 + lambda_norm_sq_))) / scale_;
  }

  /// x^T Sigma^{-1} x.
  [[nodiscard]] double inverse_quadratic(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    const double proj = lambda_.dot(x);
    return (x.squaredNorm() - proj * proj / (1.0 + lambda_norm_sq_)) / scale_;
  }

  [[nodiscard]] Eigen::MatrixXd dense() const {
    Eigen::MatrixXd s = lambda_ * lambda_.transpose();
    s.diagonal().array() += 1.0;
    return scale_ * s;
  }

  [[nodiscard]] Eigen::MatrixXd dense_inverse() const {
    Eigen::MatrixXd s = -lambda_ * lambda_.transpose() / (1.0 + lambda_norm_sq_);
    s.diagonal().array() += 1.0;
    return s / scale_;
  }

 private:
  Eigen::VectorXd lambda_;
  double scale_;
  double lambda_norm_sq_ = 0.0;
  double log_det_ = 0.0;
};

}  // namespace bvsmed
