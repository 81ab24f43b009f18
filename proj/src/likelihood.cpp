#include "bvsmed/likelihood.hpp"

#include <numbers>

#include "bvsmed/error.hpp"
#include "bvsmed/factor_covariance.hpp"

namespace bvsmed {

Eigen::MatrixXd mediator_residuals(const MediationDataset& data, const ParameterState& state) {
  Eigen::MatrixXd r = data.M;
  r.rowwise() -= state.beta0.transpose();
  r.noalias() -= data.A * state.tau.transpose();
  if (data.p() > 0) r.noalias() -= data.X * state.B;
  return r;
}

Eigen::VectorXd outcome_residuals(const MediationDataset& data, const ParameterState& state) {
  Eigen::VectorXd e = data.Y.array() - state.alpha0;
  e.noalias() -= data.M * state.delta;
  if (data.p() > 0) e.noalias() -= data.X * state.alpha;
  e -= state.alpha_p1 * data.A;
  return e;
}

double mediator_loglik(const MediationDataset& data, const ParameterState& state) {
  if (!(state.sigma_sq_Sigma > 0.0)) throw NumericalError("sigma_sq_Sigma must be positive");
  const FactorCovariance cov(state.lambda, state.sigma_sq_Sigma);
  const Eigen::MatrixXd r = mediator_residuals(data, state);
  const Eigen::VectorXd proj = r * state.lambda;
  const double quad = (r.squaredNorm() - proj.squaredNorm() / (1.0 + cov.lambda_norm_sq())) / cov.scale();
  const double n = static_cast<double>(data.n());
  const double q = static_cast<double>(data.q());
  return -0.5 * (n * q * std::log(2.0 * std::numbers::pi) + n * cov.log_det() + quad);
}

double outcome_loglik(const MediationDataset& data, const ParameterState& state) {
  if (!(state.sigma_sq > 0.0)) throw NumericalError("sigma_sq must be positive");
  const Eigen::VectorXd e = outcome_residuals(data, state);
  const double n = static_cast<double>(data.n());
  return -0.5 * (n * std::log(2.0 * std::numbers::pi * state.sigma_sq) + e.squaredNorm() / state.sigma_sq);
}

}  // namespace bvsmed
