#pragma once

#include "bvsmed/dataset.hpp"
#include "bvsmed/model.hpp"

namespace bvsmed {

/// R = M - 1 beta0^T - A tau^T - X B  (n x q).
Eigen::MatrixXd mediator_residuals(const MediationDataset& data, const ParameterState& state);

/// e = Y - alpha0 - M delta - X alpha - alpha_{p+1} A.
Eigen::VectorXd outcome_residuals(const MediationDataset& data, const ParameterState& state);

/// sum_i log MVN(M_i; beta0 + tau A_i + B^T X_i, Sigma) with the factor-analytic
/// Sigma; O(nq) through the Woodbury inverse and the cached log-determinant.
double mediator_loglik(const MediationDataset& data, const ParameterState& state);

/// sum_i log N(Y_i; alpha0 + delta^T M_i + alpha^T X_i + alpha_{p+1} A_i, sigma^2).
double outcome_loglik(const MediationDataset& data, const ParameterState& state);

}  // namespace bvsmed
