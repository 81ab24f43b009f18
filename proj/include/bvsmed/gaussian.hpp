#pragma once

#include <Eigen/Dense>

#include "bvsmed/rng.hpp"

namespace bvsmed {

/// Gaussian full conditionals written in canonical form N(P^{-1} b, P^{-1}).
///
/// The mediator-model blocks (beta0, rows of B, active tau) all have precision
/// P = diag(d) - c * w w^T with c >= 0, which is handled in O(dim) without
/// forming P. Requires d > 0 and c * sum(w^2 / d) < 1 (positive definiteness).
namespace gaussian {

Eigen::VectorXd solve_diag_minus_rank_one(const Eigen::VectorXd& d, double c, const Eigen::VectorXd& w,
                                          const Eigen::VectorXd& b);

/// Maps eps ~ N(0, I) to a draw with covariance P^{-1}.
Eigen::VectorXd inverse_sqrt_apply(const Eigen::VectorXd& d, double c, const Eigen::VectorXd& w,
                                   const Eigen::VectorXd& eps);

Eigen::VectorXd draw_diag_minus_rank_one(const Eigen::VectorXd& d, double c, const Eigen::VectorXd& w,
                                         const Eigen::VectorXd& b, Rng& rng);

/// Dense route through a Cholesky factor of the precision. Throws
/// NumericalError when the precision is not numerically positive definite.
Eigen::VectorXd draw_from_precision(const Eigen::MatrixXd& precision, const Eigen::VectorXd& b, Rng& rng);

}  // namespace gaussian
}  // namespace bvsmed
