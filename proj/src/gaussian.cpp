#include "bvsmed/gaussian.hpp"

#include <cmath>

#include "bvsmed/error.hpp"

namespace bvsmed::gaussian {

namespace {

void check_inputs(const Eigen::VectorXd& d, double c, const Eigen::VectorXd& w) {
  if (d.size() != w.size()) throw NumericalError("precision factors have mismatched sizes");
  if (!(d.array() > 0.0).all() || !d.allFinite()) throw NumericalError("non-positive diagonal precision");
  if (!(c >= 0.0) || !std::isfinite(c)) throw NumericalError("invalid rank-one precision weight");
}

}  // namespace

Eigen::VectorXd solve_diag_minus_rank_one(const Eigen::VectorXd& d, double c, const Eigen::VectorXd& w,
                                          const Eigen::VectorXd& b) {
  check_inputs(d, c, w);
  const Eigen::VectorXd dinv_b = b.cwiseQuotient(d);
  const Eigen::VectorXd dinv_w = w.cwiseQuotient(d);
  const double rho = c * w.dot(dinv_w);
  if (!(rho < 1.0)) throw NumericalError("precision is not positive definite");
  return dinv_b + dinv_w * (c * w.dot(dinv_b) / (1.0 - rho));
}

Eigen::VectorXd inverse_sqrt_apply(const Eigen::VectorXd& d, double c, const Eigen::VectorXd& w,
                                   const Eigen::VectorXd& eps) {
  check_inputs(d, c, w);
  // P = D^{1/2} (I - c z z^T) D^{1/2} with z = D^{-1/2} w, and
  // I - c z z^T = (I - k z z^T)^2 for k = (1 - sqrt(1 - c|z|^2)) / |z|^2.
  const Eigen::VectorXd sqrt_d = d.cwiseSqrt();
  const Eigen::VectorXd z = w.cwiseQuotient(sqrt_d);
  const double zz = z.squaredNorm();
  Eigen::VectorXd x = eps;
  if (c > 0.0 && zz > 0.0) {
    const double rho = c * zz;
    if (!(rho < 1.0)) throw NumericalError("precision is not positive definite");
    const double root = std::sqrt(1.0 - rho);
    const double k = (1.0 - root) / zz;
    // (I - k z z^T)^{-1} = I + k / (1 - k |z|^2) z z^T, and 1 - k |z|^2 = root.
    x += z * (k / root * z.dot(eps));
  }
  return x.cwiseQuotient(sqrt_d);
}

Eigen::VectorXd draw_diag_minus_rank_one(const Eigen::VectorXd& d, double c, const Eigen::VectorXd& w,
                                         const Eigen::VectorXd& b, Rng& rng) {
  Eigen::VectorXd eps(d.size());
  for (Eigen::Index i = 0; i < eps.size(); ++i) eps(i) = rng.normal();
  return solve_diag_minus_rank_one(d, c, w, b) + inverse_sqrt_apply(d, c, w, eps);
}

Eigen::VectorXd draw_from_precision(const Eigen::MatrixXd& precision, const Eigen::VectorXd& b, Rng& rng) {
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) throw NumericalError("singular conditional precision");
  Eigen::VectorXd mean = llt.solve(b);
  Eigen::VectorXd eps(b.size());
  for (Eigen::Index i = 0; i < eps.size(); ++i) eps(i) = rng.normal();
  // x = mean + L^{-T} eps has covariance (L L^T)^{-1}.
  mean += llt.matrixU().solve(eps);
  if (!mean.allFinite()) throw NumericalError("non-finite Gaussian draw");
  return mean;
}

}  // namespace bvsmed::gaussian
