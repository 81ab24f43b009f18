#include "bvsmed/priors.hpp"

#include <limits>
#include <numbers>
#include <stdexcept>

namespace bvsmed {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double normal_log_density(double x, double mean, double variance) {
  const double d = x - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * variance) + d * d / variance);
}

double fa_correlation(const FactorCovariance& cov, Index r, Index j) {
  if (r == j) throw std::invalid_argument("fa_correlation requires r != j");
  const Eigen::VectorXd& lam = cov.lambda();
  return lam(r) * lam(j) / std::sqrt((lam(r) * lam(r) + 1.0) * (lam(j) * lam(j) + 1.0));
}

double mrf_inclusion_prob(const Indicator& gamma, const FactorCovariance& cov, Index j,
                          const Hyperparameters& hp) {
  double coupling = 0.0;
  if (hp.eta != 0.0) {
    for (Index r = 0; r < gamma.size(); ++r) {
      if (r != j && gamma(r)) coupling += std::abs(fa_correlation(cov, r, j));
    }
  }
  return logistic(hp.theta_gamma + hp.eta * coupling);
}

double mrf_log_potential(const Indicator& gamma, const FactorCovariance& cov, const Hyperparameters& hp) {
  double pairs = 0.0;
  const Index q = gamma.size();
  for (Index j = 0; j < q; ++j) {
    if (!gamma(j)) continue;
    for (Index r = 0; r < q; ++r) {
      if (r != j && gamma(r)) pairs += std::abs(fa_correlation(cov, r, j));
    }
  }
  return hp.theta_gamma * static_cast<double>(gamma.count()) + 0.5 * hp.eta * pairs;
}

double ssb_log_prior(bool omega_j, bool gamma_j_value, const Hyperparameters& hp) {
  if (!gamma_j_value) return omega_j ? kNegInf : 0.0;
  return omega_j ? std::log(hp.theta_omega) : std::log1p(-hp.theta_omega);
}

double tau_slab_variance(const FactorCovariance& cov, const Hyperparameters& hp, Index j) {
  return hp.v_sq(j) * cov.variance(j);
}

double spike_slab_log_prior_tau(double tau_j, bool gamma_j, const FactorCovariance& cov,
                                const Hyperparameters& hp, Index j) {
  if (!gamma_j) return tau_j == 0.0 ? 0.0 : kNegInf;
  return normal_log_density(tau_j, 0.0, tau_slab_variance(cov, hp, j));
}

double spike_slab_log_prior_delta(double delta_j, bool omega_j, double sigma_sq, const Hyperparameters& hp,
                                  Index j) {
  if (!omega_j) return delta_j == 0.0 ? 0.0 : kNegInf;
  return normal_log_density(delta_j, 0.0, hp.psi_sq(j) * sigma_sq);
}

}  // namespace bvsmed
