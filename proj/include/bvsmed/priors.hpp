#pragma once

#include "bvsmed/factor_covariance.hpp"
#include "bvsmed/model.hpp"

namespace bvsmed {

/// Correlation between mediators r and j implied by the factor covariance.
/// Independent of sigma_sq_Sigma. Throws std::invalid_argument when r == j.
double fa_correlation(const FactorCovariance& cov, Index r, Index j);

/// MRF conditional inclusion probability
/// logistic(theta_gamma + eta * sum_{r != j} |c_rj| gamma_r).
double mrf_inclusion_prob(const Indicator& gamma, const FactorCovariance& cov, Index j,
                          const Hyperparameters& hp);

/// Unnormalized log mass of the MRF: theta_gamma * sum_j gamma_j
/// + (eta / 2) * sum_{r != j} |c_rj| gamma_r gamma_j. Its conditionals are
/// mrf_inclusion_prob.
double mrf_log_potential(const Indicator& gamma, const FactorCovariance& cov, const Hyperparameters& hp);

/// SSB prior on omega_j given the current value of gamma_j (point mass at 0 when
/// gamma_j is off). Returns -inf outside the support.
double ssb_log_prior(bool omega_j, bool gamma_j_value, const Hyperparameters& hp);

/// Slab N(0, v_j^2 Sigma_jj) when gamma_j, spike at 0 otherwise.
double spike_slab_log_prior_tau(double tau_j, bool gamma_j, const FactorCovariance& cov,
                                const Hyperparameters& hp, Index j);

/// Slab N(0, psi_j^2 sigma^2) when omega_j, spike at 0 otherwise.
double spike_slab_log_prior_delta(double delta_j, bool omega_j, double sigma_sq, const Hyperparameters& hp,
                                  Index j);

/// Variance of the tau_j slab, v_j^2 * sigma_sq_Sigma * (lambda_j^2 + 1).
double tau_slab_variance(const FactorCovariance& cov, const Hyperparameters& hp, Index j);

double normal_log_density(double x, double mean, double variance);

}  // namespace bvsmed
