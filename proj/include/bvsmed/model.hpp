#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <string_view>

namespace bvsmed {

using Eigen::Index;
using Indicator = Eigen::Array<bool, Eigen::Dynamic, 1>;

inline double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double logit(double p) { return std::log(p) - std::log1p(-p); }

/// The three fitted models: mediator covariance (independent Normal or MVN with
/// factor-analytic covariance) crossed with the gamma prior (IB or MRF).
enum class ModelVariant { NormalIbSsb, MvnIbSsb, MvnMrfSsb };

std::string to_string(ModelVariant v);
ModelVariant parse_model_variant(std::string_view name);

/// Whether lambda is pinned at zero (diagonal mediator covariance).
inline bool pins_lambda(ModelVariant v) { return v == ModelVariant::NormalIbSsb; }
inline bool uses_mrf(ModelVariant v) { return v == ModelVariant::MvnMrfSsb; }

/// Fixed prior constants. theta_gamma is stored on the log-odds scale.
struct Hyperparameters {
  double theta_gamma = 0.0;
  double theta_omega = 0.1;
  double eta = 0.0;
  Eigen::VectorXd v_sq;    // slab scale of tau_j
  Eigen::VectorXd psi_sq;  // slab scale of delta_j
  double h0 = 100.0;       // beta0
  double c0 = 100.0;       // rows of B
  double s0 = 100.0;       // alpha0
  double t0 = 100.0;       // alpha
  double k0 = 100.0;       // alpha_{p+1}
  double nu0 = 6.0;
  double nu1 = 6.0;
  double sigma0_sq = 1.0 / 3.0;
  double sigma1_sq = 1.0 / 3.0;
  double mu_lambda = 0.0;
  double h_lambda = 100.0;

  /// Simulation-study settings: logistic(theta_gamma) = theta_omega = 0.1,
  /// v^2 = psi^2 = 9, all Gaussian prior variances 100, nu = 6, sigma0^2 = 1/3.
  static Hyperparameters defaults(Index q);

  /// Throws ConfigError unless variances are positive, theta_omega is in (0,1),
  /// eta >= 0 and slab vectors have length q.
  void validate(Index q) const;
};

/// One MCMC state of the joint mediator/outcome model.
struct ParameterState {
  Eigen::VectorXd beta0;  // q
  Eigen::MatrixXd B;      // p x q
  Eigen::VectorXd tau;    // q
  Indicator gamma;        // q
  Eigen::VectorXd lambda; // q
  double sigma_sq_Sigma = 1.0;
  double alpha0 = 0.0;
  Eigen::VectorXd alpha;  // p
  double alpha_p1 = 0.0;
  Eigen::VectorXd delta;  // q
  Indicator omega;        // q
  double sigma_sq = 1.0;

  /// All-zero state with unit variances.
  static ParameterState zeros(Index q, Index p);

  [[nodiscard]] Index q() const { return tau.size(); }
  [[nodiscard]] Index p() const { return alpha.size(); }
};

/// Throws NumericalError describing the first violated support constraint:
/// gamma_j = 0 => tau_j = 0, omega_j = 1 => gamma_j = 1, omega_j = 0 => delta_j = 0,
/// positive variances, consistent shapes.
void check_invariants(const ParameterState& s);

bool satisfies_invariants(const ParameterState& s);

}  // namespace bvsmed
