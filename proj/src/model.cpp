#include "bvsmed/model.hpp"

#include "bvsmed/error.hpp"

namespace bvsmed {

std::string to_string(ModelVariant v) {
  switch (v) {
    case ModelVariant::NormalIbSsb: return "Normal-IB-SSB";
    case ModelVariant::MvnIbSsb: return "MVN-IB-SSB";
    case ModelVariant::MvnMrfSsb: return "MVN-MRF-SSB";
  }
  return "?";
}

ModelVariant parse_model_variant(std::string_view name) {
  if (name == "Normal-IB-SSB") return ModelVariant::NormalIbSsb;
  if (name == "MVN-IB-SSB") return ModelVariant::MvnIbSsb;
  if (name == "MVN-MRF-SSB") return ModelVariant::MvnMrfSsb;
  throw ConfigError("unknown model variant '" + std::string(name) +
                    "' (expected Normal-IB-SSB, MVN-IB-SSB or MVN-MRF-SSB)");
}

Hyperparameters Hyperparameters::defaults(Index q) {
  Hyperparameters hp;
  hp.theta_gamma = logit(0.1);
  hp.theta_omega = 0.1;
  hp.v_sq = Eigen::VectorXd::Constant(q, 9.0);
  hp.psi_sq = Eigen::VectorXd::Constant(q, 9.0);
  return hp;
}

void Hyperparameters::validate(Index q) const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive");
  };
  if (!std::isfinite(theta_gamma)) throw ConfigError("theta_gamma must be finite");
  if (!(theta_omega > 0.0 && theta_omega < 1.0)) throw ConfigError("theta_omega must lie in (0, 1)");
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw ConfigError("eta must be >= 0");
  if (v_sq.size() != q || psi_sq.size() != q) throw ConfigError("v_sq and psi_sq must have length q");
  if ((v_sq.array() <= 0.0).any() || (psi_sq.array() <= 0.0).any()) {
    throw ConfigError("slab variances must be positive");
  }
  positive(h0, "h0");
  positive(c0, "c0");
  positive(s0, "s0");
  positive(t0, "t0");
  positive(k0, "k0");
  positive(nu0, "nu0");
  positive(nu1, "nu1");
  positive(sigma0_sq, "sigma0_sq");
  positive(sigma1_sq, "sigma1_sq");
  positive(h_lambda, "h_lambda");
  if (!std::isfinite(mu_lambda)) throw ConfigError("mu_lambda must be finite");
}

ParameterState ParameterState::zeros(Index q, Index p) {
  ParameterState s;
  s.beta0 = Eigen::VectorXd::Zero(q);
  s.B = Eigen::MatrixXd::Zero(p, q);
  s.tau = Eigen::VectorXd::Zero(q);
  s.gamma = Indicator::Constant(q, false);
  s.lambda = Eigen::VectorXd::Zero(q);
  s.alpha = Eigen::VectorXd::Zero(p);
  s.delta = Eigen::VectorXd::Zero(q);
  s.omega = Indicator::Constant(q, false);
  return s;
}

void check_invariants(const ParameterState& s) {
  const Index q = s.tau.size();
  const Index p = s.alpha.size();
  if (s.beta0.size() != q || s.gamma.size() != q || s.lambda.size() != q || s.delta.size() != q ||
      s.omega.size() != q || s.B.rows() != p || s.B.cols() != q) {
    throw NumericalError("parameter state has inconsistent shapes");
  }
  if (!(s.sigma_sq_Sigma > 0.0)) throw NumericalError("sigma_sq_Sigma must be positive");
  if (!(s.sigma_sq > 0.0)) throw NumericalError("sigma_sq must be positive");
  for (Index j = 0; j < q; ++j) {
    if (!s.gamma(j) && s.tau(j) != 0.0) {
      throw NumericalError("gamma_" + std::to_string(j + 1) + " = 0 but tau is nonzero");
    }
    if (s.omega(j) && !s.gamma(j)) {
      throw NumericalError("omega_" + std::to_string(j + 1) + " = 1 but gamma = 0");
    }
    if (!s.omega(j) && s.delta(j) != 0.0) {
      throw NumericalError("omega_" + std::to_string(j + 1) + " = 0 but delta is nonzero");
    }
  }
}

bool satisfies_invariants(const ParameterState& s) {
  try {
    check_invariants(s);
    return true;
  } catch (const NumericalError&) {
    return false;
  }
}

}  // namespace bvsmed
