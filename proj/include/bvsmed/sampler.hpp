#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bvsmed/dataset.hpp"
#include "bvsmed/model.hpp"
#include "bvsmed/rng.hpp"

namespace bvsmed {

enum class IndicatorInit { AllOff, AllOn, Random };

struct IndicatorPolicy {
  IndicatorInit kind = IndicatorInit::AllOff;
  double prob = 0.5;  // used by Random
};

/// Starting values. Vector fields hold either one value (broadcast) or q values.
struct InitSpec {
  Eigen::VectorXd tau_init = Eigen::VectorXd::Zero(1);
  Eigen::VectorXd delta_init = Eigen::VectorXd::Zero(1);
  Eigen::VectorXd lambda_init = Eigen::VectorXd::Zero(1);
  IndicatorPolicy gamma_init;
  IndicatorPolicy omega_init;
  double sigma_sq_Sigma_init = 1.0;
  double sigma_sq_init = 1.0;
};

/// Per-coordinate random-walk scale adaptation for lambda, active during burn-in only.
struct AdaptSpec {
  double initial_proposal_var_lambda = 0.01;
  double target_accept = 0.44;
  long adapt_window = 50;
};

struct ChainConfig {
  long n_iter = 1000;
  long burn_in = 500;
  long thin = 1;
  std::uint64_t seed = 1;
  ModelVariant model_variant = ModelVariant::MvnMrfSsb;
  InitSpec init;
  AdaptSpec adapt;
  /// Gamma updates ignore the outcome model entirely (including the SSB prior
  /// factor). Turning this off gives the plain Gibbs kernel of the joint model.
  bool cut_feedback = true;
  bool random_scan = false;
  /// Joint re-draw of the active tau / delta sub-vectors after the SSVS scans.
  bool refine = true;
  /// Include the MRF potential of the current gamma in the lambda target.
  bool lambda_mrf_potential = true;

  void validate() const;
};

struct BlockRates {
  double lambda_accept = 0.0;
  double gamma_flip = 0.0;
  double omega_flip = 0.0;
};

/// Thinned post-burn-in states of one chain plus telemetry.
struct ChainDraws {
  std::vector<ParameterState> states;
  std::vector<long> iterations;
  BlockRates accept_rates;  // post-burn-in
  Eigen::VectorXd lambda_proposal_sd;
  double eta_used = 0.0;
  double wall_seconds = 0.0;
  std::uint64_t seed = 0;
  ModelVariant model_variant = ModelVariant::MvnMrfSsb;
};

ParameterState initial_state(const InitSpec& init, Index q, Index p, ModelVariant variant, Rng& rng);

/// Closed-form pieces of a marginalized indicator update.
struct IndicatorConditional {
  double log_odds = 0.0;   // posterior log-odds of inclusion
  double post_mean = 0.0;  // slab full-conditional mean of the coefficient
  double post_prec = 0.0;  // slab full-conditional precision
};

/// One MCMC chain: parameter state, residual caches and two RNG streams. The
/// mediator-module blocks draw from one stream and the outcome-module blocks
/// from the other, so the (gamma, tau) path never depends on Y.
class Sampler {
 public:
  Sampler(const MediationDataset& data, Hyperparameters hp, ChainConfig cfg);

  void set_state(const ParameterState& state);
  [[nodiscard]] const ParameterState& state() const { return state_; }

  /// Switches to new data of the same shape, keeping state and RNG streams.
  void rebind_data(const MediationDataset& data);

  /// One full sweep; lambda scales adapt while iteration <= burn_in.
  void sweep(long iteration);

  void update_fixed_effects();
  void update_gamma_tau();
  void refine_tau();
  void update_lambda(bool adapt_now);
  void update_sigma_sq_Sigma();
  void update_omega_delta();
  void refine_delta();
  void update_sigma_sq();

  /// Conditional for (gamma_j, tau_j) at the current state, tau_j integrated
  /// out of the mediator likelihood. Ignores the outcome model when cutting.
  [[nodiscard]] IndicatorConditional gamma_conditional(Index j) const;
  [[nodiscard]] IndicatorConditional omega_conditional(Index j) const;

  /// Recomputes every residual cache from the state.
  void sync_caches();

  [[nodiscard]] const Eigen::VectorXd& lambda_proposal_sd() const { return proposal_sd_; }
  [[nodiscard]] BlockRates rates() const;
  void reset_counters();

 private:
  void adapt_proposals();
  std::vector<Index> scan_order(Rng& rng) const;
  void precompute();

  const MediationDataset* data_;
  Hyperparameters hp_;
  ChainConfig cfg_;
  ParameterState state_;
  Rng mediator_rng_;
  Rng outcome_rng_;

  // Data summaries.
  double sum_a2_ = 0.0;
  Eigen::VectorXd m_norm2_;
  Eigen::MatrixXd mtm_;
  Eigen::MatrixXd design_;  // [1, X, A]
  Eigen::MatrixXd design_gram_;
  Eigen::VectorXd x_norm2_;

  // Residual caches.
  Eigen::MatrixXd resid_m_;  // mediator residuals, n x q
  Eigen::VectorXd proj_;     // resid_m_ * lambda
  double a_dot_proj_ = 0.0;
  double lambda_norm_sq_ = 0.0;
  Eigen::VectorXd weight_;   // |lambda_j| / sqrt(1 + lambda_j^2)
  double active_weight_ = 0.0;
  Eigen::VectorXd resid_y_;  // outcome residuals

  // Lambda proposal adaptation and telemetry.
  Eigen::VectorXd proposal_sd_;
  Eigen::VectorXd window_accepts_;
  long window_sweeps_ = 0;
  long adapt_batches_ = 0;
  long lambda_proposals_ = 0;
  long lambda_accepts_ = 0;
  long gamma_updates_ = 0;
  long gamma_flips_ = 0;
  long omega_updates_ = 0;
  long omega_flips_ = 0;
};

/// Runs n_iter sweeps and keeps iterations t > burn_in with (t - burn_in) % thin == 0.
ChainDraws run_chain(const ChainConfig& config, const MediationDataset& data, const Hyperparameters& hp);

struct ChainOutcome {
  std::optional<ChainDraws> draws;
  std::string error;
};

/// Independent chains, in input order. A failing chain reports its error
/// without stopping the others. Seeds must be distinct.
std::vector<ChainOutcome> run_chains(const std::vector<ChainConfig>& configs, const MediationDataset& data,
                                     const Hyperparameters& hp, unsigned workers = 0);

}  // namespace bvsmed
