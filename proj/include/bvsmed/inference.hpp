#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bvsmed/sampler.hpp"
#include "bvsmed/tuning.hpp"

namespace bvsmed {

struct EffectContrast {
  double a = 1.0;
  double a_prime = -1.0;

  [[nodiscard]] double multiplier() const { return a - a_prime; }
  void validate() const;
};

struct PpiVectors {
  Eigen::VectorXd joint;  // P(gamma_j = 1, omega_j = 1 | data)
  Eigen::VectorXd gamma;  // P(gamma_j = 1 | data)
};

/// Pooled over every kept draw of every chain.
PpiVectors ppi(const std::vector<ChainDraws>& chains);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Shortest window of ceil(level * N) sorted samples.
Interval hpdi(std::vector<double> samples, double level = 0.95);

struct PosteriorSummary {
  double median = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  Interval hpdi;
  long draws = 0;
};

/// Requires at least one sample; the HPDI of a single sample is that point.
PosteriorSummary summarize_samples(std::vector<double> samples, double level = 0.95);

struct EffectEstimates {
  /// Conditional on gamma_j = omega_j = 1; absent when no draw qualifies.
  std::vector<std::optional<PosteriorSummary>> ie;
  /// tau_j conditional on gamma_j = 1.
  std::vector<std::optional<PosteriorSummary>> tau;
  PosteriorSummary ie_total;
  PosteriorSummary de;
};

EffectEstimates estimate_effects(const std::vector<ChainDraws>& chains, const EffectContrast& contrast);

/// Potential scale reduction of equal-length chains. Throws when fewer than two
/// chains, fewer than two draws, or all chains are constant.
double gelman_rubin(const std::vector<std::vector<double>>& chains);

struct MonitoredScalar {
  std::string name;
  double psr = 0.0;
};

/// PSR of sigma_sq_Sigma, sigma_sq, the five highest-variance lambda_j and the
/// delta_j of the five highest joint PPIs. Series constant across all chains
/// carry no information and are skipped. Chains are truncated to a common length.
std::vector<MonitoredScalar> convergence_report(const std::vector<ChainDraws>& chains,
                                                const Eigen::VectorXd& ppi_joint);

struct OperatingCharacteristics {
  std::optional<double> tpr, fpr, ppv, npv;
  long nvs = 0;
  long tp = 0, fp = 0, fn = 0, tn = 0;
};

OperatingCharacteristics operating_characteristics(const std::vector<Index>& selected, const Indicator& truth);

struct MetricAggregate {
  std::optional<double> mean;
  std::optional<double> sd;  // sample sd, needs two defined values
  long defined = 0;
};

struct OcAggregate {
  MetricAggregate tpr, fpr, ppv, npv, nvs;
};

/// Mean and SD over replicates of every defined value.
OcAggregate aggregate_oc(const std::vector<OperatingCharacteristics>& runs);

struct SelectionSummary {
  PpiVectors ppi;
  double fdr_target = 0.05;
  FdrSelection joint;  // pathway selection on the joint PPI
  FdrSelection gamma;  // exposure-mediator selection on the gamma PPI
  EffectContrast contrast;
  EffectEstimates effects;
};

SelectionSummary summarize_selection(const std::vector<ChainDraws>& chains, const EffectContrast& contrast,
                                     double fdr_target);

}  // namespace bvsmed
