#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bvsmed/sampler.hpp"

namespace bvsmed {

struct PhaseScanConfig {
  std::vector<double> eta_grid;  // starts at 0, strictly increasing
  long m_pt = 2000;              // kept draws per grid point
  double jump_threshold = 0.05;
  ChainConfig chain_template;    // burn_in, thin, seed and init are taken from here

  void validate() const;
};

struct PhaseScanResult {
  std::vector<double> eta_grid;
  std::vector<double> medians;
  std::optional<double> eta_pt;
  double eta_selected = 0.0;
  std::optional<std::size_t> transition_index;
  bool warning = false;
  std::string message;
};

/// Pure selection rule: the first grid index g with medians[g] - medians[0] >
/// jump_threshold marks the transition and the previous grid value is chosen.
/// Without a transition the last grid value is chosen and a warning is set.
PhaseScanResult select_eta(const std::vector<double>& eta_grid, const std::vector<double>& medians,
                           double jump_threshold);

/// Median across mediators of the per-mediator posterior mean of gamma.
/// Even q averages the two middle order statistics.
double median_gamma(const ChainDraws& draws);

/// Seed used for grid point g; grid points run independent chains.
std::uint64_t phase_scan_seed(std::uint64_t base, std::size_t g);

/// Runs one chain per grid value (MVN-MRF-SSB) and applies select_eta.
/// Throws NumericalError naming the grid index on sampler failure.
PhaseScanResult phase_transition_scan(const PhaseScanConfig& cfg, const MediationDataset& data,
                                      const Hyperparameters& hp, unsigned workers = 0);

struct FdrSelection {
  double kappa = 1.0;
  std::vector<Index> selected;  // ascending indices with ppi > kappa
  double fdr = 0.0;             // estimated FDR of the selection (0 when empty)
  bool warning = false;
};

/// Estimated Bayesian FDR of the rule ppi > kappa; NaN when nothing is selected.
double bayesian_fdr(const Eigen::VectorXd& ppi, double kappa);

/// Candidate thresholds are the distinct PPI values plus one value just below
/// the smallest positive PPI, so ties and the full set can be selected. Returns
/// the smallest candidate whose FDR is below target.
FdrSelection bayesian_fdr_threshold(const Eigen::VectorXd& ppi, double target);

}  // namespace bvsmed
