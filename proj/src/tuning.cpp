#include "bvsmed/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "bvsmed/error.hpp"
#include "bvsmed/parallel.hpp"

namespace bvsmed {

namespace {

void check_grid(const std::vector<double>& eta_grid) {
  if (eta_grid.empty() || eta_grid.front() != 0.0) throw ConfigError("eta grid must start at 0");
  for (std::size_t g = 1; g < eta_grid.size(); ++g)
    if (!(eta_grid[g] > eta_grid[g - 1])) throw ConfigError("eta grid must be strictly increasing");
}

}  // namespace

void PhaseScanConfig::validate() const {
  check_grid(eta_grid);
  if (m_pt < 1) throw ConfigError("m_pt must be positive");
  if (std::isnan(jump_threshold)) throw ConfigError("jump threshold must be a number");
  ChainConfig probe = chain_template;
  probe.n_iter = probe.burn_in + m_pt * probe.thin;
  probe.validate();
}

PhaseScanResult select_eta(const std::vector<double>& eta_grid, const std::vector<double>& medians,
                           double jump_threshold) {
  if (eta_grid.empty() || eta_grid.size() != medians.size())
    throw ConfigError("eta grid and medians must be non-empty and of equal length");
  check_grid(eta_grid);
  PhaseScanResult out;
  out.eta_grid = eta_grid;
  out.medians = medians;
  for (std::size_t g = 1; g < medians.size(); ++g) {
    if (medians[g] - medians[0] > jump_threshold) {
      out.transition_index = g;
      out.eta_pt = eta_grid[g];
      out.eta_selected = eta_grid[g - 1];
      return out;
    }
  }
  out.eta_selected = eta_grid.back();
  out.warning = true;
  out.message = eta_grid.size() == 1 ? "single grid point, no scan possible"
                                     : "no phase transition detected; using the largest grid value";
  return out;
}

double median_gamma(const ChainDraws& draws) {
  if (draws.states.empty()) throw ConfigError("median_gamma needs at least one kept draw");
  const Index q = draws.states.front().q();
  if (q == 0) throw ConfigError("median_gamma needs at least one mediator");
  std::vector<double> means(static_cast<std::size_t>(q), 0.0);
  for (const auto& s : draws.states)
    for (Index j = 0; j < q; ++j) means[static_cast<std::size_t>(j)] += s.gamma(j) ? 1.0 : 0.0;
  for (auto& m : means) m /= static_cast<double>(draws.states.size());
  std::sort(means.begin(), means.end());
  const std::size_t mid = means.size() / 2;
  return means.size() % 2 == 1 ? means[mid] : 0.5 * (means[mid - 1] + means[mid]);
}

std::uint64_t phase_scan_seed(std::uint64_t base, std::size_t g) {
  return base + 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(g);
}

PhaseScanResult phase_transition_scan(const PhaseScanConfig& cfg, const MediationDataset& data,
                                      const Hyperparameters& hp, unsigned workers) {
  cfg.validate();
  const std::size_t grid = cfg.eta_grid.size();
  std::vector<double> medians(grid, 0.0);
  std::vector<std::string> errors(grid);
  parallel_for(grid, workers == 0 ? default_worker_count() : workers, [&](std::size_t g) {
    try {
      ChainConfig c = cfg.chain_template;
      c.model_variant = ModelVariant::MvnMrfSsb;
      c.n_iter = c.burn_in + cfg.m_pt * c.thin;
      c.seed = phase_scan_seed(cfg.chain_template.seed, g);
      Hyperparameters h = hp;
      h.eta = cfg.eta_grid[g];
      medians[g] = median_gamma(run_chain(c, data, h));
    } catch (const std::exception& e) {
      errors[g] = e.what();
    }
  });
  for (std::size_t g = 0; g < grid; ++g)
    if (!errors[g].empty()) throw NumericalError("phase scan grid index " + std::to_string(g) + ": " + errors[g]);
  return select_eta(cfg.eta_grid, medians, cfg.jump_threshold);
}

double bayesian_fdr(const Eigen::VectorXd& ppi, double kappa) {
  double false_mass = 0.0;
  long count = 0;
  for (Index j = 0; j < ppi.size(); ++j) {
    if (ppi(j) > kappa) {
      false_mass += 1.0 - ppi(j);
      ++count;
    }
  }
  return count == 0 ? std::numeric_limits<double>::quiet_NaN() : false_mass / static_cast<double>(count);
}

FdrSelection bayesian_fdr_threshold(const Eigen::VectorXd& ppi, double target) {
  if (!(target > 0.0 && target < 1.0)) throw ConfigError("FDR target must be in (0,1)");
  if (ppi.size() == 0) throw ConfigError("empty PPI vector");
  for (Index j = 0; j < ppi.size(); ++j)
    if (!(ppi(j) >= 0.0 && ppi(j) <= 1.0)) throw ConfigError("PPI values must lie in [0,1]");

  std::vector<double> candidates(ppi.data(), ppi.data() + ppi.size());
  std::sort(candidates.begin(), candidates.end(), std::greater<>());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  if (candidates.back() > 0.0)
    candidates.push_back(std::nextafter(candidates.back(), -std::numeric_limits<double>::infinity()));

  FdrSelection out;
  bool found = false;
  for (const double kappa : candidates) {
    const double fdr = bayesian_fdr(ppi, kappa);
    if (!std::isnan(fdr) && fdr < target) {
      out.kappa = kappa;
      out.fdr = fdr;
      found = true;
    }
  }
  if (!found) {
    out.kappa = candidates.front();
    out.warning = true;
    return out;
  }
  for (Index j = 0; j < ppi.size(); ++j)
    if (ppi(j) > out.kappa) out.selected.push_back(j);
  return out;
}

}  // namespace bvsmed
