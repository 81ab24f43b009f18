#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bvsmed/dataset.hpp"
#include "bvsmed/model.hpp"

namespace bvsmed {

enum class ScenarioId { I, II, III, IVLike };

std::string to_string(ScenarioId id);

/// Parameters of the data-generating process. Exactly one of `lambda_true`
/// (factor-analytic covariance) and `covariance` (explicit q x q matrix) is set.
struct ScenarioSpec {
  ScenarioId scenario_id = ScenarioId::I;
  std::string name;
  Index n = 0;
  Index q = 0;
  Index p = 0;
  Eigen::VectorXd l;
  Eigen::VectorXd tau_true;
  Eigen::VectorXd delta_true;
  Eigen::VectorXd beta0_true;
  Eigen::MatrixXd B_true;
  double sigma_sq_Sigma_true = 0.5;
  std::optional<Eigen::VectorXd> lambda_true;
  std::optional<Eigen::MatrixXd> covariance;
  double alpha0_true = 2.0;
  Eigen::VectorXd alpha_true;
  double alpha_p1_true = 2.0;
  double sigma_sq_true = 0.5;
  std::uint64_t seed = 0;

  /// Throws ConfigError on inconsistent dimensions or a non-SPD covariance.
  void validate() const;
};

struct TrueActiveSets {
  Indicator gamma_true;  // tau_j != 0
  Indicator joint_true;  // tau_j * delta_j != 0
};

struct GeneratedScenario {
  MediationDataset data;
  TrueActiveSets truth;
};

/// Named presets. "I", "II", "III" use n = 1000, q = 300, p = 5; the "-small"
/// variants use n = 400, q = 60 with twelve exposure-affected mediators.
ScenarioSpec scenario_preset(std::string_view name, std::uint64_t seed);

/// Names accepted by scenario_preset.
std::vector<std::string> scenario_preset_names();

/// Misspecified-covariance scenario: n = 466, p = 3, q taken from the matrix.
/// `permutation[k]` is the original index placed at position k, so users can
/// align highly correlated mediators with the active pathways.
ScenarioSpec scenario_iv_like(const Eigen::MatrixXd& covariance,
                              const std::optional<std::vector<Index>>& permutation,
                              std::uint64_t seed);

/// Covariance of the mediator errors implied by the spec.
Eigen::MatrixXd generating_covariance(const ScenarioSpec& spec);

TrueActiveSets true_active_sets(const ScenarioSpec& spec);

/// Deterministic given spec.seed.
GeneratedScenario generate_scenario(const ScenarioSpec& spec);

}  // namespace bvsmed
