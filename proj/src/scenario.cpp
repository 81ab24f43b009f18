#include "bvsmed/scenario.hpp"

#include <algorithm>
#include <set>

#include "bvsmed/error.hpp"
#include "bvsmed/rng.hpp"

namespace bvsmed {

std::string to_string(ScenarioId id) {
  switch (id) {
    case ScenarioId::I: return "I";
    case ScenarioId::II: return "II";
    case ScenarioId::III: return "III";
    case ScenarioId::IVLike: return "IV-like";
  }
  return "?";
}

namespace {

// tau: blocks of `block` mediators at each level; delta_j cycles through `cycle`
// over the same affected mediators (mediator j gets cycle[j mod |cycle|]).
void fill_pathways(ScenarioSpec& s, const std::vector<double>& levels, Index block,
                   const std::vector<double>& cycle) {
  s.tau_true = Eigen::VectorXd::Zero(s.q);
  s.delta_true = Eigen::VectorXd::Zero(s.q);
  const Index affected = static_cast<Index>(levels.size()) * block;
  if (affected > s.q) throw ConfigError("scenario needs q >= " + std::to_string(affected));
  for (Index j = 0; j < affected; ++j) {
    s.tau_true(j) = levels[static_cast<std::size_t>(j / block)];
    s.delta_true(j) = cycle[static_cast<std::size_t>(j) % cycle.size()];
  }
}

ScenarioSpec base_spec(Index n, Index q, Index p, std::uint64_t seed) {
  ScenarioSpec s;
  s.n = n;
  s.q = q;
  s.p = p;
  s.seed = seed;
  s.beta0_true = Eigen::VectorXd::Constant(q, 0.1);
  s.B_true = Eigen::MatrixXd::Constant(p, q, 0.1);
  s.sigma_sq_Sigma_true = 0.5;
  s.alpha0_true = 2.0;
  s.alpha_true = Eigen::VectorXd::Constant(p, 2.0);
  s.alpha_p1_true = 2.0;
  s.sigma_sq_true = 0.5;
  return s;
}

const std::vector<double> kFullLevels{-0.12, -0.08, -0.04, 0.04, 0.08, 0.12};
const std::vector<double> kFullCycle{0.5, 1.0, 1.5, 0.0, 0.0};
// Reduced-scale design: effect sizes rescaled so per-mediator signal-to-noise at
// n = 400 matches the full design at n = 1000.
const std::vector<double> kSmallLevels{-0.18, -0.12, 0.12, 0.18};
const std::vector<double> kSmallCycle{0.5, 1.0, 0.0};

}  // namespace

std::vector<std::string> scenario_preset_names() {
  return {"I", "II", "III", "I-small", "II-small", "III-small"};
}

ScenarioSpec scenario_preset(std::string_view name, std::uint64_t seed) {
  const bool small = name.size() > 6 && name.substr(name.size() - 6) == "-small";
  const std::string_view base = small ? name.substr(0, name.size() - 6) : name;
  ScenarioId id;
  if (base == "I") {
    id = ScenarioId::I;
  } else if (base == "II") {
    id = ScenarioId::II;
  } else if (base == "III") {
    id = ScenarioId::III;
  } else {
    throw ConfigError("unknown scenario preset '" + std::string(name) + "'");
  }

  ScenarioSpec s = small ? base_spec(400, 60, 5, seed) : base_spec(1000, 300, 5, seed);
  s.scenario_id = id;
  s.name = std::string(name);
  s.l = (Eigen::VectorXd(5) << 0.5, 0.2, 0.7, 0.4, 0.6).finished();
  if (small) {
    fill_pathways(s, kSmallLevels, 3, kSmallCycle);
  } else {
    fill_pathways(s, kFullLevels, 5, kFullCycle);
  }
  if (id == ScenarioId::III) s.tau_true.setZero();
  s.lambda_true = Eigen::VectorXd::Constant(s.q, id == ScenarioId::II ? 0.0 : 0.35);
  return s;
}

ScenarioSpec scenario_iv_like(const Eigen::MatrixXd& covariance,
                              const std::optional<std::vector<Index>>& permutation,
                              std::uint64_t seed) {
  const Index q = covariance.rows();
  if (covariance.cols() != q) throw ConfigError("covariance matrix must be square");
  ScenarioSpec s = base_spec(466, q, 3, seed);
  s.scenario_id = ScenarioId::IVLike;
  s.name = "IV-like";
  s.l = (Eigen::VectorXd(3) << 0.5, 0.2, 0.7).finished();
  fill_pathways(s, kFullLevels, 5, kFullCycle);
  if (permutation) {
    const auto& perm = *permutation;
    if (static_cast<Index>(perm.size()) != q) throw ConfigError("permutation must have length q");
    std::set<Index> seen(perm.begin(), perm.end());
    if (static_cast<Index>(seen.size()) != q || *seen.begin() != 0 || *seen.rbegin() != q - 1) {
      throw ConfigError("permutation must be a rearrangement of 0..q-1");
    }
    Eigen::MatrixXd permuted(q, q);
    for (Index a = 0; a < q; ++a) {
      for (Index b = 0; b < q; ++b) permuted(a, b) = covariance(perm[a], perm[b]);
    }
    s.covariance = permuted;
  } else {
    s.covariance = covariance;
  }
  return s;
}

void ScenarioSpec::validate() const {
  if (n < 1 || q < 1 || p < 0) throw ConfigError("scenario needs n >= 1, q >= 1, p >= 0");
  if (l.size() != p || alpha_true.size() != p) throw ConfigError("scenario: l and alpha must have length p");
  if (tau_true.size() != q || delta_true.size() != q || beta0_true.size() != q) {
    throw ConfigError("scenario: tau, delta, beta0 must have length q");
  }
  if (B_true.rows() != p || B_true.cols() != q) throw ConfigError("scenario: B must be p x q");
  if (lambda_true.has_value() == covariance.has_value()) {
    throw ConfigError("scenario: set exactly one of lambda_true and covariance");
  }
  if (lambda_true) {
    if (lambda_true->size() != q) throw ConfigError("scenario: lambda must have length q");
    if (!(sigma_sq_Sigma_true > 0.0)) throw ConfigError("scenario: sigma_sq_Sigma must be positive");
  } else {
    const Eigen::MatrixXd& c = *covariance;
    if (c.rows() != q || c.cols() != q) throw ConfigError("scenario: covariance must be q x q");
    if (!c.isApprox(c.transpose(), 1e-12)) throw ConfigError("scenario: covariance is not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(c);
    if (llt.info() != Eigen::Success) throw ConfigError("scenario: covariance is not positive definite");
  }
  if (!(sigma_sq_true > 0.0)) throw ConfigError("scenario: sigma_sq must be positive");
}

Eigen::MatrixXd generating_covariance(const ScenarioSpec& spec) {
  if (spec.covariance) return *spec.covariance;
  const Eigen::VectorXd& lam = *spec.lambda_true;
  Eigen::MatrixXd cov = lam * lam.transpose();
  cov.diagonal().array() += 1.0;
  return spec.sigma_sq_Sigma_true * cov;
}

TrueActiveSets true_active_sets(const ScenarioSpec& spec) {
  TrueActiveSets t;
  t.gamma_true = spec.tau_true.array() != 0.0;
  t.joint_true = (spec.tau_true.array() * spec.delta_true.array()) != 0.0;
  return t;
}

GeneratedScenario generate_scenario(const ScenarioSpec& spec) {
  spec.validate();
  const Index n = spec.n, q = spec.q, p = spec.p;
  Rng rng(spec.seed, 0x5ce9a210);

  Eigen::MatrixXd chol;
  if (spec.covariance) chol = Eigen::LLT<Eigen::MatrixXd>(*spec.covariance).matrixL();

  MediationDataset d;
  d.X.resize(n, p);
  d.A.resize(n);
  d.M.resize(n, q);
  d.Y.resize(n);
  Eigen::VectorXd z(q);
  const double scale = std::sqrt(spec.sigma_sq_Sigma_true);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < p; ++k) d.X(i, k) = rng.normal();
    d.A(i) = d.X.row(i).dot(spec.l) + rng.normal();
    for (Index j = 0; j < q; ++j) z(j) = rng.normal();
    Eigen::VectorXd noise;
    if (spec.lambda_true) {
      noise = scale * (z + *spec.lambda_true * rng.normal());
    } else {
      noise = chol * z;
    }
    d.M.row(i) = (spec.beta0_true + spec.tau_true * d.A(i) + spec.B_true.transpose() * d.X.row(i).transpose() +
                  noise)
                     .transpose();
    d.Y(i) = spec.alpha0_true + spec.delta_true.dot(d.M.row(i)) + spec.alpha_true.dot(d.X.row(i)) +
             spec.alpha_p1_true * d.A(i) + std::sqrt(spec.sigma_sq_true) * rng.normal();
  }
  assign_default_names(d);
  d.validate();
  return {std::move(d), true_active_sets(spec)};
}

}  // namespace bvsmed
