#include "bvsmed/sampler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>

#include "bvsmed/error.hpp"
#include "bvsmed/gaussian.hpp"
#include "bvsmed/likelihood.hpp"
#include "bvsmed/parallel.hpp"

namespace bvsmed {

namespace {

constexpr std::uint64_t kMediatorStream = 0x6d656469u;
constexpr std::uint64_t kOutcomeStream = 0x6f757463u;
constexpr std::uint64_t kInitStream = 0x696e6974u;

Eigen::VectorXd broadcast(const Eigen::VectorXd& v, Index q, const char* what) {
  if (v.size() == q) return v;
  if (v.size() == 1) return Eigen::VectorXd::Constant(q, v(0));
  throw ConfigError(std::string(what) + " must have length 1 or q");
}

Indicator draw_indicator(const IndicatorPolicy& policy, Index q, Rng& rng) {
  Indicator out(q);
  for (Index j = 0; j < q; ++j) {
    switch (policy.kind) {
      case IndicatorInit::AllOff: out(j) = false; break;
      case IndicatorInit::AllOn: out(j) = true; break;
      case IndicatorInit::Random: out(j) = rng.bernoulli(policy.prob); break;
    }
  }
  return out;
}

double fa_weight(double lambda) { return std::abs(lambda) / std::sqrt(1.0 + lambda * lambda); }

}  // namespace

void ChainConfig::validate() const {
  if (n_iter < 1) throw ConfigError("n_iter must be positive");
  if (burn_in < 0 || burn_in >= n_iter) throw ConfigError("burn_in must be in [0, n_iter)");
  if (thin < 1) throw ConfigError("thin must be positive");
  if (!(adapt.initial_proposal_var_lambda > 0.0)) throw ConfigError("initial lambda proposal variance must be positive");
  if (!(adapt.target_accept > 0.0 && adapt.target_accept < 1.0)) throw ConfigError("target acceptance must be in (0,1)");
  if (adapt.adapt_window < 1) throw ConfigError("adapt_window must be positive");
  if (!(init.sigma_sq_Sigma_init > 0.0) || !(init.sigma_sq_init > 0.0))
    throw ConfigError("initial variances must be positive");
  for (const auto* p : {&init.gamma_init, &init.omega_init}) {
    if (p->kind == IndicatorInit::Random && !(p->prob >= 0.0 && p->prob <= 1.0))
      throw ConfigError("random indicator probability must be in [0,1]");
  }
}

ParameterState initial_state(const InitSpec& init, Index q, Index p, ModelVariant variant, Rng& rng) {
  ParameterState s = ParameterState::zeros(q, p);
  s.gamma = draw_indicator(init.gamma_init, q, rng);
  s.omega = draw_indicator(init.omega_init, q, rng) && s.gamma;
  const Eigen::VectorXd tau = broadcast(init.tau_init, q, "tau_init");
  const Eigen::VectorXd delta = broadcast(init.delta_init, q, "delta_init");
  s.lambda = pins_lambda(variant) ? Eigen::VectorXd::Zero(q) : broadcast(init.lambda_init, q, "lambda_init");
  for (Index j = 0; j < q; ++j) {
    s.tau(j) = s.gamma(j) ? tau(j) : 0.0;
    s.delta(j) = s.omega(j) ? delta(j) : 0.0;
  }
  s.sigma_sq_Sigma = init.sigma_sq_Sigma_init;
  s.sigma_sq = init.sigma_sq_init;
  return s;
}

Sampler::Sampler(const MediationDataset& data, Hyperparameters hp, ChainConfig cfg)
    : data_(&data),
      hp_(std::move(hp)),
      cfg_(std::move(cfg)),
      mediator_rng_(cfg_.seed, kMediatorStream),
      outcome_rng_(cfg_.seed, kOutcomeStream) {
  const Index q = data.q();
  if (hp_.v_sq.size() != q || hp_.psi_sq.size() != q) throw ConfigError("slab scales must have length q");
  if (!uses_mrf(cfg_.model_variant)) hp_.eta = 0.0;
  precompute();
  proposal_sd_ = Eigen::VectorXd::Constant(q, std::sqrt(cfg_.adapt.initial_proposal_var_lambda));
  window_accepts_ = Eigen::VectorXd::Zero(q);
  Rng init_rng(cfg_.seed, kInitStream);
  set_state(initial_state(cfg_.init, q, data.p(), cfg_.model_variant, init_rng));
}

void Sampler::precompute() {
  const MediationDataset& d = *data_;
  const Index n = d.n(), p = d.p();
  sum_a2_ = d.A.squaredNorm();
  m_norm2_ = d.M.colwise().squaredNorm().transpose();
  mtm_ = d.M.transpose() * d.M;
  design_.resize(n, p + 2);
  design_.col(0).setOnes();
  if (p > 0) design_.middleCols(1, p) = d.X;
  design_.col(p + 1) = d.A;
  design_gram_ = design_.transpose() * design_;
  x_norm2_ = p > 0 ? Eigen::VectorXd(d.X.colwise().squaredNorm().transpose()) : Eigen::VectorXd();
}

void Sampler::rebind_data(const MediationDataset& data) {
  if (data.q() != data_->q() || data.p() != data_->p()) throw ConfigError("rebind_data requires the same q and p");
  data_ = &data;
  precompute();
  sync_caches();
}

void Sampler::set_state(const ParameterState& state) {
  if (state.q() != data_->q() || state.p() != data_->p()) throw ConfigError("state shape does not match data");
  check_invariants(state);
  state_ = state;
  if (pins_lambda(cfg_.model_variant)) state_.lambda.setZero();
  sync_caches();
}

void Sampler::sync_caches() {
  resid_m_ = mediator_residuals(*data_, state_);
  proj_ = resid_m_ * state_.lambda;
  a_dot_proj_ = data_->A.dot(proj_);
  lambda_norm_sq_ = state_.lambda.squaredNorm();
  weight_ = state_.lambda.unaryExpr([](double l) { return fa_weight(l); });
  active_weight_ = 0.0;
  for (Index j = 0; j < state_.q(); ++j)
    if (state_.gamma(j)) active_weight_ += weight_(j);
  resid_y_ = outcome_residuals(*data_, state_);
}

std::vector<Index> Sampler::scan_order(Rng& rng) const {
  std::vector<Index> order(static_cast<std::size_t>(state_.q()));
  std::iota(order.begin(), order.end(), Index{0});
  if (cfg_.random_scan) std::shuffle(order.begin(), order.end(), rng.engine());
  return order;
}

void Sampler::sweep(long iteration) {
  sync_caches();
  update_fixed_effects();
  update_gamma_tau();
  if (cfg_.refine) refine_tau();
  if (!pins_lambda(cfg_.model_variant)) update_lambda(iteration <= cfg_.burn_in);
  update_sigma_sq_Sigma();
  update_omega_delta();
  if (cfg_.refine) refine_delta();
  update_sigma_sq();
}

void Sampler::update_fixed_effects() {
  const MediationDataset& d = *data_;
  const Index n = d.n(), p = d.p();
  const double s = state_.sigma_sq_Sigma;
  const double one_l = 1.0 + lambda_norm_sq_;
  const Eigen::VectorXd& lam = state_.lambda;
  auto apply_p = [&](const Eigen::VectorXd& r) -> Eigen::VectorXd { return r - lam * (lam.dot(r) / one_l); };

  // beta0
  {
    const Eigen::VectorXd colsum =
        resid_m_.colwise().sum().transpose() + static_cast<double>(n) * state_.beta0;
    const Eigen::VectorXd diag = Eigen::VectorXd::Constant(d.q(), static_cast<double>(n) / s + 1.0 / hp_.h0);
    const Eigen::VectorXd draw = gaussian::draw_diag_minus_rank_one(
        diag, static_cast<double>(n) / (s * one_l), lam, apply_p(colsum) / s, mediator_rng_);
    resid_m_.rowwise() -= (draw - state_.beta0).transpose();
    state_.beta0 = draw;
  }
  // rows of B
  for (Index k = 0; k < p; ++k) {
    const double xx = x_norm2_(k);
    const Eigen::VectorXd r = resid_m_.transpose() * d.X.col(k) + xx * state_.B.row(k).transpose();
    const Eigen::VectorXd diag = Eigen::VectorXd::Constant(d.q(), xx / s + 1.0 / hp_.c0);
    const Eigen::VectorXd draw =
        gaussian::draw_diag_minus_rank_one(diag, xx / (s * one_l), lam, apply_p(r) / s, mediator_rng_);
    resid_m_.noalias() -= d.X.col(k) * (draw - state_.B.row(k).transpose()).transpose();
    state_.B.row(k) = draw.transpose();
  }
  proj_ = resid_m_ * lam;
  a_dot_proj_ = d.A.dot(proj_);

  // (alpha0, alpha, alpha_{p+1}) against Y - M delta
  {
    Eigen::VectorXd coef(p + 2);
    coef(0) = state_.alpha0;
    if (p > 0) coef.segment(1, p) = state_.alpha;
    coef(p + 1) = state_.alpha_p1;
    const Eigen::VectorXd target = resid_y_ + design_ * coef;
    Eigen::MatrixXd prec = design_gram_ / state_.sigma_sq;
    prec(0, 0) += 1.0 / hp_.s0;
    for (Index k = 0; k < p; ++k) prec(k + 1, k + 1) += 1.0 / hp_.t0;
    prec(p + 1, p + 1) += 1.0 / hp_.k0;
    const Eigen::VectorXd b = design_.transpose() * target / state_.sigma_sq;
    const Eigen::VectorXd draw = gaussian::draw_from_precision(prec, b, outcome_rng_);
    state_.alpha0 = draw(0);
    if (p > 0) state_.alpha = draw.segment(1, p);
    state_.alpha_p1 = draw(p + 1);
    resid_y_ = target - design_ * draw;
  }
}

IndicatorConditional Sampler::gamma_conditional(Index j) const {
  const MediationDataset& d = *data_;
  const double s = state_.sigma_sq_Sigma;
  const double one_l = 1.0 + lambda_norm_sq_;
  const double lj = state_.lambda(j);
  const double tau_old = state_.tau(j);
  // Residuals and projection with tau_j removed.
  const double a_r = d.A.dot(resid_m_.col(j)) + sum_a2_ * tau_old;
  const double a_u = a_dot_proj_ + lj * sum_a2_ * tau_old;
  const double proj = a_r - lj * a_u / one_l;
  const double pjj = 1.0 - lj * lj / one_l;
  const double prior_prec = 1.0 / (hp_.v_sq(j) * s * (1.0 + lj * lj));
  IndicatorConditional out;
  out.post_prec = pjj * sum_a2_ / s + prior_prec;
  if (!std::isfinite(out.post_prec) || !(out.post_prec > 0.0))
    throw NumericalError("non-finite tau conditional precision at mediator " + std::to_string(j));
  out.post_mean = proj / s / out.post_prec;
  double prior = hp_.theta_gamma;
  if (hp_.eta > 0.0) {
    const double wj = weight_(j);
    prior += hp_.eta * wj * (active_weight_ - (state_.gamma(j) ? wj : 0.0));
  }
  if (!cfg_.cut_feedback && !state_.omega(j)) prior += std::log1p(-hp_.theta_omega);
  out.log_odds = prior + 0.5 * std::log(prior_prec / out.post_prec) +
                 0.5 * out.post_mean * out.post_mean * out.post_prec;
  if (!cfg_.cut_feedback && state_.omega(j)) out.log_odds = std::numeric_limits<double>::infinity();
  if (std::isnan(out.log_odds) || !std::isfinite(out.post_mean))
    throw NumericalError("non-finite gamma conditional at mediator " + std::to_string(j));
  return out;
}

void Sampler::update_gamma_tau() {
  const MediationDataset& d = *data_;
  for (const Index j : scan_order(mediator_rng_)) {
    const IndicatorConditional c = gamma_conditional(j);
    const bool old_gamma = state_.gamma(j);
    const bool new_gamma = mediator_rng_.uniform() < logistic(c.log_odds);
    const double tau_new = new_gamma ? c.post_mean + mediator_rng_.normal() / std::sqrt(c.post_prec) : 0.0;
    const double delta_tau = tau_new - state_.tau(j);
    if (delta_tau != 0.0) {
      resid_m_.col(j) -= d.A * delta_tau;
      proj_ -= d.A * (state_.lambda(j) * delta_tau);
      a_dot_proj_ -= state_.lambda(j) * sum_a2_ * delta_tau;
      state_.tau(j) = tau_new;
    }
    ++gamma_updates_;
    if (new_gamma != old_gamma) {
      ++gamma_flips_;
      active_weight_ += (new_gamma ? 1.0 : -1.0) * weight_(j);
      state_.gamma(j) = new_gamma;
      if (!new_gamma && state_.omega(j)) {
        // Only reachable under the cut: the outcome block loses mediator j.
        resid_y_ += d.M.col(j) * state_.delta(j);
        state_.delta(j) = 0.0;
        state_.omega(j) = false;
      }
    }
  }
}

void Sampler::refine_tau() {
  const MediationDataset& d = *data_;
  std::vector<Index> active;
  for (Index j = 0; j < state_.q(); ++j)
    if (state_.gamma(j)) active.push_back(j);
  if (active.empty()) return;
  const Index k = static_cast<Index>(active.size());
  const double s = state_.sigma_sq_Sigma;
  const double one_l = 1.0 + lambda_norm_sq_;
  Eigen::VectorXd lam(k), tau(k), diag(k), a_r(k);
  for (Index i = 0; i < k; ++i) {
    const Index j = active[static_cast<std::size_t>(i)];
    lam(i) = state_.lambda(j);
    tau(i) = state_.tau(j);
    diag(i) = sum_a2_ / s + 1.0 / (hp_.v_sq(j) * s * (1.0 + lam(i) * lam(i)));
    a_r(i) = d.A.dot(resid_m_.col(j)) + sum_a2_ * tau(i);
  }
  const double a_u = a_dot_proj_ + sum_a2_ * lam.dot(tau);
  const Eigen::VectorXd b = (a_r - lam * (a_u / one_l)) / s;
  const Eigen::VectorXd draw =
      gaussian::draw_diag_minus_rank_one(diag, sum_a2_ / (s * one_l), lam, b, mediator_rng_);
  const Eigen::VectorXd change = draw - tau;
  for (Index i = 0; i < k; ++i) {
    const Index j = active[static_cast<std::size_t>(i)];
    resid_m_.col(j) -= d.A * change(i);
    state_.tau(j) = draw(i);
  }
  proj_ -= d.A * lam.dot(change);
  a_dot_proj_ -= sum_a2_ * lam.dot(change);
}

void Sampler::update_lambda(bool adapt_now) {
  if (pins_lambda(cfg_.model_variant)) return;
  const MediationDataset& d = *data_;
  const double n = static_cast<double>(d.n());
  const double s = state_.sigma_sq_Sigma;
  const bool with_mrf = cfg_.lambda_mrf_potential && hp_.eta > 0.0;
  double su2 = proj_.squaredNorm();
  double active_w2 = 0.0;
  for (Index j = 0; j < state_.q(); ++j)
    if (state_.gamma(j)) active_w2 += weight_(j) * weight_(j);

  for (Index j = 0; j < state_.q(); ++j) {
    const double old = state_.lambda(j);
    const double prop = old + proposal_sd_(j) * mediator_rng_.normal();
    const double step = prop - old;
    const auto rj = resid_m_.col(j);
    const double u_r = proj_.dot(rj);
    const double r_r = rj.squaredNorm();
    const double l_new = lambda_norm_sq_ + prop * prop - old * old;
    const double su2_new = su2 + 2.0 * step * u_r + step * step * r_r;
    double log_ratio = -0.5 * n * (std::log1p(l_new) - std::log1p(lambda_norm_sq_)) +
                       (su2_new / (1.0 + l_new) - su2 / (1.0 + lambda_norm_sq_)) / (2.0 * s);
    log_ratio -= ((prop - hp_.mu_lambda) * (prop - hp_.mu_lambda) - (old - hp_.mu_lambda) * (old - hp_.mu_lambda)) /
                 (2.0 * hp_.h_lambda * s);
    const double w_new = fa_weight(prop);
    if (state_.gamma(j)) {
      const double t2 = state_.tau(j) * state_.tau(j);
      log_ratio += -0.5 * (std::log1p(prop * prop) - std::log1p(old * old)) -
                   t2 / (2.0 * hp_.v_sq(j) * s) * (1.0 / (1.0 + prop * prop) - 1.0 / (1.0 + old * old));
      if (with_mrf) {
        const double sw_new = active_weight_ + w_new - weight_(j);
        const double sw2_new = active_w2 + w_new * w_new - weight_(j) * weight_(j);
        log_ratio += 0.5 * hp_.eta *
                     ((sw_new * sw_new - sw2_new) - (active_weight_ * active_weight_ - active_w2));
      }
    }
    ++lambda_proposals_;
    if (std::log(mediator_rng_.uniform()) < log_ratio) {
      ++lambda_accepts_;
      window_accepts_(j) += 1.0;
      state_.lambda(j) = prop;
      proj_ += rj * step;
      a_dot_proj_ += step * d.A.dot(rj);
      lambda_norm_sq_ = l_new;
      su2 = su2_new;
      if (state_.gamma(j)) {
        active_weight_ += w_new - weight_(j);
        active_w2 += w_new * w_new - weight_(j) * weight_(j);
      }
      weight_(j) = w_new;
    }
  }
  if (adapt_now) {
    ++window_sweeps_;
    if (window_sweeps_ >= cfg_.adapt.adapt_window) adapt_proposals();
  } else {
    window_sweeps_ = 0;
    window_accepts_.setZero();
  }
}

void Sampler::adapt_proposals() {
  ++adapt_batches_;
  const double step = std::min(0.05, 1.0 / std::sqrt(static_cast<double>(adapt_batches_)));
  for (Index j = 0; j < proposal_sd_.size(); ++j) {
    const double rate = window_accepts_(j) / static_cast<double>(window_sweeps_);
    proposal_sd_(j) *= std::exp(rate > cfg_.adapt.target_accept ? step : -step);
  }
  window_accepts_.setZero();
  window_sweeps_ = 0;
}

void Sampler::update_sigma_sq_Sigma() {
  const MediationDataset& d = *data_;
  const bool pinned = pins_lambda(cfg_.model_variant);
  const double quad = resid_m_.squaredNorm() - proj_.squaredNorm() / (1.0 + lambda_norm_sq_);
  double shape = 0.5 * hp_.nu0 + 0.5 * static_cast<double>(d.n() * d.q());
  double rate = 0.5 * hp_.nu0 * hp_.sigma0_sq + 0.5 * std::max(quad, 0.0);
  if (!pinned) {
    shape += 0.5 * static_cast<double>(d.q());
    rate += 0.5 * (state_.lambda.array() - hp_.mu_lambda).square().sum() / hp_.h_lambda;
  }
  for (Index j = 0; j < state_.q(); ++j) {
    if (!state_.gamma(j)) continue;
    shape += 0.5;
    const double lj = state_.lambda(j);
    rate += 0.5 * state_.tau(j) * state_.tau(j) / (hp_.v_sq(j) * (1.0 + lj * lj));
  }
  if (!std::isfinite(rate) || !(rate > 0.0)) throw NumericalError("invalid sigma_sq_Sigma rate");
  state_.sigma_sq_Sigma = mediator_rng_.inverse_gamma(shape, rate);
  if (!std::isfinite(state_.sigma_sq_Sigma) || !(state_.sigma_sq_Sigma > 0.0))
    throw NumericalError("sigma_sq_Sigma draw is not a positive finite number");
}

IndicatorConditional Sampler::omega_conditional(Index j) const {
  const MediationDataset& d = *data_;
  const double sig2 = state_.sigma_sq;
  const double m_e = d.M.col(j).dot(resid_y_) + m_norm2_(j) * state_.delta(j);
  IndicatorConditional out;
  const double prior_prec = 1.0 / (hp_.psi_sq(j) * sig2);
  out.post_prec = m_norm2_(j) / sig2 + prior_prec;
  out.post_mean = m_e / sig2 / out.post_prec;
  out.log_odds = logit(hp_.theta_omega) + 0.5 * std::log(prior_prec / out.post_prec) +
                 0.5 * out.post_mean * out.post_mean * out.post_prec;
  if (!std::isfinite(out.log_odds) || !std::isfinite(out.post_mean))
    throw NumericalError("non-finite omega conditional at mediator " + std::to_string(j));
  return out;
}

void Sampler::update_omega_delta() {
  const MediationDataset& d = *data_;
  for (const Index j : scan_order(outcome_rng_)) {
    if (!state_.gamma(j)) continue;
    const IndicatorConditional c = omega_conditional(j);
    const bool old_omega = state_.omega(j);
    const bool new_omega = outcome_rng_.uniform() < logistic(c.log_odds);
    const double delta_new = new_omega ? c.post_mean + outcome_rng_.normal() / std::sqrt(c.post_prec) : 0.0;
    const double change = delta_new - state_.delta(j);
    if (change != 0.0) resid_y_ -= d.M.col(j) * change;
    state_.delta(j) = delta_new;
    state_.omega(j) = new_omega;
    ++omega_updates_;
    if (new_omega != old_omega) ++omega_flips_;
  }
}

void Sampler::refine_delta() {
  const MediationDataset& d = *data_;
  std::vector<Index> active;
  for (Index j = 0; j < state_.q(); ++j)
    if (state_.omega(j)) active.push_back(j);
  if (active.empty()) return;
  const Index k = static_cast<Index>(active.size());
  const double sig2 = state_.sigma_sq;
  Eigen::MatrixXd prec(k, k);
  Eigen::VectorXd old(k), m_e(k);
  for (Index a = 0; a < k; ++a) {
    const Index ja = active[static_cast<std::size_t>(a)];
    old(a) = state_.delta(ja);
    m_e(a) = d.M.col(ja).dot(resid_y_);
    for (Index b = 0; b < k; ++b) prec(a, b) = mtm_(ja, active[static_cast<std::size_t>(b)]);
  }
  const Eigen::VectorXd b = (m_e + prec * old) / sig2;
  for (Index a = 0; a < k; ++a) prec(a, a) += 1.0 / hp_.psi_sq(active[static_cast<std::size_t>(a)]);
  prec /= sig2;
  const Eigen::VectorXd draw = gaussian::draw_from_precision(prec, b, outcome_rng_);
  for (Index a = 0; a < k; ++a) {
    const Index j = active[static_cast<std::size_t>(a)];
    resid_y_ -= d.M.col(j) * (draw(a) - old(a));
    state_.delta(j) = draw(a);
  }
}

void Sampler::update_sigma_sq() {
  const MediationDataset& d = *data_;
  double shape = 0.5 * hp_.nu1 + 0.5 * static_cast<double>(d.n());
  double rate = 0.5 * hp_.nu1 * hp_.sigma1_sq + 0.5 * resid_y_.squaredNorm();
  for (Index j = 0; j < state_.q(); ++j) {
    if (!state_.omega(j)) continue;
    shape += 0.5;
    rate += 0.5 * state_.delta(j) * state_.delta(j) / hp_.psi_sq(j);
  }
  if (!std::isfinite(rate) || !(rate > 0.0)) throw NumericalError("invalid sigma_sq rate");
  state_.sigma_sq = outcome_rng_.inverse_gamma(shape, rate);
  if (!std::isfinite(state_.sigma_sq) || !(state_.sigma_sq > 0.0))
    throw NumericalError("sigma_sq draw is not a positive finite number");
}

BlockRates Sampler::rates() const {
  auto ratio = [](long a, long b) { return b > 0 ? static_cast<double>(a) / static_cast<double>(b) : 0.0; };
  return {ratio(lambda_accepts_, lambda_proposals_), ratio(gamma_flips_, gamma_updates_),
          ratio(omega_flips_, omega_updates_)};
}

void Sampler::reset_counters() {
  lambda_proposals_ = lambda_accepts_ = 0;
  gamma_updates_ = gamma_flips_ = 0;
  omega_updates_ = omega_flips_ = 0;
}

ChainDraws run_chain(const ChainConfig& config, const MediationDataset& data, const Hyperparameters& hp) {
  config.validate();
  hp.validate(data.q());
  if (!uses_mrf(config.model_variant) && hp.eta != 0.0)
    throw ConfigError("eta must be 0 for " + to_string(config.model_variant));
  const auto start = std::chrono::steady_clock::now();
  Sampler sampler(data, hp, config);
  ChainDraws out;
  out.seed = config.seed;
  out.model_variant = config.model_variant;
  out.eta_used = uses_mrf(config.model_variant) ? hp.eta : 0.0;
  const long kept = (config.n_iter - config.burn_in) / config.thin;
  out.states.reserve(static_cast<std::size_t>(kept));
  out.iterations.reserve(static_cast<std::size_t>(kept));
  for (long t = 1; t <= config.n_iter; ++t) {
    try {
      sampler.sweep(t);
    } catch (const NumericalError& e) {
      throw NumericalError("iteration " + std::to_string(t) + ": " + e.what());
    }
    if (t == config.burn_in) sampler.reset_counters();
    if (t > config.burn_in && (t - config.burn_in) % config.thin == 0) {
      check_invariants(sampler.state());
      out.states.push_back(sampler.state());
      out.iterations.push_back(t);
    }
  }
  out.accept_rates = sampler.rates();
  out.lambda_proposal_sd = sampler.lambda_proposal_sd();
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<ChainOutcome> run_chains(const std::vector<ChainConfig>& configs, const MediationDataset& data,
                                     const Hyperparameters& hp, unsigned workers) {
  if (configs.empty()) throw ConfigError("at least one chain is required");
  std::set<std::uint64_t> seeds;
  for (const auto& c : configs)
    if (!seeds.insert(c.seed).second) throw ConfigError("chain seeds must be distinct");
  std::vector<ChainOutcome> out(configs.size());
  parallel_for(configs.size(), workers == 0 ? default_worker_count() : workers, [&](std::size_t i) {
    try {
      out[i].draws = run_chain(configs[i], data, hp);
    } catch (const std::exception& e) {
      out[i].error = e.what();
    }
  });
  return out;
}

}  // namespace bvsmed
