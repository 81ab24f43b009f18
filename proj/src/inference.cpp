#include "bvsmed/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bvsmed/error.hpp"

namespace bvsmed {

namespace {

Index common_q(const std::vector<ChainDraws>& chains) {
  Index q = -1;
  bool any = false;
  for (const auto& c : chains) {
    for (const auto& s : c.states) {
      if (q < 0) q = s.q();
      if (s.q() != q) throw ConfigError("chains have mismatched numbers of mediators");
      any = true;
    }
  }
  if (!any) throw ConfigError("no kept draws");
  return q;
}

double sample_variance(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (const double v : x) ss += (v - mean) * (v - mean);
  return ss / (n - 1.0);
}

}  // namespace

void EffectContrast::validate() const {
  if (!std::isfinite(a) || !std::isfinite(a_prime)) throw ConfigError("contrast levels must be finite");
  if (a == a_prime) throw ConfigError("contrast levels must differ");
}

PpiVectors ppi(const std::vector<ChainDraws>& chains) {
  const Index q = common_q(chains);
  PpiVectors out{Eigen::VectorXd::Zero(q), Eigen::VectorXd::Zero(q)};
  double total = 0.0;
  for (const auto& c : chains) {
    for (const auto& s : c.states) {
      for (Index j = 0; j < q; ++j) {
        if (s.gamma(j)) {
          out.gamma(j) += 1.0;
          if (s.omega(j)) out.joint(j) += 1.0;
        }
      }
      total += 1.0;
    }
  }
  out.gamma /= total;
  out.joint /= total;
  return out;
}

Interval hpdi(std::vector<double> samples, double level) {
  if (samples.size() < 2) throw ConfigError("HPDI needs at least two samples");
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("HPDI level must be in (0,1)");
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  const auto k = std::min(n, static_cast<std::size_t>(std::ceil(level * static_cast<double>(n))));
  std::size_t best = 0;
  double width = samples[k - 1] - samples[0];
  for (std::size_t i = 1; i + k <= n; ++i) {
    const double w = samples[i + k - 1] - samples[i];
    if (w < width) {
      width = w;
      best = i;
    }
  }
  return {samples[best], samples[best + k - 1]};
}

PosteriorSummary summarize_samples(std::vector<double> samples, double level) {
  if (samples.empty()) throw ConfigError("no samples to summarize");
  PosteriorSummary out;
  out.draws = static_cast<long>(samples.size());
  const double n = static_cast<double>(samples.size());
  out.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  out.sd = samples.size() > 1 ? std::sqrt(sample_variance(samples)) : 0.0;
  if (samples.size() > 1) {
    out.hpdi = hpdi(samples, level);
  } else {
    out.hpdi = {samples[0], samples[0]};
  }
  std::sort(samples.begin(), samples.end());
  const std::size_t mid = samples.size() / 2;
  out.median = samples.size() % 2 == 1 ? samples[mid] : 0.5 * (samples[mid - 1] + samples[mid]);
  return out;
}

EffectEstimates estimate_effects(const std::vector<ChainDraws>& chains, const EffectContrast& contrast) {
  contrast.validate();
  const Index q = common_q(chains);
  const double m = contrast.multiplier();
  std::vector<std::vector<double>> ie(static_cast<std::size_t>(q)), tau(static_cast<std::size_t>(q));
  std::vector<double> total, de;
  for (const auto& c : chains) {
    for (const auto& s : c.states) {
      double sum = 0.0;
      for (Index j = 0; j < q; ++j) {
        const double ie_j = m * s.tau(j) * s.delta(j);
        sum += ie_j;
        if (s.gamma(j)) {
          tau[static_cast<std::size_t>(j)].push_back(s.tau(j));
          if (s.omega(j)) ie[static_cast<std::size_t>(j)].push_back(ie_j);
        }
      }
      total.push_back(sum);
      de.push_back(m * s.alpha_p1);
    }
  }
  EffectEstimates out;
  out.ie.resize(static_cast<std::size_t>(q));
  out.tau.resize(static_cast<std::size_t>(q));
  for (std::size_t j = 0; j < static_cast<std::size_t>(q); ++j) {
    if (!ie[j].empty()) out.ie[j] = summarize_samples(std::move(ie[j]));
    if (!tau[j].empty()) out.tau[j] = summarize_samples(std::move(tau[j]));
  }
  out.ie_total = summarize_samples(std::move(total));
  out.de = summarize_samples(std::move(de));
  return out;
}

double gelman_rubin(const std::vector<std::vector<double>>& chains) {
  if (chains.size() < 2) throw ConfigError("PSR needs at least two chains");
  const std::size_t n = chains.front().size();
  if (n < 2) throw ConfigError("PSR needs at least two draws per chain");
  for (const auto& c : chains)
    if (c.size() != n) throw ConfigError("PSR chains must have equal length");
  const double m = static_cast<double>(chains.size());
  const double nd = static_cast<double>(n);
  std::vector<double> means;
  double w = 0.0;
  for (const auto& c : chains) {
    means.push_back(std::accumulate(c.begin(), c.end(), 0.0) / nd);
    w += sample_variance(c);
  }
  w /= m;
  if (!(w > 0.0)) throw NumericalError("PSR undefined: all chains are constant");
  const double b = nd * sample_variance(means);
  const double v = (nd - 1.0) / nd * w + b / nd;
  return std::sqrt(v / w);
}

std::vector<MonitoredScalar> convergence_report(const std::vector<ChainDraws>& chains,
                                                const Eigen::VectorXd& ppi_joint) {
  if (chains.size() < 2) return {};
  const Index q = common_q(chains);
  std::size_t len = chains.front().states.size();
  for (const auto& c : chains) len = std::min(len, c.states.size());
  if (len < 2) return {};

  auto series = [&](auto extract) {
    std::vector<std::vector<double>> out;
    for (const auto& c : chains) {
      std::vector<double> s;
      s.reserve(len);
      for (std::size_t t = 0; t < len; ++t) s.push_back(extract(c.states[t]));
      out.push_back(std::move(s));
    }
    return out;
  };
  std::vector<MonitoredScalar> report;
  auto add = [&](const std::string& name, const std::vector<std::vector<double>>& s) {
    double lo = s.front().front(), hi = lo;
    for (const auto& c : s)
      for (const double v : c) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    if (lo == hi) return;
    try {
      report.push_back({name, gelman_rubin(s)});
    } catch (const NumericalError&) {
      // All chains internally constant but at different values: maximal disagreement.
      report.push_back({name, std::numeric_limits<double>::infinity()});
    }
  };
  add("sigma_sq_Sigma", series([](const ParameterState& s) { return s.sigma_sq_Sigma; }));
  add("sigma_sq", series([](const ParameterState& s) { return s.sigma_sq; }));

  std::vector<double> lambda_var(static_cast<std::size_t>(q), 0.0);
  for (Index j = 0; j < q; ++j) {
    std::vector<double> pooled;
    for (const auto& c : chains)
      for (std::size_t t = 0; t < len; ++t) pooled.push_back(c.states[t].lambda(j));
    lambda_var[static_cast<std::size_t>(j)] = sample_variance(pooled);
  }
  std::vector<Index> order(static_cast<std::size_t>(q));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return lambda_var[static_cast<std::size_t>(a)] > lambda_var[static_cast<std::size_t>(b)];
  });
  for (std::size_t i = 0; i < std::min<std::size_t>(5, order.size()); ++i) {
    const Index j = order[i];
    add("lambda[" + std::to_string(j + 1) + "]", series([j](const ParameterState& s) { return s.lambda(j); }));
  }
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return ppi_joint(a) > ppi_joint(b); });
  for (std::size_t i = 0; i < std::min<std::size_t>(5, order.size()); ++i) {
    const Index j = order[i];
    add("delta[" + std::to_string(j + 1) + "]", series([j](const ParameterState& s) { return s.delta(j); }));
  }
  return report;
}

OperatingCharacteristics operating_characteristics(const std::vector<Index>& selected, const Indicator& truth) {
  const Index q = truth.size();
  Indicator sel = Indicator::Constant(q, false);
  for (const Index j : selected) {
    if (j < 0 || j >= q) throw ConfigError("selected index out of range");
    sel(j) = true;
  }
  OperatingCharacteristics oc;
  for (Index j = 0; j < q; ++j) {
    if (sel(j) && truth(j)) ++oc.tp;
    else if (sel(j)) ++oc.fp;
    else if (truth(j)) ++oc.fn;
    else ++oc.tn;
  }
  auto ratio = [](long a, long b) -> std::optional<double> {
    if (b == 0) return std::nullopt;
    return static_cast<double>(a) / static_cast<double>(b);
  };
  oc.tpr = ratio(oc.tp, oc.tp + oc.fn);
  oc.fpr = ratio(oc.fp, oc.fp + oc.tn);
  oc.ppv = ratio(oc.tp, oc.tp + oc.fp);
  oc.npv = ratio(oc.tn, oc.tn + oc.fn);
  oc.nvs = oc.tp + oc.fp;
  return oc;
}

OcAggregate aggregate_oc(const std::vector<OperatingCharacteristics>& runs) {
  auto agg = [&](auto get) {
    std::vector<double> v;
    for (const auto& r : runs)
      if (auto x = get(r)) v.push_back(*x);
    MetricAggregate out;
    out.defined = static_cast<long>(v.size());
    if (!v.empty()) out.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    if (v.size() > 1) out.sd = std::sqrt(sample_variance(v));
    return out;
  };
  OcAggregate out;
  out.tpr = agg([](const OperatingCharacteristics& r) { return r.tpr; });
  out.fpr = agg([](const OperatingCharacteristics& r) { return r.fpr; });
  out.ppv = agg([](const OperatingCharacteristics& r) { return r.ppv; });
  out.npv = agg([](const OperatingCharacteristics& r) { return r.npv; });
  out.nvs = agg([](const OperatingCharacteristics& r) { return std::optional<double>(static_cast<double>(r.nvs)); });
  return out;
}

SelectionSummary summarize_selection(const std::vector<ChainDraws>& chains, const EffectContrast& contrast,
                                     double fdr_target) {
  SelectionSummary out;
  out.ppi = ppi(chains);
  out.fdr_target = fdr_target;
  out.joint = bayesian_fdr_threshold(out.ppi.joint, fdr_target);
  out.gamma = bayesian_fdr_threshold(out.ppi.gamma, fdr_target);
  out.contrast = contrast;
  out.effects = estimate_effects(chains, contrast);
  return out;
}

}  // namespace bvsmed
