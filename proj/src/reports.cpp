#include "bvsmed/reports.hpp"

#include <fstream>
#include <stdexcept>

#include "bvsmed/csv.hpp"
#include "bvsmed/error.hpp"

namespace bvsmed {

namespace fs = std::filesystem;
using nlohmann::json;
using csv::format_double;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::vector<double> as_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

std::string opt_cell(const std::optional<double>& v) { return v ? format_double(*v) : "NA"; }

}  // namespace

json to_json(const PosteriorSummary& s) {
  return json{{"median", s.median},      {"mean", s.mean},          {"sd", s.sd},
              {"hpdi_lo", s.hpdi.lo},    {"hpdi_hi", s.hpdi.hi},    {"draws", s.draws}};
}

json to_json(const FdrSelection& s, const std::vector<std::string>& names) {
  json sel = json::array(), sel_names = json::array();
  for (const Index j : s.selected) {
    sel.push_back(j + 1);
    sel_names.push_back(names.at(static_cast<std::size_t>(j)));
  }
  return json{{"kappa", s.kappa}, {"fdr", s.fdr}, {"warning", s.warning}, {"selected", sel},
              {"selected_names", sel_names}};
}

json to_json(const SelectionSummary& s, const std::vector<std::string>& names) {
  json j;
  j["fdr_target"] = s.fdr_target;
  j["contrast"] = {{"a", s.contrast.a}, {"a_prime", s.contrast.a_prime}, {"multiplier", s.contrast.multiplier()}};
  j["mediators"] = names;
  j["ppi_joint"] = as_vector(s.ppi.joint);
  j["ppi_gamma"] = as_vector(s.ppi.gamma);
  j["joint_selection"] = to_json(s.joint, names);
  j["gamma_selection"] = to_json(s.gamma, names);
  if (s.effects.ie.size() != names.size() || s.effects.tau.size() != names.size())
    throw std::invalid_argument("selection summary effects do not match the mediator names");
  json ie = json::array(), tau = json::array();
  for (std::size_t k = 0; k < names.size(); ++k) {
    ie.push_back(s.effects.ie[k] ? to_json(*s.effects.ie[k]) : json(nullptr));
    tau.push_back(s.effects.tau[k] ? to_json(*s.effects.tau[k]) : json(nullptr));
  }
  j["ie_conditional"] = ie;
  j["tau_conditional"] = tau;
  j["ie_total"] = to_json(s.effects.ie_total);
  j["de"] = to_json(s.effects.de);
  return j;
}

json to_json(const PhaseScanResult& r) {
  json j{{"eta_grid", r.eta_grid}, {"medians", r.medians}, {"eta_selected", r.eta_selected},
         {"warning", r.warning},   {"message", r.message}};
  j["eta_pt"] = r.eta_pt ? json(*r.eta_pt) : json(nullptr);
  j["transition_index"] = r.transition_index ? json(*r.transition_index) : json(nullptr);
  return j;
}

json to_json(const OperatingCharacteristics& oc) {
  return json{{"tpr", optional_number(oc.tpr)}, {"fpr", optional_number(oc.fpr)}, {"ppv", optional_number(oc.ppv)},
              {"npv", optional_number(oc.npv)}, {"nvs", oc.nvs},                   {"tp", oc.tp},
              {"fp", oc.fp},                    {"fn", oc.fn},                     {"tn", oc.tn}};
}

json to_json(const OcAggregate& agg) {
  auto m = [](const MetricAggregate& a) {
    return json{{"mean", optional_number(a.mean)}, {"sd", optional_number(a.sd)}, {"defined", a.defined}};
  };
  return json{{"tpr", m(agg.tpr)}, {"fpr", m(agg.fpr)}, {"ppv", m(agg.ppv)}, {"npv", m(agg.npv)}, {"nvs", m(agg.nvs)}};
}

json to_json(const std::vector<MonitoredScalar>& psr) {
  json j = json::array();
  for (const auto& m : psr) j.push_back({{"parameter", m.name}, {"psr", std::isfinite(m.psr) ? json(m.psr) : json("inf")}});
  return j;
}

void write_effects_csv(const SelectionSummary& s, const std::vector<std::string>& names, const fs::path& path) {
  std::ofstream out = open_out(path);
  csv::write_row(out, {"index", "mediator", "ppi_joint", "tau_median", "tau_hpdi_lo", "tau_hpdi_hi", "ie_median",
                       "ie_mean", "ie_sd", "ie_hpdi_lo", "ie_hpdi_hi"});
  for (const Index j : s.joint.selected) {
    const auto k = static_cast<std::size_t>(j);
    std::vector<std::string> row{std::to_string(j + 1), names.at(k), format_double(s.ppi.joint(j))};
    if (const auto& t = s.effects.tau[k]) {
      row.insert(row.end(), {format_double(t->median), format_double(t->hpdi.lo), format_double(t->hpdi.hi)});
    } else {
      row.insert(row.end(), {"NA", "NA", "NA"});
    }
    if (const auto& e = s.effects.ie[k]) {
      row.insert(row.end(), {format_double(e->median), format_double(e->mean), format_double(e->sd),
                             format_double(e->hpdi.lo), format_double(e->hpdi.hi)});
    } else {
      row.insert(row.end(), {"NA", "NA", "NA", "NA", "NA"});
    }
    csv::write_row(out, row);
  }
}

void write_ppi_csv(const SelectionSummary& s, const std::vector<std::string>& names, const fs::path& path) {
  std::ofstream out = open_out(path);
  csv::write_row(out, {"index", "mediator", "ppi_gamma", "ppi_joint", "kappa_joint", "kappa_gamma", "selected"});
  std::vector<bool> sel(names.size(), false);
  for (const Index j : s.joint.selected) sel[static_cast<std::size_t>(j)] = true;
  for (std::size_t k = 0; k < names.size(); ++k) {
    const auto j = static_cast<Index>(k);
    csv::write_row(out, {std::to_string(k + 1), names[k], format_double(s.ppi.gamma(j)), format_double(s.ppi.joint(j)),
                         format_double(s.joint.kappa), format_double(s.gamma.kappa), sel[k] ? "1" : "0"});
  }
}

void write_phase_scan_csv(const PhaseScanResult& r, const fs::path& path) {
  std::ofstream out = open_out(path);
  csv::write_row(out, {"eta", "median_gamma", "transition", "selected"});
  for (std::size_t g = 0; g < r.eta_grid.size(); ++g) {
    const bool transition = r.transition_index && *r.transition_index == g;
    csv::write_row(out, {format_double(r.eta_grid[g]), format_double(r.medians[g]), transition ? "1" : "0",
                         r.eta_grid[g] == r.eta_selected ? "1" : "0"});
  }
}

void write_oc_table_csv(const OcAggregate& gamma, const OcAggregate& joint, const fs::path& path) {
  std::ofstream out = open_out(path);
  csv::write_row(out, {"selection", "statistic", "TPR", "FPR", "PPV", "NPV", "NVS"});
  for (const auto& [label, agg] : {std::pair{"gamma", &gamma}, std::pair{"joint", &joint}}) {
    csv::write_row(out, {label, "mean", opt_cell(agg->tpr.mean), opt_cell(agg->fpr.mean), opt_cell(agg->ppv.mean),
                         opt_cell(agg->npv.mean), opt_cell(agg->nvs.mean)});
    csv::write_row(out, {label, "sd", opt_cell(agg->tpr.sd), opt_cell(agg->fpr.sd), opt_cell(agg->ppv.sd),
                         opt_cell(agg->npv.sd), opt_cell(agg->nvs.sd)});
  }
}

SelectionSummary selection_from_json(const json& j) {
  try {
    SelectionSummary s;
    s.fdr_target = j.at("fdr_target").get<double>();
    s.contrast.a = j.at("contrast").at("a").get<double>();
    s.contrast.a_prime = j.at("contrast").at("a_prime").get<double>();
    const auto joint = j.at("ppi_joint").get<std::vector<double>>();
    const auto gamma = j.at("ppi_gamma").get<std::vector<double>>();
    s.ppi.joint = Eigen::Map<const Eigen::VectorXd>(joint.data(), static_cast<Index>(joint.size()));
    s.ppi.gamma = Eigen::Map<const Eigen::VectorXd>(gamma.data(), static_cast<Index>(gamma.size()));
    auto sel = [](const json& x) {
      FdrSelection f;
      f.kappa = x.at("kappa").get<double>();
      f.fdr = x.at("fdr").get<double>();
      f.warning = x.at("warning").get<bool>();
      for (const auto& i : x.at("selected")) f.selected.push_back(i.get<Index>() - 1);
      return f;
    };
    s.joint = sel(j.at("joint_selection"));
    s.gamma = sel(j.at("gamma_selection"));
    return s;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed selection summary: ") + e.what());
  }
}

}  // namespace bvsmed
