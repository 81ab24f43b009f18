#include "bvsmed/draws_io.hpp"

#include <fstream>
#include <functional>

#include "bvsmed/csv.hpp"
#include "bvsmed/error.hpp"

#ifndef BVSMED_GIT_DESCRIBE
#define BVSMED_GIT_DESCRIBE "unknown"
#endif

namespace bvsmed {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

std::vector<std::string> prefixed(const std::vector<std::string>& names, std::string_view prefix) {
  std::vector<std::string> out;
  for (const auto& n : names) out.push_back(std::string(prefix) + n);
  return out;
}

// Writes one group file; row(state) returns the cells after the iteration column.
void write_group(const fs::path& path, const std::vector<std::string>& columns, const ChainDraws& d,
                 const std::function<void(const ParameterState&, std::vector<std::string>&)>& row) {
  std::ofstream out = open_out(path);
  std::vector<std::string> header{"iteration"};
  header.insert(header.end(), columns.begin(), columns.end());
  csv::write_row(out, header);
  std::vector<std::string> cells;
  for (std::size_t t = 0; t < d.states.size(); ++t) {
    cells.assign(1, std::to_string(d.iterations[t]));
    row(d.states[t], cells);
    csv::write_row(out, cells);
  }
  if (!out) throw DataError("failed writing " + path.string());
}

std::string flag(bool b) { return b ? "1" : "0"; }

struct GroupTable {
  csv::Table table;
  std::size_t rows() const { return table.rows.size(); }
  double value(std::size_t r, std::size_t c) const {
    double v = 0.0;
    if (!csv::parse_double(table.rows[r][c], v))
      throw DataError("non-numeric draw '" + table.rows[r][c] + "' in column " + table.header[c]);
    return v;
  }
};

GroupTable read_group(const fs::path& dir, std::size_t chain, std::string_view group) {
  GroupTable g{csv::read_file(draw_file(dir, chain, group))};
  if (g.table.header.empty() || g.table.header.front() != "iteration")
    throw DataError("draw file for " + std::string(group) + " lacks an iteration column");
  return g;
}

}  // namespace

const std::vector<std::string>& draw_groups() {
  static const std::vector<std::string> groups{"beta0", "B",     "tau",   "gamma",
                                               "lambda", "delta", "omega", "scalars"};
  return groups;
}

fs::path draw_file(const fs::path& dir, std::size_t chain, std::string_view group) {
  return dir / ("chain" + std::to_string(chain) + "_" + std::string(group) + ".csv");
}

void write_chain_draws(const ChainDraws& d, const MediationDataset& names, const fs::path& dir, std::size_t chain) {
  fs::create_directories(dir);
  const auto& med = names.mediator_names;
  const auto& cov = names.covariate_names;
  const Index q = static_cast<Index>(med.size());
  const Index p = static_cast<Index>(cov.size());
  if (!d.states.empty() && (d.states.front().q() != q || d.states.front().p() != p))
    throw DataError("draw shapes do not match dataset names");
  using csv::format_double;

  write_group(draw_file(dir, chain, "beta0"), med, d, [&](const ParameterState& s, auto& c) {
    for (Index j = 0; j < q; ++j) c.push_back(format_double(s.beta0(j)));
  });
  std::vector<std::string> b_cols;
  for (Index k = 0; k < p; ++k)
    for (Index j = 0; j < q; ++j) b_cols.push_back(cov[static_cast<std::size_t>(k)] + ":" + med[static_cast<std::size_t>(j)]);
  write_group(draw_file(dir, chain, "B"), b_cols, d, [&](const ParameterState& s, auto& c) {
    for (Index k = 0; k < p; ++k)
      for (Index j = 0; j < q; ++j) c.push_back(format_double(s.B(k, j)));
  });
  write_group(draw_file(dir, chain, "tau"), med, d, [&](const ParameterState& s, auto& c) {
    for (Index j = 0; j < q; ++j) c.push_back(format_double(s.tau(j)));
  });
  write_group(draw_file(dir, chain, "gamma"), med, d, [&](const ParameterState& s, auto& c) {
    for (Index j = 0; j < q; ++j) c.push_back(flag(s.gamma(j)));
  });
  write_group(draw_file(dir, chain, "lambda"), med, d, [&](const ParameterState& s, auto& c) {
    for (Index j = 0; j < q; ++j) c.push_back(format_double(s.lambda(j)));
  });
  write_group(draw_file(dir, chain, "delta"), med, d, [&](const ParameterState& s, auto& c) {
    for (Index j = 0; j < q; ++j) c.push_back(format_double(s.delta(j)));
  });
  write_group(draw_file(dir, chain, "omega"), med, d, [&](const ParameterState& s, auto& c) {
    for (Index j = 0; j < q; ++j) c.push_back(flag(s.omega(j)));
  });
  std::vector<std::string> scalar_cols{"sigma_sq_Sigma", "alpha0"};
  for (const auto& a : prefixed(cov, "alpha:")) scalar_cols.push_back(a);
  scalar_cols.push_back("alpha_exposure");
  scalar_cols.push_back("sigma_sq");
  write_group(draw_file(dir, chain, "scalars"), scalar_cols, d, [&](const ParameterState& s, auto& c) {
    c.push_back(format_double(s.sigma_sq_Sigma));
    c.push_back(format_double(s.alpha0));
    for (Index k = 0; k < p; ++k) c.push_back(format_double(s.alpha(k)));
    c.push_back(format_double(s.alpha_p1));
    c.push_back(format_double(s.sigma_sq));
  });

  json meta;
  meta["seed"] = d.seed;
  meta["model_variant"] = to_string(d.model_variant);
  meta["eta_used"] = d.eta_used;
  meta["wall_seconds"] = d.wall_seconds;
  meta["accept_rates"] = {{"lambda", d.accept_rates.lambda_accept},
                          {"gamma_flip", d.accept_rates.gamma_flip},
                          {"omega_flip", d.accept_rates.omega_flip}};
  meta["lambda_proposal_sd"] = std::vector<double>(d.lambda_proposal_sd.data(),
                                                   d.lambda_proposal_sd.data() + d.lambda_proposal_sd.size());
  meta["kept_draws"] = d.states.size();
  write_json(meta, dir / ("chain" + std::to_string(chain) + "_meta.json"));
}

ChainDraws read_chain_draws(const fs::path& dir, std::size_t chain) {
  const GroupTable tau = read_group(dir, chain, "tau");
  const GroupTable scalars = read_group(dir, chain, "scalars");
  const Index q = static_cast<Index>(tau.table.header.size()) - 1;
  const Index p = static_cast<Index>(scalars.table.header.size()) - 5;
  if (q < 1 || p < 0) throw DataError("malformed draw files in " + dir.string());
  std::vector<GroupTable> groups;
  for (const auto& g : draw_groups()) groups.push_back(read_group(dir, chain, g));
  const std::size_t rows = tau.rows();
  for (const auto& g : groups)
    if (g.rows() != rows) throw DataError("draw files have different numbers of rows");

  ChainDraws d;
  d.states.reserve(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    ParameterState s = ParameterState::zeros(q, p);
    for (Index j = 0; j < q; ++j) {
      const auto c = static_cast<std::size_t>(j) + 1;
      s.beta0(j) = groups[0].value(r, c);
      s.tau(j) = groups[2].value(r, c);
      s.gamma(j) = groups[3].value(r, c) != 0.0;
      s.lambda(j) = groups[4].value(r, c);
      s.delta(j) = groups[5].value(r, c);
      s.omega(j) = groups[6].value(r, c) != 0.0;
    }
    for (Index k = 0; k < p; ++k)
      for (Index j = 0; j < q; ++j) s.B(k, j) = groups[1].value(r, static_cast<std::size_t>(k * q + j) + 1);
    const GroupTable& sc = groups[7];
    s.sigma_sq_Sigma = sc.value(r, 1);
    s.alpha0 = sc.value(r, 2);
    for (Index k = 0; k < p; ++k) s.alpha(k) = sc.value(r, static_cast<std::size_t>(k) + 3);
    s.alpha_p1 = sc.value(r, static_cast<std::size_t>(p) + 3);
    s.sigma_sq = sc.value(r, static_cast<std::size_t>(p) + 4);
    check_invariants(s);
    d.states.push_back(std::move(s));
    d.iterations.push_back(static_cast<long>(tau.value(r, 0)));
  }

  const fs::path meta_path = dir / ("chain" + std::to_string(chain) + "_meta.json");
  if (fs::exists(meta_path)) {
    const json meta = read_json(meta_path);
    d.seed = meta.value("seed", std::uint64_t{0});
    d.model_variant = parse_model_variant(meta.value("model_variant", std::string("MVN-MRF-SSB")));
    d.eta_used = meta.value("eta_used", 0.0);
    d.wall_seconds = meta.value("wall_seconds", 0.0);
    if (meta.contains("accept_rates")) {
      d.accept_rates.lambda_accept = meta["accept_rates"].value("lambda", 0.0);
      d.accept_rates.gamma_flip = meta["accept_rates"].value("gamma_flip", 0.0);
      d.accept_rates.omega_flip = meta["accept_rates"].value("omega_flip", 0.0);
    }
    if (meta.contains("lambda_proposal_sd")) {
      const auto v = meta["lambda_proposal_sd"].get<std::vector<double>>();
      d.lambda_proposal_sd = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Index>(v.size()));
    }
  }
  return d;
}

std::size_t count_stored_chains(const fs::path& dir) {
  std::size_t k = 0;
  while (fs::exists(draw_file(dir, k, "tau"))) ++k;
  return k;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string build_version() { return BVSMED_GIT_DESCRIBE; }

json make_manifest(std::string_view command, const json& config, const std::vector<std::uint64_t>& seeds,
                   double eta, double wall_seconds) {
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(config.dump())));
  json m;
  m["command"] = command;
  m["config"] = config;
  m["config_hash"] = hash;
  m["seeds"] = seeds;
  m["eta"] = eta;
  m["version"] = build_version();
  m["wall_seconds"] = wall_seconds;
  return m;
}

void write_json(const json& value, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out = open_out(path);
  out << value.dump(2) << '\n';
  if (!out) throw DataError("failed writing " + path.string());
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

}  // namespace bvsmed
