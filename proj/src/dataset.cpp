#include "bvsmed/dataset.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include "bvsmed/csv.hpp"
#include "bvsmed/error.hpp"

namespace bvsmed {

namespace {

void check_finite(const Eigen::Ref<const Eigen::MatrixXd>& m, const std::string& what) {
  for (Index c = 0; c < m.cols(); ++c) {
    for (Index r = 0; r < m.rows(); ++r) {
      if (!std::isfinite(m(r, c))) {
        throw DataError(what + ": non-finite value at row " + std::to_string(r + 1) +
                        ", column " + std::to_string(c + 1));
      }
    }
  }
}

}  // namespace

void MediationDataset::validate() const {
  const Index rows = A.size();
  if (rows < 1) throw DataError("dataset must have at least one row");
  if (M.cols() < 1) throw DataError("dataset must have at least one mediator");
  if (M.rows() != rows || Y.size() != rows || X.rows() != rows) {
    throw DataError("dataset row counts disagree");
  }
  if (static_cast<Index>(mediator_names.size()) != M.cols()) {
    throw DataError("mediator name count does not match q");
  }
  if (static_cast<Index>(covariate_names.size()) != X.cols()) {
    throw DataError("covariate name count does not match p");
  }
  check_finite(X, "covariates");
  check_finite(A, "exposure");
  check_finite(M, "mediators");
  check_finite(Y, "outcome");
}

void assign_default_names(MediationDataset& data) {
  if (static_cast<Index>(data.mediator_names.size()) != data.q()) {
    data.mediator_names.clear();
    for (Index j = 0; j < data.q(); ++j) data.mediator_names.push_back("M" + std::to_string(j + 1));
  }
  if (static_cast<Index>(data.covariate_names.size()) != data.p()) {
    data.covariate_names.clear();
    for (Index k = 0; k < data.p(); ++k) data.covariate_names.push_back("X" + std::to_string(k + 1));
  }
}

MediationDataset load_dataset(const std::filesystem::path& path, const ColumnSchema& schema) {
  if (!std::filesystem::exists(path)) throw DataError("dataset file not found: " + path.string());
  const csv::Table table = csv::read_file(path);

  {
    std::set<std::string> seen;
    for (const auto& h : table.header) {
      if (!seen.insert(h).second) throw DataError("duplicate column in " + path.string() + ": " + h);
    }
  }

  if (schema.exposure.empty()) throw ConfigError("schema must name an exposure column");
  if (schema.outcome.empty()) throw ConfigError("schema must name an outcome column");

  std::vector<std::string> mediators = schema.mediators;
  if (mediators.empty() && schema.mediators_rest) {
    std::set<std::string> taken(schema.covariates.begin(), schema.covariates.end());
    taken.insert(schema.exposure);
    taken.insert(schema.outcome);
    taken.insert(schema.ignored.begin(), schema.ignored.end());
    for (const auto& h : table.header) {
      if (!taken.count(h)) mediators.push_back(h);
    }
  }
  if (mediators.empty()) throw ConfigError("schema must name at least one mediator column");

  std::map<std::string, std::string> roles;
  auto claim = [&](const std::string& name, const std::string& role) {
    if (table.column(name) < 0) throw DataError("missing column '" + name + "' (" + role + ")");
    auto [it, inserted] = roles.emplace(name, role);
    if (!inserted) {
      throw ConfigError("column '" + name + "' assigned twice (" + it->second + ", " + role + ")");
    }
  };
  claim(schema.exposure, "exposure");
  claim(schema.outcome, "outcome");
  for (const auto& m : mediators) claim(m, "mediator");
  for (const auto& x : schema.covariates) claim(x, "covariate");

  const Index n = static_cast<Index>(table.rows.size());
  auto read_column = [&](const std::string& name, auto&& sink) {
    const long c = table.column(name);
    for (Index r = 0; r < n; ++r) {
      const std::string& cell = table.rows[r][c];
      double v = 0.0;
      if (!csv::parse_double(cell, v)) {
        throw DataError("non-numeric cell at row " + std::to_string(r + 1) + ", column '" + name +
                        "': '" + cell + "'");
      }
      if (!std::isfinite(v)) {
        throw DataError("non-finite cell at row " + std::to_string(r + 1) + ", column '" + name + "'");
      }
      sink(r, v);
    }
  };

  MediationDataset data;
  data.exposure_name = schema.exposure;
  data.outcome_name = schema.outcome;
  data.mediator_names = mediators;
  data.covariate_names = schema.covariates;
  data.A.resize(n);
  data.Y.resize(n);
  data.M.resize(n, static_cast<Index>(mediators.size()));
  data.X.resize(n, static_cast<Index>(schema.covariates.size()));
  read_column(schema.exposure, [&](Index r, double v) { data.A(r) = v; });
  read_column(schema.outcome, [&](Index r, double v) { data.Y(r) = v; });
  for (std::size_t j = 0; j < mediators.size(); ++j) {
    read_column(mediators[j], [&](Index r, double v) { data.M(r, static_cast<Index>(j)) = v; });
  }
  for (std::size_t k = 0; k < schema.covariates.size(); ++k) {
    read_column(schema.covariates[k], [&](Index r, double v) { data.X(r, static_cast<Index>(k)) = v; });
  }
  data.validate();
  return data;
}

void save_dataset(const MediationDataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path.string());
  std::vector<std::string> header = data.covariate_names;
  header.push_back(data.exposure_name);
  header.insert(header.end(), data.mediator_names.begin(), data.mediator_names.end());
  header.push_back(data.outcome_name);
  csv::write_row(out, header);
  std::vector<std::string> row(header.size());
  for (Index i = 0; i < data.n(); ++i) {
    std::size_t c = 0;
    for (Index k = 0; k < data.p(); ++k) row[c++] = csv::format_double(data.X(i, k));
    row[c++] = csv::format_double(data.A(i));
    for (Index j = 0; j < data.q(); ++j) row[c++] = csv::format_double(data.M(i, j));
    row[c++] = csv::format_double(data.Y(i));
    csv::write_row(out, row);
  }
  if (!out) throw DataError("write failed: " + path.string());
}

ColumnSchema schema_for(const MediationDataset& data) {
  ColumnSchema s;
  s.exposure = data.exposure_name;
  s.outcome = data.outcome_name;
  s.mediators = data.mediator_names;
  s.covariates = data.covariate_names;
  return s;
}

std::vector<std::string> read_text_column(const std::filesystem::path& path, const std::string& name) {
  const csv::Table table = csv::read_file(path);
  const long c = table.column(name);
  if (c < 0) throw DataError("missing column '" + name + "' in " + path.string());
  std::vector<std::string> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) out.push_back(row[c]);
  return out;
}

double sample_skewness(const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() < 3) throw DataError("skewness needs at least 3 values");
  const double mean = x.mean();
  const Eigen::ArrayXd d = x.array() - mean;
  const double m2 = d.square().mean();
  const double m3 = d.cube().mean();
  if (!(m2 > 0.0)) throw DataError("skewness undefined for zero variance");
  return m3 / std::pow(m2, 1.5);
}

Eigen::VectorXd inverse_normal_transform(const Eigen::Ref<const Eigen::VectorXd>& x) {
  const Index n = x.size();
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return x(a) < x(b); });
  Eigen::VectorXd ranks(n);
  for (Index i = 0; i < n;) {
    Index j = i;
    while (j + 1 < n && x(order[j + 1]) == x(order[i])) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based average rank
    for (Index k = i; k <= j; ++k) ranks(order[k]) = avg;
    i = j + 1;
  }
  const boost::math::normal_distribution<double> std_normal;
  Eigen::VectorXd out(n);
  for (Index i = 0; i < n; ++i) {
    out(i) = boost::math::quantile(std_normal, (ranks(i) - 0.5) / static_cast<double>(n));
  }
  return out;
}

double sample_quantile(const Eigen::Ref<const Eigen::VectorXd>& x, double prob) {
  if (x.size() == 0) throw DataError("quantile of empty vector");
  if (!(prob >= 0.0 && prob <= 1.0)) throw ConfigError("quantile probability outside [0, 1]");
  std::vector<double> v(x.data(), x.data() + x.size());
  std::sort(v.begin(), v.end());
  const double h = prob * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

PreprocessResult preprocess(const MediationDataset& data, const PreprocessOptions& opts) {
  if (!(opts.log_transform_abs_skewness_threshold > 0.0)) {
    throw ConfigError("skewness threshold must be positive");
  }
  const Index n = data.n();
  PreprocessResult result{data, {}};
  MediationDataset& out = result.data;

  // Row indices per z-score group, in first-appearance order.
  std::vector<std::string> labels;
  std::vector<std::vector<Index>> members;
  if (opts.zscore_groups) {
    if (static_cast<Index>(opts.zscore_groups->size()) != n) {
      throw DataError("z-score group labels must have one entry per row");
    }
    std::map<std::string, std::size_t> slot;
    for (Index i = 0; i < n; ++i) {
      const auto& g = (*opts.zscore_groups)[i];
      auto [it, inserted] = slot.emplace(g, labels.size());
      if (inserted) {
        labels.push_back(g);
        members.emplace_back();
      }
      members[it->second].push_back(i);
    }
  } else {
    labels.push_back("all");
    members.emplace_back(n);
    std::iota(members.back().begin(), members.back().end(), Index{0});
  }
  for (std::size_t g = 0; g < labels.size(); ++g) {
    if (members[g].size() < 2) throw DataError("z-score group '" + labels[g] + "' has fewer than 2 rows");
  }
  result.report.groups = labels;

  for (Index j = 0; j < out.q(); ++j) {
    auto col = out.M.col(j);
    const std::string& name = out.mediator_names[j];
    if (std::abs(sample_skewness(col)) > opts.log_transform_abs_skewness_threshold) {
      if ((col.array() <= 0.0).any()) {
        throw DataError("mediator '" + name + "' needs a log transform but has nonpositive values");
      }
      col = col.array().log().matrix();
      result.report.log_transformed.push_back(name);
    }
    for (std::size_t g = 0; g < labels.size(); ++g) {
      const auto& rows = members[g];
      double mean = 0.0;
      for (Index i : rows) mean += col(i);
      mean /= static_cast<double>(rows.size());
      double ss = 0.0;
      for (Index i : rows) ss += (col(i) - mean) * (col(i) - mean);
      const double sd = std::sqrt(ss / static_cast<double>(rows.size() - 1));
      if (!(sd > 0.0)) {
        throw DataError("mediator '" + name + "' has zero variance in group '" + labels[g] + "'");
      }
      for (Index i : rows) col(i) = (col(i) - mean) / sd;
    }
  }

  if (opts.inverse_normal_exposure) {
    out.A = inverse_normal_transform(out.A);
    result.report.exposure_inverse_normal = true;
  }
  return result;
}

}  // namespace bvsmed
