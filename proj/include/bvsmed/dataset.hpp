#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace bvsmed {

using Eigen::Index;

/// Observed covariates X (n x p), exposure A, mediators M (n x q) and outcome Y.
struct MediationDataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd A;
  Eigen::MatrixXd M;
  Eigen::VectorXd Y;
  std::vector<std::string> mediator_names;
  std::vector<std::string> covariate_names;
  std::string exposure_name = "A";
  std::string outcome_name = "Y";

  [[nodiscard]] Index n() const { return A.size(); }
  [[nodiscard]] Index p() const { return X.cols(); }
  [[nodiscard]] Index q() const { return M.cols(); }

  /// Throws DataError unless n >= 1, q >= 1, shapes agree and all values are finite.
  void validate() const;
};

/// Fills default names (X1.., M1..) where names are missing.
void assign_default_names(MediationDataset& data);

/// Maps CSV column names to roles. `mediators` empty with `mediators_rest`
/// set means "every column that has no other role and is not ignored".
struct ColumnSchema {
  std::string exposure;
  std::string outcome;
  std::vector<std::string> mediators;
  std::vector<std::string> covariates;
  std::vector<std::string> ignored;
  bool mediators_rest = false;
};

MediationDataset load_dataset(const std::filesystem::path& path, const ColumnSchema& schema);

/// Writes covariates, exposure, mediators, outcome in that column order with
/// shortest round-trip number formatting.
void save_dataset(const MediationDataset& data, const std::filesystem::path& path);

/// Schema matching the column layout written by save_dataset.
ColumnSchema schema_for(const MediationDataset& data);

/// Reads one column of a CSV file as raw strings (e.g. substudy labels).
std::vector<std::string> read_text_column(const std::filesystem::path& path, const std::string& name);

struct PreprocessOptions {
  double log_transform_abs_skewness_threshold = 2.0;
  std::optional<std::vector<std::string>> zscore_groups;
  bool inverse_normal_exposure = false;
};

struct PreprocessReport {
  std::vector<std::string> log_transformed;
  std::vector<std::string> groups;
  bool exposure_inverse_normal = false;
};

struct PreprocessResult {
  MediationDataset data;
  PreprocessReport report;
};

/// Log-transforms highly skewed mediators, z-scores every mediator within
/// groups, and optionally rank-inverse-normal transforms the exposure.
PreprocessResult preprocess(const MediationDataset& data, const PreprocessOptions& opts);

/// Moment skewness m3 / m2^(3/2).
double sample_skewness(const Eigen::Ref<const Eigen::VectorXd>& x);

/// Phi^{-1}((rank - 0.5) / n) with average ranks for ties.
Eigen::VectorXd inverse_normal_transform(const Eigen::Ref<const Eigen::VectorXd>& x);

/// Linearly interpolated sample quantile (R type 7), prob in [0, 1].
double sample_quantile(const Eigen::Ref<const Eigen::VectorXd>& x, double prob);

}  // namespace bvsmed
