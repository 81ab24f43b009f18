#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"

#include "bvsmed/dataset.hpp"
#include "bvsmed/error.hpp"
#include "bvsmed/rng.hpp"
#include "bvsmed/scenario.hpp"

using namespace bvsmed;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("bvsmed_core_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path;
}

ColumnSchema basic_schema() {
  ColumnSchema s;
  s.exposure = "A";
  s.outcome = "Y";
  s.mediators = {"M1", "M2"};
  s.covariates = {"X1"};
  return s;
}

template <class F>
std::string error_text(F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

// Ordinary least squares of y on the columns of x (no intercept).
Eigen::VectorXd ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  return (x.transpose() * x).ldlt().solve(x.transpose() * y);
}

double correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::ArrayXd da = a.array() - a.mean(), db = b.array() - b.mean();
  return (da * db).sum() / std::sqrt(da.square().sum() * db.square().sum());
}

}  // namespace

TEST_CASE("load_dataset maps roles and keeps mediator order") {
  const fs::path dir = scratch_dir("load");
  const fs::path csv = write_file(dir / "d.csv",
                                  "X1,M2,A,M1,Y\n"
                                  "1,10,0.5,20,3\n"
                                  "2,11,0.6,21,4\n"
                                  "3,12,0.7,22,5\n"
                                  "4,13,0.8,23,6\n");
  const MediationDataset d = load_dataset(csv, basic_schema());
  CHECK(d.n() == 4);
  CHECK(d.q() == 2);
  CHECK(d.p() == 1);
  CHECK(d.mediator_names == std::vector<std::string>{"M1", "M2"});
  CHECK(d.M(0, 0) == 20.0);
  CHECK(d.M(3, 1) == 13.0);
  CHECK(d.A(2) == 0.7);
  CHECK(d.Y(1) == 4.0);
  CHECK(d.X(3, 0) == 4.0);
}

TEST_CASE("load_dataset mediators 'rest' takes the unassigned columns") {
  const fs::path dir = scratch_dir("rest");
  const fs::path csv = write_file(dir / "d.csv", "id,A,Y,Ma,Mb,Mc\n1,0,1,2,3,4\n2,1,2,3,4,5\n");
  ColumnSchema s;
  s.exposure = "A";
  s.outcome = "Y";
  s.ignored = {"id"};
  s.mediators_rest = true;
  const MediationDataset d = load_dataset(csv, s);
  CHECK(d.mediator_names == std::vector<std::string>{"Ma", "Mb", "Mc"});
  CHECK(d.p() == 0);
}

TEST_CASE("load_dataset rejects bad input with a useful message") {
  const fs::path dir = scratch_dir("errors");
  SUBCASE("NA in a mediator cell names the cell") {
    const fs::path csv = write_file(dir / "na.csv", "A,Y,M1,M2,X1\n1,2,3,4,5\n1,2,NA,4,5\n");
    CHECK_THROWS_AS(load_dataset(csv, basic_schema()), DataError);
    const std::string msg = error_text([&] { load_dataset(csv, basic_schema()); });
    CHECK(msg.find("row 2") != std::string::npos);
    CHECK(msg.find("M1") != std::string::npos);
  }
  SUBCASE("infinite value") {
    const fs::path csv = write_file(dir / "inf.csv", "A,Y,M1,M2,X1\n1,2,3,inf,5\n");
    CHECK_THROWS_AS(load_dataset(csv, basic_schema()), DataError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_dataset(dir / "nope.csv", basic_schema()), DataError);
  }
  SUBCASE("missing column") {
    const fs::path csv = write_file(dir / "miss.csv", "A,Y,M1,X1\n1,2,3,5\n");
    const std::string msg = error_text([&] { load_dataset(csv, basic_schema()); });
    CHECK(msg.find("M2") != std::string::npos);
    CHECK_THROWS_AS(load_dataset(csv, basic_schema()), DataError);
  }
  SUBCASE("duplicate column") {
    const fs::path csv = write_file(dir / "dup.csv", "A,Y,M1,M2,M1,X1\n1,2,3,4,3,5\n");
    CHECK_THROWS_AS(load_dataset(csv, basic_schema()), DataError);
  }
  SUBCASE("a column with two roles") {
    ColumnSchema s = basic_schema();
    s.covariates = {"M1"};
    const fs::path csv = write_file(dir / "roles.csv", "A,Y,M1,M2\n1,2,3,4\n");
    CHECK_THROWS_AS(load_dataset(csv, s), ConfigError);
  }
}

TEST_CASE("save then load of a Scenario-II dataset is bit-identical") {
  const GeneratedScenario g = generate_scenario(scenario_preset("II-small", 11));
  const fs::path dir = scratch_dir("roundtrip");
  save_dataset(g.data, dir / "d.csv");
  const MediationDataset back = load_dataset(dir / "d.csv", schema_for(g.data));
  CHECK(back.mediator_names == g.data.mediator_names);
  CHECK(back.covariate_names == g.data.covariate_names);
  CHECK((back.M.array() == g.data.M.array()).all());
  CHECK((back.X.array() == g.data.X.array()).all());
  CHECK((back.A.array() == g.data.A.array()).all());
  CHECK((back.Y.array() == g.data.Y.array()).all());
}

TEST_CASE("sample_skewness") {
  CHECK(sample_skewness(Eigen::Vector3d(-1.0, 0.0, 1.0)) == doctest::Approx(0.0));
  // m2 = 3/16, m3 = 3/32.
  const double expected = (3.0 / 32.0) / std::pow(3.0 / 16.0, 1.5);
  CHECK(sample_skewness(Eigen::Vector4d(0.0, 0.0, 0.0, 1.0)) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(1.1547).epsilon(1e-4));

  Rng rng(5, 0);
  Eigen::VectorXd x(40);
  for (Index i = 0; i < x.size(); ++i) x(i) = std::exp(rng.normal());
  CHECK(sample_skewness(-x) == doctest::Approx(-sample_skewness(x)).epsilon(1e-12));

  CHECK_THROWS_AS(sample_skewness(Eigen::Vector2d(1.0, 2.0)), DataError);
  CHECK_THROWS_AS(sample_skewness(Eigen::Vector3d(2.0, 2.0, 2.0)), DataError);
}

TEST_CASE("inverse_normal_transform") {
  const Eigen::VectorXd z = inverse_normal_transform((Eigen::VectorXd(5) << 1, 2, 3, 4, 5).finished());
  CHECK(z(0) == doctest::Approx(-1.2816).epsilon(1e-4));
  CHECK(z(1) == doctest::Approx(-0.5244).epsilon(1e-4));
  CHECK(std::abs(z(2)) < 1e-12);
  CHECK(z(3) == doctest::Approx(0.5244).epsilon(1e-4));
  CHECK(z(4) == doctest::Approx(1.2816).epsilon(1e-4));

  // Ties share the average rank.
  const Eigen::VectorXd t = inverse_normal_transform((Eigen::VectorXd(4) << 3, 1, 3, 2).finished());
  CHECK(t(0) == t(2));
  CHECK(t(1) < t(3));
  CHECK(t(3) < t(0));
}

TEST_CASE("sample_quantile interpolates") {
  const Eigen::VectorXd x = (Eigen::VectorXd(5) << 5, 1, 4, 2, 3).finished();
  CHECK(sample_quantile(x, 0.0) == 1.0);
  CHECK(sample_quantile(x, 1.0) == 5.0);
  CHECK(sample_quantile(x, 0.5) == 3.0);
  CHECK(sample_quantile(x, 0.125) == doctest::Approx(1.5));
  CHECK_THROWS_AS(sample_quantile(x, 1.5), ConfigError);
}

TEST_CASE("preprocess") {
  MediationDataset d;
  d.X.resize(6, 0);
  d.A = (Eigen::VectorXd(6) << 1, 2, 3, 4, 5, 6).finished();
  d.Y = Eigen::VectorXd::Zero(6);
  d.M.resize(6, 2);
  d.M.col(0) << -2, -1, 0, 0, 1, 2;          // symmetric
  d.M.col(1) << 1, 1, 1, 1, 1, 1000;         // skewness 1.7889 < 2 at n = 6
  assign_default_names(d);

  SUBCASE("symmetric column is z-scored, not logged") {
    const PreprocessResult r = preprocess(d, {});
    CHECK(r.report.log_transformed.empty());
    CHECK(std::abs(r.data.M.col(0).mean()) < 1e-12);
    const double var = (r.data.M.col(0).array() - r.data.M.col(0).mean()).square().sum() / 5.0;
    CHECK(var == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((r.data.A.array() == d.A.array()).all());
  }

  SUBCASE("skewed column is logged") {
    MediationDataset s = d;
    s.M.resize(12, 1);
    s.M.col(0) << 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1000;  // skewness 3.015
    s.A.resize(12);
    s.A.setLinSpaced(1, 12);
    s.Y = Eigen::VectorXd::Zero(12);
    s.X.resize(12, 0);
    s.mediator_names = {"M1"};
    const PreprocessResult r = preprocess(s, {});
    CHECK(r.report.log_transformed == std::vector<std::string>{"M1"});
    s.M(0, 0) = -1.0;
    CHECK_THROWS_AS(preprocess(s, {}), DataError);
  }

  SUBCASE("zero variance within a group") {
    MediationDataset z = d;
    z.M.col(1) << 1, 1, 1, 2, 3, 4;
    PreprocessOptions opts;
    opts.zscore_groups = std::vector<std::string>{"a", "a", "a", "b", "b", "b"};
    CHECK_THROWS_AS(preprocess(z, opts), DataError);
    z.M.col(1) << 1, 2, 3, 2, 2, 2;
    CHECK_THROWS_AS(preprocess(z, opts), DataError);
    z.M.col(1) << 1, 2, 3, 2, 4, 3;
    const PreprocessResult r = preprocess(z, opts);
    CHECK(r.report.groups == std::vector<std::string>{"a", "b"});
    CHECK(std::abs(r.data.M.col(1).head(3).mean()) < 1e-12);
    CHECK(std::abs(r.data.M.col(1).tail(3).mean()) < 1e-12);
  }

  SUBCASE("singleton group is rejected") {
    PreprocessOptions opts;
    opts.zscore_groups = std::vector<std::string>{"a", "a", "a", "a", "a", "b"};
    CHECK_THROWS_AS(preprocess(d, opts), DataError);
  }

  SUBCASE("inverse-normal exposure") {
    PreprocessOptions opts;
    opts.inverse_normal_exposure = true;
    const PreprocessResult r = preprocess(d, opts);
    CHECK(r.report.exposure_inverse_normal);
    CHECK(r.data.A(0) == doctest::Approx(-1.3830).epsilon(1e-4));  // Phi^-1(0.5 / 6)
  }

  SUBCASE("idempotent on z-scored low-skew data") {
    const GeneratedScenario g = generate_scenario(scenario_preset("II-small", 2));
    const PreprocessResult once = preprocess(g.data, {});
    CHECK(once.report.log_transformed.empty());
    const PreprocessResult twice = preprocess(once.data, {});
    CHECK((twice.data.M - once.data.M).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("Scenario I preset matches the design") {
  const ScenarioSpec s = scenario_preset("I", 1);
  CHECK(s.n == 1000);
  CHECK(s.q == 300);
  CHECK(s.p == 5);
  CHECK(s.tau_true(0) == -0.12);
  CHECK(s.tau_true(29) == 0.12);
  CHECK(s.tau_true(30) == 0.0);
  CHECK(s.delta_true(0) == 0.5);
  CHECK(s.delta_true(2) == 1.5);
  CHECK(s.delta_true(3) == 0.0);
  const TrueActiveSets t = true_active_sets(s);
  CHECK(t.gamma_true.count() == 30);
  CHECK(t.joint_true.count() == 18);
  for (Index j = 0; j < s.q; ++j) CHECK((!t.joint_true(j) || t.gamma_true(j)));

  const GeneratedScenario g = generate_scenario(s);
  CHECK(g.data.n() == 1000);
  CHECK(g.data.q() == 300);
  CHECK(g.truth.joint_true.count() == 18);
}

TEST_CASE("Scenario III has no true pathways") {
  for (const char* name : {"III", "III-small"}) {
    const TrueActiveSets t = true_active_sets(scenario_preset(name, 1));
    CHECK(t.gamma_true.count() == 0);
    CHECK(t.joint_true.count() == 0);
  }
}

TEST_CASE("small presets") {
  const ScenarioSpec s = scenario_preset("I-small", 1);
  CHECK(s.n == 400);
  CHECK(s.q == 60);
  const TrueActiveSets t = true_active_sets(s);
  CHECK(t.gamma_true.count() == 12);
  CHECK(t.joint_true.count() == 8);
  CHECK_THROWS_AS(scenario_preset("V", 1), ConfigError);
}

TEST_CASE("Scenario II generating covariance is exactly diagonal") {
  const ScenarioSpec s = scenario_preset("II", 1);
  const Eigen::MatrixXd expected = s.sigma_sq_Sigma_true * Eigen::MatrixXd::Identity(s.q, s.q);
  CHECK((generating_covariance(s).array() == expected.array()).all());
}

TEST_CASE("generated data follow the design at large n") {
  ScenarioSpec s = scenario_preset("II", 7);
  s.n = 5000;
  const GeneratedScenario g = generate_scenario(s);

  // Exposure model A = X l + N(0, 1).
  const Eigen::VectorXd l_hat = ols(g.data.X, g.data.A);
  CHECK((l_hat - s.l).cwiseAbs().maxCoeff() < 0.1);

  // Mediator residuals under the true coefficients are uncorrelated.
  Eigen::MatrixXd resid = g.data.M;
  for (Index i = 0; i < s.n; ++i) {
    resid.row(i) -= (s.beta0_true + s.tau_true * g.data.A(i) + s.B_true.transpose() * g.data.X.row(i).transpose())
                        .transpose();
  }
  for (const auto& [r, j] : std::vector<std::pair<Index, Index>>{{0, 1}, {0, 29}, {5, 200}, {298, 299}}) {
    CHECK(std::abs(correlation(resid.col(r), resid.col(j))) < 0.1);
  }
  CHECK(resid.col(3).squaredNorm() / static_cast<double>(s.n) == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("factor covariance induces the stated correlation") {
  ScenarioSpec s = scenario_preset("I-small", 3);
  s.n = 5000;
  const GeneratedScenario g = generate_scenario(s);
  Eigen::MatrixXd resid = g.data.M;
  for (Index i = 0; i < s.n; ++i) {
    resid.row(i) -= (s.beta0_true + s.tau_true * g.data.A(i) + s.B_true.transpose() * g.data.X.row(i).transpose())
                        .transpose();
  }
  double mean_corr = 0.0;
  int pairs = 0;
  for (Index r = 0; r < 10; ++r)
    for (Index j = r + 1; j < 10; ++j, ++pairs) mean_corr += correlation(resid.col(r), resid.col(j));
  CHECK(mean_corr / pairs == doctest::Approx(0.1225 / 1.1225).epsilon(0.15));
}

TEST_CASE("generate_scenario is deterministic per seed") {
  const GeneratedScenario a = generate_scenario(scenario_preset("I-small", 4));
  const GeneratedScenario b = generate_scenario(scenario_preset("I-small", 4));
  const GeneratedScenario c = generate_scenario(scenario_preset("I-small", 5));
  CHECK((a.data.M.array() == b.data.M.array()).all());
  CHECK((a.data.Y.array() == b.data.Y.array()).all());
  CHECK((a.data.X.array() == b.data.X.array()).all());
  CHECK_FALSE((a.data.M.array() == c.data.M.array()).all());
}

TEST_CASE("IV-like scenario") {
  const Index q = 40;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(q, q) * 0.5;
  cov(0, 39) = cov(39, 0) = 0.4;

  SUBCASE("permutation moves entries") {
    std::vector<Index> perm(q);
    for (Index k = 0; k < q; ++k) perm[k] = q - 1 - k;
    const ScenarioSpec s = scenario_iv_like(cov, perm, 1);
    CHECK(s.n == 466);
    CHECK(s.p == 3);
    CHECK((*s.covariance)(39, 0) == 0.4);
    const GeneratedScenario g = generate_scenario(s);
    CHECK(g.truth.joint_true.count() == 18);
  }
  SUBCASE("bad permutation") {
    std::vector<Index> perm(q, 0);
    CHECK_THROWS_AS(scenario_iv_like(cov, perm, 1), ConfigError);
  }
  SUBCASE("not positive definite") {
    Eigen::MatrixXd bad = cov;
    bad(1, 2) = bad(2, 1) = 5.0;
    CHECK_THROWS_AS(generate_scenario(scenario_iv_like(bad, std::nullopt, 1)), ConfigError);
  }
}
