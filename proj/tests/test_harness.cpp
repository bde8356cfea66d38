#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chase/errors.hpp"
#include "chase/harness.hpp"
#include "chase/toml_lite.hpp"

using namespace chase;

namespace {

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

std::string fresh_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("chase_test_" + tag);
  std::filesystem::remove_all(dir);
  return dir.string();
}

ExperimentConfig tiny_config(const std::string& tag) {
  ExperimentConfig cfg = desk_preset();
  cfg.side_len = 6;
  cfg.num_sensors = 14;
  cfg.k_list = {2};
  cfg.snr_list = {20.0};
  cfg.alpha_list = {0.5, 1.0, 5.0};
  cfg.m0_list = {1.0, 2.0};
  cfg.trials_per_point = 3;
  cfg.chasing.max_rounds = 25;
  cfg.base_seed = 4242;
  cfg.output_dir = fresh_dir(tag);
  return cfg;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("sad examples") {
  Eigen::VectorXd a(2), b(2);
  a << 1.0, 0.0;
  b << 0.0, 2.0;
  CHECK(sad(a, a) == 0.0);
  CHECK(sad(a, b) == 3.0);
  Eigen::VectorXd c(3);
  CHECK_THROWS_AS(sad(a, c), DimensionError);

  Eigen::VectorXd u(50), v(50);
  for (int i = 0; i < 50; ++i) {
    u[i] = std::sin(i * 0.77);
    v[i] = std::cos(i * 1.3);
  }
  double manual = 0.0;
  for (int i = 0; i < 50; ++i) manual += std::abs(u[i] - v[i]);
  CHECK(sad(u, v) == doctest::Approx(manual).epsilon(1e-12));
}

TEST_CASE("trial seed mapping is injective over points and trials") {
  std::set<std::uint64_t> seen;
  for (int point = 0; point < 60; ++point)
    for (int trial = 0; trial < 100; ++trial)
      CHECK(seen.insert(trial_seed(90210, point, trial)).second);
}

TEST_CASE("baseline guards and determinism") {
  const GridField f = generate_field(5, 30.0, 2, {30.0, 500.0},
                                     PlacementMode::uniform(), 20, 6);
  const ChannelMatrix ch = build_channel(f, 3.0, 0.5, 15.0, 7);
  SolverConfig solver;
  solver.nonneg = false;

  CHECK_THROWS_AS(baseline_oneshot(f, ch, NoiseSpec::none(), 0, solver, 1),
                  ConfigError);
  CHECK_THROWS_AS(baseline_oneshot(f, ch, NoiseSpec::none(), 21, solver, 1),
                  ConfigError);

  const TrialResult a = baseline_oneshot(f, ch, NoiseSpec::none(), 12, solver, 9);
  const TrialResult b = baseline_oneshot(f, ch, NoiseSpec::none(), 12, solver, 9);
  CHECK(a.sad == b.sad);
  CHECK(a.m_used == 12);
  CHECK(a.rounds == 1);
}

TEST_CASE("full sensor coverage recovers the signal") {
  // Every grid hosts a sensor: the system is square and fully determined.
  const GridField f = generate_field(4, 30.0, 3, {30.0, 500.0},
                                     PlacementMode::uniform(), 16, 15);
  const ChannelMatrix ch = build_channel(f, 3.0, 0.5, 15.0, 16);
  SolverConfig solver;
  solver.nonneg = false;
  const TrialResult r = baseline_oneshot(f, ch, NoiseSpec::none(), 16, solver, 2);
  CHECK(r.sad < 1e-4);
}

TEST_CASE("min sensors with a sensor in every grid stays near 2k") {
  ExperimentConfig cfg = desk_preset();
  cfg.side_len = 6;
  cfg.num_sensors = 36;  // sensor in the source grid guaranteed
  cfg.k_list = {1};
  cfg.trials_per_point = 5;
  cfg.base_seed = 11;
  const int m = min_sensors_for_accuracy(Method::IC, cfg, 1, 0);
  CHECK(m <= 2 + 4);
}

TEST_CASE("run_study writes consistent artifacts for every study") {
  const struct {
    Study study;
    const char* tag;
  } cases[] = {
      {Study::SingleRun, "single"},   {Study::SensorsVsK, "svk"},
      {Study::StartSweep, "start"},   {Study::AlphaSweep, "alpha"},
      {Study::Convergence, "conv"},   {Study::Noise, "noise"},
  };
  for (const auto& c : cases) {
    CAPTURE(c.tag);
    ExperimentConfig cfg = tiny_config(c.tag);
    cfg.study = c.study;
    const StudyResult result = run_study(cfg);
    REQUIRE(!result.points.empty());

    const auto trials = read_csv(cfg.output_dir + "/trials.csv");
    REQUIRE(trials.size() >= 2);
    CHECK(trials[0][0] == "study");
    // Row count equals sweep points x trials exactly.
    CHECK(trials.size() - 1 ==
          result.points.size() * cfg.trials_per_point);

    // Aggregates recomputed from the per-trial rows match.
    const auto aggregate = read_csv(cfg.output_dir + "/aggregate.csv");
    REQUIRE(aggregate.size() - 1 == result.points.size());
    std::map<std::string, std::vector<double>> sads;
    for (std::size_t i = 1; i < trials.size(); ++i)
      sads[trials[i][1]].push_back(std::stod(trials[i][8]));
    for (std::size_t i = 1; i < aggregate.size(); ++i) {
      const auto& values = sads.at(aggregate[i][1]);
      double mean = 0.0;
      for (const double v : values) mean += v;
      mean /= values.size();
      CHECK(std::stod(aggregate[i][5]) == doctest::Approx(mean).epsilon(1e-9));
    }

    std::ifstream summary(cfg.output_dir + "/summary.json");
    REQUIRE(summary.good());
    const auto j = nlohmann::json::parse(summary);
    CHECK(j.at("study") == to_string(c.study));
    CHECK(j.at("points").size() == result.points.size());

    if (c.study == Study::SingleRun)
      CHECK(std::filesystem::exists(cfg.output_dir + "/trace.jsonl"));
    if (c.study == Study::Convergence)
      CHECK(std::filesystem::exists(cfg.output_dir +
                                    "/convergence_trace.csv"));
    std::filesystem::remove_all(cfg.output_dir);
  }
}

TEST_CASE("study rows are reproducible for a fixed base seed") {
  ExperimentConfig cfg = tiny_config("repro");
  cfg.study = Study::Convergence;
  const StudyResult a = run_study(cfg);
  const StudyResult b = run_study(cfg);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t p = 0; p < a.points.size(); ++p)
    for (int t = 0; t < cfg.trials_per_point; ++t) {
      CHECK(a.points[p].trials[t].sad == b.points[p].trials[t].sad);
      CHECK(a.points[p].trials[t].m_used == b.points[p].trials[t].m_used);
    }
  std::filesystem::remove_all(cfg.output_dir);
}

TEST_CASE("config json round trip") {
  ExperimentConfig cfg = desk_preset();
  cfg.study = Study::Noise;
  cfg.placement = PlacementMode::clustered(3, 2.0);
  cfg.chasing.algorithm = ChasingAlgorithm::Centroid;
  cfg.only_method = Method::Baseline;
  cfg.run_snr_db = 25.0;
  const ExperimentConfig back =
      config_from_json(config_to_json(cfg), desk_preset());
  CHECK(back.study == Study::Noise);
  CHECK(back.placement.kind == PlacementMode::Kind::Clustered);
  CHECK(back.placement.num_clusters == 3);
  CHECK(back.chasing.algorithm == ChasingAlgorithm::Centroid);
  CHECK(back.only_method == Method::Baseline);
  CHECK(back.run_snr_db == 25.0);
}

TEST_CASE("toml configs parse into the json schema") {
  const std::string text = R"(
# experiment setup
study = "noise"          # sweep snr_list
side_len = 15
trials_per_point = 10
k_list = [5, 10]
snr_list = [15.0, 25.0, 35.0]

[chasing]
alpha_pct = 1.0
algorithm = "ic"

[solver]
nonneg = false
)";
  const nlohmann::json j = toml_lite_parse(text);
  CHECK(j.at("study") == "noise");
  CHECK(j.at("side_len") == 15);
  CHECK(j.at("k_list") == nlohmann::json({5, 10}));
  CHECK(j.at("chasing").at("alpha_pct") == 1.0);
  CHECK(j.at("solver").at("nonneg") == false);

  const ExperimentConfig cfg = config_from_json(j, desk_preset());
  CHECK(cfg.study == Study::Noise);
  CHECK(cfg.trials_per_point == 10);
  CHECK(cfg.k_list == std::vector<int>{5, 10});

  CHECK_THROWS_AS(toml_lite_parse("key 5"), ConfigError);
  CHECK_THROWS_AS(toml_lite_parse("key = [1, 2"), ConfigError);
}

}  // TEST_SUITE
