#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "chase/adaptive.hpp"
#include "chase/channel.hpp"
#include "chase/field.hpp"
#include "chase/sensing.hpp"
#include "chase/solver.hpp"

namespace chase {

enum class Study {
  SingleRun,
  SensorsVsK,
  StartSweep,
  AlphaSweep,
  Convergence,
  Noise,
};

enum class Method { IC, CC, Baseline };

std::string to_string(Study study);
std::string to_string(Method method);
Study study_from_string(const std::string& name);
Method method_from_string(const std::string& name);

struct ExperimentConfig {
  Study study = Study::SingleRun;

  // Field
  int side_len = 15;
  double grid_size_m = 30.0;
  double amp_min = 30.0;
  double amp_max = 500.0;
  int num_sensors = 100;
  PlacementMode placement;

  // Channel
  double beta = 3.0;
  double sigma0 = 0.5;
  double d_min_m = 0.0;  // 0 derives grid_size_m / 2

  ChasingConfig chasing;
  SolverConfig solver;

  // Sweeps
  std::vector<int> k_list{5, 10, 15, 20};
  std::vector<double> snr_list{15.0, 25.0, 35.0};
  std::vector<double> alpha_list{0.01, 0.1, 1.0, 5.0, 20.0};
  std::vector<double> m0_list{1.0, 2.0, 3.0, 4.0};

  int trials_per_point = 25;
  std::uint64_t base_seed = 1234567;
  std::string output_dir = "out";
  double accuracy_sad_tol = 1e-3;
  std::optional<Method> only_method;
  // Measurement noise for single_run (the noise study sweeps snr_list).
  std::optional<double> run_snr_db;
};

// Desk-scale defaults chosen so the full study suite runs in minutes.
ExperimentConfig desk_preset();
// Full-size setup: 30x30 grids, 400 sensors, larger sparsity range.
ExperimentConfig paper_preset();

ExperimentConfig config_from_json(const nlohmann::json& j,
                                  const ExperimentConfig& base);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

struct TrialResult {
  double sad = 0.0;
  int m_used = 0;
  int rounds = 0;
  bool converged = false;
  double wall_ms = 0.0;
};

// Sum of absolute differences, the reconstruction-error metric.
double sad(const Eigen::VectorXd& s_hat, const Eigen::VectorXd& s);

// Deterministic per-trial seed: base + point * 10007 + trial. Injective for
// trial < 10007 (every point uses fewer trials than the stride), so any
// single trial can be replayed in isolation.
std::uint64_t trial_seed(std::uint64_t base_seed, int point_index,
                         int trial_index);

// Conventional one-shot recovery: M random sensors, one solve.
TrialResult baseline_oneshot(const GridField& field,
                             const ChannelMatrix& channel,
                             const NoiseSpec& noise, int m,
                             const SolverConfig& solver_cfg,
                             std::uint64_t rng_seed);

// Least total sensor count a method needs for SAD <= accuracy_sad_tol:
// adaptive methods run to termination and report their final count (failed
// trials count as the full deployment size); the baseline binary-searches
// the one-shot M. Returns the median over trials; per-trial results land in
// `rows` when provided.
int min_sensors_for_accuracy(Method method, const ExperimentConfig& cfg,
                             int k, int point_index,
                             std::vector<TrialResult>* rows = nullptr);

struct PointSpec {
  std::string label;
  int index = 0;
  int k = 0;
  Method method = Method::IC;
  PlacementMode placement;
  double alpha_pct = 1.0;
  double m0_factor = 2.0;
  std::optional<double> snr_db;
  int m_budget = 0;
};

struct PointResult {
  PointSpec spec;
  std::vector<TrialResult> trials;
};

struct StudyResult {
  std::vector<PointResult> points;
};

// Executes the configured study and writes trials.csv, aggregate.csv and
// summary.json (plus study-specific extras) under cfg.output_dir.
StudyResult run_study(const ExperimentConfig& cfg);

}  // namespace chase
