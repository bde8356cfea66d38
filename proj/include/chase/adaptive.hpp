#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chase/channel.hpp"
#include "chase/field.hpp"
#include "chase/sensing.hpp"
#include "chase/solver.hpp"

namespace chase {

enum class ChasingAlgorithm { Individual, Centroid };

struct ChasingConfig {
  // Positive estimates below alpha_pct% of the largest are zeroed between
  // rounds.
  double alpha_pct = 1.0;
  // Stop when supports match and per-entry relative change is <= delta_pct%.
  double delta_pct = 5.0;
  // First round tasks round(m0_factor * k) random sensors.
  double m0_factor = 2.0;
  // Sensors tasked by each exploration step; 0 derives ceil(k / 4).
  int exploration_count = 0;
  // Exploration steps allowed before the termination condition is final.
  int exploration_cycles = 1;
  int max_rounds = 50;
  ChasingAlgorithm algorithm = ChasingAlgorithm::Individual;
  // Hard cap on total sensors used (0 = unlimited); lets noise studies
  // compare methods at an equal sensor budget.
  int m_budget = 0;
};

struct AdaptiveState {
  int round = 0;
  SamplePlan plan;
  std::optional<Eigen::VectorXd> s_hat_prev;  // trimmed estimate of the
                                              // latest completed round
  std::vector<int> support_prev;
  struct RoundRecord {
    int m = 0;
    double sad_if_truth_known = 0.0;
    int support_size = 0;
  };
  std::vector<RoundRecord> history;
  Reconstruction last_recon;  // raw solver output of the latest round
};

struct TraceRecord {
  int round = 0;
  int m = 0;
  std::vector<int> support;
  Eigen::VectorXd s_hat;
  bool explored_before_round = false;
};

struct AdaptiveResult {
  Reconstruction reconstruction;  // raw output of the final solve
  AdaptiveState state;            // final state; s_hat_prev is the trimmed
                                  // estimate the run terminated with
  std::vector<TraceRecord> trace;
  bool converged = false;
  int rounds_run = 0;
};

// Zeroes negative entries, then positive entries below alpha_pct% of the
// largest positive entry.
Eigen::VectorXd trim(const Eigen::VectorXd& s_hat, double alpha_pct);

// True iff the nonzero supports are identical and every supported entry
// changed by at most delta_pct% relative to its previous value.
bool check_termination(const Eigen::VectorXd& s_curr_trimmed,
                       const Eigen::VectorXd& s_prev_trimmed,
                       double delta_pct);

std::vector<int> support_of(const Eigen::VectorXd& v);

// Sensor grid in the deployment closest to `grid` by center distance,
// ties broken by the lowest grid index.
int nearest_sensor(const GridField& field, int grid);

struct Cluster {
  std::vector<int> members;  // grid indices, ascending
  double centroid_x_m = 0.0;
  double centroid_y_m = 0.0;
  int region_grids = 0;  // cell count of the minimal bounding rectangle
};

// Groups support grids by centroid clustering (seeded restarts). The cluster
// count is searched around the sqrt(|T|/2) heuristic and selected by average
// centroid distance penalized with C times the expected nearest-neighbor
// spacing of |T| uniform points, which separates groups further apart than
// about half the field diagonal.
std::vector<Cluster> cluster_support(const std::vector<int>& support,
                                     const GridField& field);

// One sampling-and-reconstruction round: tasks the nearest sensor to every
// support grid of the previous estimate.
AdaptiveState individual_chasing_round(const AdaptiveState& state,
                                       const GridField& field,
                                       const ChannelMatrix& channel,
                                       const NoiseSpec& noise,
                                       const SolverConfig& solver_cfg,
                                       const ChasingConfig& cfg);

// One round that clusters the support and tasks, per cluster t,
// max(1, round(|T_t| * (1 - |T_t| / R_t))) sensors nearest its centroid.
AdaptiveState centroid_chasing_round(const AdaptiveState& state,
                                     const GridField& field,
                                     const ChannelMatrix& channel,
                                     const NoiseSpec& noise,
                                     const SolverConfig& solver_cfg,
                                     const ChasingConfig& cfg);

// Tasks min(count, remaining) untasked sensors uniformly at random; no-op
// when every sensor has been used (or the budget is exhausted).
AdaptiveState random_exploration(const AdaptiveState& state,
                                 const GridField& field,
                                 const ChannelMatrix& channel,
                                 const NoiseSpec& noise, int count,
                                 std::uint64_t rng_seed,
                                 const ChasingConfig& cfg);

// Full adaptive loop: random initialization with round(m0_factor * k)
// sensors, chasing rounds until the termination check holds, one random
// exploration cycle to escape local optima, then final termination.
AdaptiveResult run_adaptive(const GridField& field,
                            const ChannelMatrix& channel,
                            const NoiseSpec& noise,
                            const SolverConfig& solver_cfg,
                            const ChasingConfig& cfg, std::uint64_t rng_seed);

// One JSON object per round, newline separated.
std::string trace_to_jsonl(const std::vector<TraceRecord>& trace);

}  // namespace chase
