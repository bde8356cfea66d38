#include "chase/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "chase/errors.hpp"
#include "chase/rng.hpp"

namespace chase {

Eigen::VectorXd trim(const Eigen::VectorXd& s_hat, double alpha_pct) {
  if (alpha_pct <= 0.0 || alpha_pct >= 100.0)
    throw ConfigError("trim: alpha_pct must lie in (0, 100)");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(s_hat.size());
  double max_positive = 0.0;
  for (Eigen::Index i = 0; i < s_hat.size(); ++i)
    max_positive = std::max(max_positive, s_hat[i]);
  if (max_positive <= 0.0) return out;
  const double threshold = (alpha_pct / 100.0) * max_positive;
  for (Eigen::Index i = 0; i < s_hat.size(); ++i)
    if (s_hat[i] > 0.0 && s_hat[i] >= threshold) out[i] = s_hat[i];
  return out;
}

bool check_termination(const Eigen::VectorXd& s_curr_trimmed,
                       const Eigen::VectorXd& s_prev_trimmed,
                       double delta_pct) {
  if (s_curr_trimmed.size() != s_prev_trimmed.size())
    throw DimensionError("check_termination: vector length mismatch");
  if (delta_pct <= 0.0 || delta_pct >= 100.0)
    throw ConfigError("check_termination: delta_pct must lie in (0, 100)");
  const double rel = delta_pct / 100.0;
  for (Eigen::Index i = 0; i < s_curr_trimmed.size(); ++i) {
    const bool curr_nz = s_curr_trimmed[i] != 0.0;
    const bool prev_nz = s_prev_trimmed[i] != 0.0;
    if (curr_nz != prev_nz) return false;
    if (curr_nz && std::abs(s_curr_trimmed[i] - s_prev_trimmed[i]) >
                       rel * std::abs(s_prev_trimmed[i]))
      return false;
  }
  return true;
}

std::vector<int> support_of(const Eigen::VectorXd& v) {
  std::vector<int> support;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v[i] != 0.0) support.push_back(static_cast<int>(i));
  return support;
}

int nearest_sensor(const GridField& field, int grid) {
  if (field.sensor_locations.empty())
    throw ConfigError("nearest_sensor: field has no sensors");
  const Point target = grid_center(grid, field);
  int best = field.sensor_locations.front();
  double best_d = std::numeric_limits<double>::infinity();
  for (const int s : field.sensor_locations) {
    const double d = distance_m(grid_center(s, field), target);
    if (d < best_d) {  // sensors are sorted, so ties keep the lowest index
      best_d = d;
      best = s;
    }
  }
  return best;
}

namespace {

struct KmeansResult {
  std::vector<int> assignment;
  std::vector<Point> centroids;
  double cost = std::numeric_limits<double>::infinity();
};

KmeansResult kmeans_once(const std::vector<Point>& pts, int c, Rng& rng) {
  const int npts = static_cast<int>(pts.size());
  KmeansResult result;
  std::vector<int> init = sample_distinct(rng, npts, c);
  std::vector<Point> centroids(c);
  for (int t = 0; t < c; ++t) centroids[t] = pts[init[t]];

  std::vector<int> assignment(npts, -1);
  for (int iter = 0; iter < 50; ++iter) {
    bool changed = false;
    for (int p = 0; p < npts; ++p) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int t = 0; t < c; ++t) {
        const double d = distance_m(pts[p], centroids[t]);
        if (d < best_d) {
          best_d = d;
          best = t;
        }
      }
      if (assignment[p] != best) {
        assignment[p] = best;
        changed = true;
      }
    }
    std::vector<double> sx(c, 0.0), sy(c, 0.0);
    std::vector<int> cnt(c, 0);
    for (int p = 0; p < npts; ++p) {
      sx[assignment[p]] += pts[p].x_m;
      sy[assignment[p]] += pts[p].y_m;
      ++cnt[assignment[p]];
    }
    for (int t = 0; t < c; ++t) {
      if (cnt[t] == 0) {
        // Reseed an emptied cluster with the point farthest from its centroid.
        int far_p = 0;
        double far_d = -1.0;
        for (int p = 0; p < npts; ++p) {
          const double d = distance_m(pts[p], centroids[assignment[p]]);
          if (d > far_d) {
            far_d = d;
            far_p = p;
          }
        }
        centroids[t] = pts[far_p];
        changed = true;
      } else {
        centroids[t] = {sx[t] / cnt[t], sy[t] / cnt[t]};
      }
    }
    if (!changed) break;
  }

  double cost = 0.0;
  for (int p = 0; p < npts; ++p)
    cost += distance_m(pts[p], centroids[assignment[p]]);
  result.assignment = std::move(assignment);
  result.centroids = std::move(centroids);
  result.cost = cost / npts;
  return result;
}

std::uint64_t support_hash(const std::vector<int>& support) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const int g : support) h = mix64(h ^ static_cast<std::uint64_t>(g));
  return h;
}

}  // namespace

std::vector<Cluster> cluster_support(const std::vector<int>& support,
                                     const GridField& field) {
  if (support.empty())
    throw EmptySupportError("cluster_support: empty support");

  const int count = static_cast<int>(support.size());
  std::vector<Point> pts(count);
  for (int p = 0; p < count; ++p) pts[p] = grid_center(support[p], field);

  // Search window around the sqrt(|T|/2) starting guess.
  const int c_hi = std::min(
      count, std::max(1, static_cast<int>(std::ceil(
                             2.0 * std::sqrt(count / 2.0)))));
  // Expected nearest-neighbor spacing of |T| uniform points over the field;
  // the grouping scale against which compactness gains must pay for an
  // extra cluster.
  const double spacing =
      0.5 * field.side_len * field.grid_size_m / std::sqrt(double(count));

  Rng rng(support_hash(support));
  KmeansResult best_fit;
  int best_c = 1;
  double best_crit = std::numeric_limits<double>::infinity();
  for (int c = 1; c <= c_hi; ++c) {
    KmeansResult best_restart;
    for (int restart = 0; restart < 10; ++restart) {
      KmeansResult r = kmeans_once(pts, c, rng);
      if (r.cost < best_restart.cost) best_restart = std::move(r);
    }
    const double crit = best_restart.cost + c * spacing;
    if (crit < best_crit) {
      best_crit = crit;
      best_c = c;
      best_fit = std::move(best_restart);
    }
  }

  std::vector<Cluster> clusters(best_c);
  for (int p = 0; p < count; ++p)
    clusters[best_fit.assignment[p]].members.push_back(support[p]);
  std::erase_if(clusters, [](const Cluster& c) { return c.members.empty(); });

  for (auto& cluster : clusters) {
    std::sort(cluster.members.begin(), cluster.members.end());
    double sx = 0.0, sy = 0.0;
    int r0 = field.side_len, r1 = -1, c0 = field.side_len, c1 = -1;
    for (const int g : cluster.members) {
      const Point pt = grid_center(g, field);
      sx += pt.x_m;
      sy += pt.y_m;
      const int row = g / field.side_len;
      const int col = g % field.side_len;
      r0 = std::min(r0, row);
      r1 = std::max(r1, row);
      c0 = std::min(c0, col);
      c1 = std::max(c1, col);
    }
    cluster.centroid_x_m = sx / cluster.members.size();
    cluster.centroid_y_m = sy / cluster.members.size();
    cluster.region_grids = (r1 - r0 + 1) * (c1 - c0 + 1);
  }
  std::sort(clusters.begin(), clusters.end(),
            [](const Cluster& a, const Cluster& b) {
              return a.members.front() < b.members.front();
            });
  return clusters;
}

namespace {

// Drops selections that would push the plan past the sensor budget;
// already-tasked grids pass through freely (take_samples skips them).
std::vector<int> cap_to_budget(const SamplePlan& plan,
                               const std::vector<int>& selections,
                               int budget) {
  if (budget <= 0) return selections;
  std::unordered_set<int> have(plan.tasked.begin(), plan.tasked.end());
  int capacity = budget - plan.m();
  std::vector<int> out;
  for (const int g : selections) {
    if (have.count(g)) continue;
    if (capacity <= 0) break;
    have.insert(g);
    out.push_back(g);
    --capacity;
  }
  return out;
}

// Takes the given samples, reconstructs on the accumulated plan, trims, and
// records the round.
AdaptiveState advance_round(const AdaptiveState& state,
                            const std::vector<int>& selections,
                            const GridField& field,
                            const ChannelMatrix& channel,
                            const NoiseSpec& noise,
                            const SolverConfig& solver_cfg,
                            const ChasingConfig& cfg) {
  AdaptiveState next = state;
  next.round = state.round + 1;

  const Eigen::VectorXd x = propagate(channel, field.signal);
  next.plan = take_samples(
      state.plan, cap_to_budget(state.plan, selections, cfg.m_budget), x,
      noise, field);

  const Eigen::MatrixXd A = effective_sensing_matrix(next.plan, channel);
  const Eigen::VectorXd y = samples_vector(next.plan);
  SolverConfig eff = solver_cfg;
  eff.epsilon =
      std::max(eff.epsilon, suggested_residual_bound(noise, next.plan.samples));
  next.last_recon = l1_reconstruct(A, y, eff);

  const Eigen::VectorXd trimmed = trim(next.last_recon.s_hat, cfg.alpha_pct);
  next.s_hat_prev = trimmed;
  next.support_prev = support_of(trimmed);
  next.history.push_back({next.plan.m(),
                          (trimmed - field.signal).lpNorm<1>(),
                          static_cast<int>(next.support_prev.size())});
  return next;
}

std::vector<int> individual_selections(const AdaptiveState& state,
                                       const GridField& field) {
  std::vector<int> selections;
  std::unordered_set<int> chosen;
  for (const int g : state.support_prev) {
    const int s = nearest_sensor(field, g);
    if (chosen.insert(s).second) selections.push_back(s);
  }
  return selections;
}

std::vector<int> centroid_selections(const AdaptiveState& state,
                                     const GridField& field) {
  std::vector<int> selections;
  std::unordered_set<int> chosen;
  for (const Cluster& cluster : cluster_support(state.support_prev, field)) {
    const int t_count = static_cast<int>(cluster.members.size());
    const double density =
        static_cast<double>(t_count) / cluster.region_grids;
    const int m_t = std::max(
        1, static_cast<int>(std::llround(t_count * (1.0 - density))));

    // All deployed sensors ordered by distance to the cluster centroid,
    // lowest grid index first on ties.
    std::vector<std::pair<double, int>> order;
    order.reserve(field.sensor_locations.size());
    const Point centroid{cluster.centroid_x_m, cluster.centroid_y_m};
    for (const int s : field.sensor_locations)
      order.emplace_back(distance_m(grid_center(s, field), centroid), s);
    const auto take =
        std::min<std::size_t>(m_t, order.size());
    std::partial_sort(order.begin(), order.begin() + take, order.end());
    for (std::size_t i = 0; i < take; ++i)
      if (chosen.insert(order[i].second).second)
        selections.push_back(order[i].second);
  }
  return selections;
}

}  // namespace

AdaptiveState individual_chasing_round(const AdaptiveState& state,
                                       const GridField& field,
                                       const ChannelMatrix& channel,
                                       const NoiseSpec& noise,
                                       const SolverConfig& solver_cfg,
                                       const ChasingConfig& cfg) {
  return advance_round(state, individual_selections(state, field), field,
                       channel, noise, solver_cfg, cfg);
}

AdaptiveState centroid_chasing_round(const AdaptiveState& state,
                                     const GridField& field,
                                     const ChannelMatrix& channel,
                                     const NoiseSpec& noise,
                                     const SolverConfig& solver_cfg,
                                     const ChasingConfig& cfg) {
  return advance_round(state, centroid_selections(state, field), field,
                       channel, noise, solver_cfg, cfg);
}

AdaptiveState random_exploration(const AdaptiveState& state,
                                 const GridField& field,
                                 const ChannelMatrix& channel,
                                 const NoiseSpec& noise, int count,
                                 std::uint64_t rng_seed,
                                 const ChasingConfig& cfg) {
  std::unordered_set<int> have(state.plan.tasked.begin(),
                               state.plan.tasked.end());
  std::vector<int> untasked;
  for (const int s : field.sensor_locations)
    if (!have.count(s)) untasked.push_back(s);
  if (untasked.empty() || count <= 0) return state;

  int take = std::min<int>(count, static_cast<int>(untasked.size()));
  if (cfg.m_budget > 0)
    take = std::min(take, cfg.m_budget - state.plan.m());
  if (take <= 0) return state;

  Rng rng(rng_seed);
  std::vector<int> picks;
  for (const int i :
       sample_distinct(rng, static_cast<int>(untasked.size()), take))
    picks.push_back(untasked[i]);

  AdaptiveState next = state;
  const Eigen::VectorXd x = propagate(channel, field.signal);
  next.plan = take_samples(state.plan, picks, x, noise, field);
  return next;
}

AdaptiveResult run_adaptive(const GridField& field,
                            const ChannelMatrix& channel,
                            const NoiseSpec& noise,
                            const SolverConfig& solver_cfg,
                            const ChasingConfig& cfg,
                            std::uint64_t rng_seed) {
  if (cfg.max_rounds < 1)
    throw ConfigError("run_adaptive: max_rounds must be >= 1");
  const int k = field.sparsity();
  const int sensors = static_cast<int>(field.sensor_locations.size());
  int m0 = static_cast<int>(std::llround(cfg.m0_factor * k));
  m0 = std::clamp(m0, 1, sensors);
  if (cfg.m_budget > 0) m0 = std::min(m0, cfg.m_budget);
  const int explore_count =
      std::max(1, cfg.exploration_count > 0 ? cfg.exploration_count
                                            : (k + 3) / 4);

  AdaptiveResult result;

  // Round 0: random initialization.
  {
    Rng init_rng(derive_seed(rng_seed, 0));
    std::vector<int> initial;
    for (const int i : sample_distinct(init_rng, sensors, m0))
      initial.push_back(field.sensor_locations[i]);
    AdaptiveState blank;
    blank.round = -1;
    result.state = advance_round(blank, initial, field, channel, noise,
                                 solver_cfg, cfg);
  }
  result.trace.push_back({0, result.state.plan.m(),
                          result.state.support_prev,
                          result.state.last_recon.s_hat, false});

  int exploration_events = 0;  // seed counter, every exploration of any kind
  int explorations_used = 0;   // termination-triggered cycles only
  bool explored_pending = false;
  // Trimmed estimate at the previous satisfied check; when a later check
  // reproduces it, exploration has confirmed the answer.
  std::optional<Eigen::VectorXd> satisfied_ref;
  for (int round = 1; round <= cfg.max_rounds; ++round) {
    const Eigen::VectorXd prev_trimmed = *result.state.s_hat_prev;
    const bool trace_explored = explored_pending;
    explored_pending = false;

    if (result.state.support_prev.empty()) {
      // Nothing to chase; sample somewhere new instead.
      result.state = random_exploration(
          result.state, field, channel, noise, explore_count,
          derive_seed(rng_seed, 100 + exploration_events++), cfg);
      result.state = advance_round(result.state, {}, field, channel, noise,
                                   solver_cfg, cfg);
    } else if (cfg.algorithm == ChasingAlgorithm::Individual) {
      result.state = individual_chasing_round(result.state, field, channel,
                                              noise, solver_cfg, cfg);
    } else {
      result.state = centroid_chasing_round(result.state, field, channel,
                                            noise, solver_cfg, cfg);
    }
    result.rounds_run = round;
    result.trace.push_back({round, result.state.plan.m(),
                            result.state.support_prev,
                            result.state.last_recon.s_hat, trace_explored});

    if (check_termination(*result.state.s_hat_prev, prev_trimmed,
                          cfg.delta_pct)) {
      if (explorations_used >= cfg.exploration_cycles) {
        result.converged = true;
        break;
      }
      if (satisfied_ref &&
          check_termination(*result.state.s_hat_prev, *satisfied_ref,
                            cfg.delta_pct)) {
        // Exploring did not change the converged answer.
        result.converged = true;
        break;
      }
      satisfied_ref = *result.state.s_hat_prev;
      const int m_before = result.state.plan.m();
      result.state = random_exploration(
          result.state, field, channel, noise, explore_count,
          derive_seed(rng_seed, 100 + exploration_events++), cfg);
      ++explorations_used;
      if (result.state.plan.m() == m_before) {
        // No sensor left to explore; the check stands.
        result.converged = true;
        break;
      }
      explored_pending = true;
    }
  }

  result.reconstruction = result.state.last_recon;
  return result;
}

std::string trace_to_jsonl(const std::vector<TraceRecord>& trace) {
  std::string out;
  for (const auto& rec : trace) {
    nlohmann::json j;
    j["round"] = rec.round;
    j["m"] = rec.m;
    j["support"] = rec.support;
    std::vector<double> s(rec.s_hat.data(), rec.s_hat.data() + rec.s_hat.size());
    j["s_hat"] = std::move(s);
    j["explored_before_round"] = rec.explored_before_round;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace chase
