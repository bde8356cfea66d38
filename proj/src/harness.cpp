#include "chase/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "chase/errors.hpp"
#include "chase/rng.hpp"

namespace chase {

std::string to_string(Study study) {
  switch (study) {
    case Study::SingleRun: return "single_run";
    case Study::SensorsVsK: return "sensors_vs_k";
    case Study::StartSweep: return "start_sweep";
    case Study::AlphaSweep: return "alpha_sweep";
    case Study::Convergence: return "convergence";
    case Study::Noise: return "noise";
  }
  return "unknown";
}

std::string to_string(Method method) {
  switch (method) {
    case Method::IC: return "ic";
    case Method::CC: return "cc";
    case Method::Baseline: return "baseline";
  }
  return "unknown";
}

Study study_from_string(const std::string& name) {
  for (const Study s : {Study::SingleRun, Study::SensorsVsK,
                        Study::StartSweep, Study::AlphaSweep,
                        Study::Convergence, Study::Noise})
    if (to_string(s) == name) return s;
  throw ConfigError("unknown study: " + name);
}

Method method_from_string(const std::string& name) {
  for (const Method m : {Method::IC, Method::CC, Method::Baseline})
    if (to_string(m) == name) return m;
  throw ConfigError("unknown algorithm: " + name);
}

ExperimentConfig desk_preset() {
  // Signal powers are nonnegative, and the nonnegativity constraint is what
  // makes sparse recovery reliable on this channel family, so study runs
  // keep the solver default (nonneg = true).
  return {};
}

ExperimentConfig paper_preset() {
  ExperimentConfig cfg = desk_preset();
  cfg.side_len = 30;
  cfg.num_sensors = 400;
  cfg.k_list = {20, 35, 50, 65, 80};
  return cfg;
}

double sad(const Eigen::VectorXd& s_hat, const Eigen::VectorXd& s) {
  if (s_hat.size() != s.size())
    throw DimensionError("sad: vector length mismatch");
  return (s_hat - s).lpNorm<1>();
}

std::uint64_t trial_seed(std::uint64_t base_seed, int point_index,
                         int trial_index) {
  return base_seed + static_cast<std::uint64_t>(point_index) * 10007ULL +
         static_cast<std::uint64_t>(trial_index);
}

namespace {

constexpr std::uint64_t kFieldStream = 1;
constexpr std::uint64_t kChannelStream = 2;
constexpr std::uint64_t kNoiseStream = 3;
constexpr std::uint64_t kAlgoStream = 4;

double median_of(std::vector<double> values) {
  if (values.empty()) throw ConfigError("median of empty set");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

// Lower median, so the result is always an attained sensor count.
int median_int(std::vector<int> values) {
  if (values.empty()) throw ConfigError("median of empty set");
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

double mean_of(const std::vector<double>& values) {
  double sum = 0.0;
  for (const double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double stddev_of(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  const double mu = mean_of(values);
  double acc = 0.0;
  for (const double v : values) acc += (v - mu) * (v - mu);
  return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

template <typename Fn>
void for_each_trial(int trials, Fn&& fn) {
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < trials; ++t) {
    try {
      fn(t);
    } catch (...) {
#pragma omp critical
      {
        if (!error) error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

PlacementMode clustered_for_k(const ExperimentConfig& cfg, int k) {
  if (cfg.placement.kind == PlacementMode::Kind::Clustered) {
    PlacementMode mode = cfg.placement;
    mode.num_clusters = std::min(mode.num_clusters, std::max(1, k));
    return mode;
  }
  return PlacementMode::clustered(std::max(1, (k + 2) / 5), 2.0);
}

GridField make_field(const ExperimentConfig& cfg, int k,
                     const PlacementMode& placement, std::uint64_t seed) {
  return generate_field(cfg.side_len, cfg.grid_size_m, k,
                        {cfg.amp_min, cfg.amp_max}, placement,
                        cfg.num_sensors, seed);
}

ChannelMatrix make_channel(const ExperimentConfig& cfg, const GridField& field,
                           std::uint64_t seed) {
  const double d_min =
      cfg.d_min_m > 0.0 ? cfg.d_min_m : 0.5 * cfg.grid_size_m;
  return build_channel(field, cfg.beta, cfg.sigma0, d_min, seed);
}

struct TrialSettings {
  int k = 0;
  PlacementMode placement;
  ChasingAlgorithm algorithm = ChasingAlgorithm::Individual;
  double alpha_pct = 1.0;
  double m0_factor = 2.0;
  std::optional<double> snr_db;
  int m_budget = 0;
};

TrialResult run_one_adaptive(const ExperimentConfig& cfg,
                             const TrialSettings& settings,
                             std::uint64_t tseed,
                             AdaptiveResult* full = nullptr) {
  const auto started = std::chrono::steady_clock::now();
  const GridField field =
      make_field(cfg, settings.k, settings.placement,
                 derive_seed(tseed, kFieldStream));
  const ChannelMatrix channel =
      make_channel(cfg, field, derive_seed(tseed, kChannelStream));
  NoiseSpec noise = NoiseSpec::none();
  if (settings.snr_db)
    noise = NoiseSpec::at_snr(*settings.snr_db,
                              derive_seed(tseed, kNoiseStream));

  ChasingConfig chasing = cfg.chasing;
  chasing.algorithm = settings.algorithm;
  chasing.alpha_pct = settings.alpha_pct;
  chasing.m0_factor = settings.m0_factor;
  chasing.m_budget = settings.m_budget;

  const AdaptiveResult run = run_adaptive(field, channel, noise, cfg.solver,
                                          chasing, derive_seed(tseed, kAlgoStream));

  TrialResult result;
  // The algorithm's answer is the trimmed estimate it terminated with.
  result.sad = sad(*run.state.s_hat_prev, field.signal);
  result.m_used = run.state.plan.m();
  result.rounds = run.rounds_run;
  result.converged = run.converged;
  result.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - started)
                       .count();
  if (full) *full = run;
  return result;
}

TrialResult run_one_baseline(const ExperimentConfig& cfg,
                             const TrialSettings& settings, int m,
                             std::uint64_t tseed) {
  const GridField field =
      make_field(cfg, settings.k, settings.placement,
                 derive_seed(tseed, kFieldStream));
  const ChannelMatrix channel =
      make_channel(cfg, field, derive_seed(tseed, kChannelStream));
  NoiseSpec noise = NoiseSpec::none();
  if (settings.snr_db)
    noise = NoiseSpec::at_snr(*settings.snr_db,
                              derive_seed(tseed, kNoiseStream));
  // Selection seed independent of m: a trial's sensor sets grow by prefix
  // across m, so its success is monotone and the threshold search stable.
  return baseline_oneshot(field, channel, noise, m, cfg.solver,
                          derive_seed(tseed, 1000));
}

}  // namespace

TrialResult baseline_oneshot(const GridField& field,
                             const ChannelMatrix& channel,
                             const NoiseSpec& noise, int m,
                             const SolverConfig& solver_cfg,
                             std::uint64_t rng_seed) {
  const int deployment = static_cast<int>(field.sensor_locations.size());
  if (m < 1 || m > deployment)
    throw ConfigError("baseline_oneshot: M must be in [1, " +
                      std::to_string(deployment) + "]");
  const auto started = std::chrono::steady_clock::now();

  Rng rng(rng_seed);
  std::vector<int> picks;
  for (const int i : sample_distinct(rng, deployment, m))
    picks.push_back(field.sensor_locations[i]);

  const Eigen::VectorXd x = propagate(channel, field.signal);
  const SamplePlan plan = take_samples({}, picks, x, noise, field);
  const Eigen::MatrixXd A = effective_sensing_matrix(plan, channel);
  const Eigen::VectorXd y = samples_vector(plan);
  SolverConfig eff = solver_cfg;
  eff.epsilon =
      std::max(eff.epsilon, suggested_residual_bound(noise, plan.samples));
  const Reconstruction rec = l1_reconstruct(A, y, eff);

  TrialResult result;
  result.sad = sad(rec.s_hat, field.signal);
  result.m_used = m;
  result.rounds = 1;
  result.converged = rec.converged;
  result.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - started)
                       .count();
  return result;
}

int min_sensors_for_accuracy(Method method, const ExperimentConfig& cfg,
                             int k, int point_index,
                             std::vector<TrialResult>* rows) {
  if (cfg.accuracy_sad_tol <= 0.0)
    throw ConfigError("min_sensors_for_accuracy: tolerance must be > 0");
  const int trials = cfg.trials_per_point;
  const int deployment = cfg.num_sensors;
  const PlacementMode placement =
      cfg.placement.kind == PlacementMode::Kind::Clustered
          ? clustered_for_k(cfg, k)
          : cfg.placement;

  TrialSettings settings;
  settings.k = k;
  settings.placement = placement;
  settings.alpha_pct = cfg.chasing.alpha_pct;
  settings.m0_factor = cfg.chasing.m0_factor;

  if (method != Method::Baseline) {
    settings.algorithm = method == Method::IC ? ChasingAlgorithm::Individual
                                              : ChasingAlgorithm::Centroid;
    std::vector<TrialResult> results(trials);
    for_each_trial(trials, [&](int t) {
      TrialResult r = run_one_adaptive(
          cfg, settings, trial_seed(cfg.base_seed, point_index, t));
      if (r.sad > cfg.accuracy_sad_tol) r.m_used = deployment;
      results[t] = r;
    });
    std::vector<int> counts;
    for (const auto& r : results) counts.push_back(r.m_used);
    if (rows) *rows = std::move(results);
    return median_int(std::move(counts));
  }

  // One-shot baseline: smallest M at which every trial meets the tolerance
  // (the conventional scheme's cost for reliably accurate reconstruction),
  // searched over [2k, deployment] assuming success is monotone in M.
  auto eval = [&](int m, std::vector<TrialResult>* out) {
    std::vector<TrialResult> results(trials);
    for_each_trial(trials, [&](int t) {
      results[t] = run_one_baseline(
          cfg, settings, m, trial_seed(cfg.base_seed, point_index, t));
    });
    double worst = 0.0;
    for (const auto& r : results) worst = std::max(worst, r.sad);
    if (out) *out = std::move(results);
    return worst;
  };

  int lo = std::min(deployment, std::max(1, 2 * k));
  int hi = deployment;
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    if (eval(mid, nullptr) <= cfg.accuracy_sad_tol)
      hi = mid;
    else
      lo = mid + 1;
  }
  std::vector<TrialResult> final_rows;
  eval(lo, &final_rows);
  if (rows) *rows = std::move(final_rows);
  return lo;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::vector<PointSpec> build_points(const ExperimentConfig& cfg) {
  std::vector<PointSpec> points;
  const auto want = [&](Method m) {
    return !cfg.only_method || *cfg.only_method == m;
  };
  const int k0 = cfg.k_list.empty() ? 0 : cfg.k_list.front();
  if (cfg.k_list.empty())
    throw ConfigError("run_study: k_list must not be empty");

  switch (cfg.study) {
    case Study::SingleRun: {
      PointSpec p;
      p.label = "single";
      p.k = k0;
      p.method = cfg.only_method.value_or(
          cfg.chasing.algorithm == ChasingAlgorithm::Centroid ? Method::CC
                                                              : Method::IC);
      p.placement = cfg.placement;
      p.alpha_pct = cfg.chasing.alpha_pct;
      p.m0_factor = cfg.chasing.m0_factor;
      p.m_budget = cfg.chasing.m_budget;
      p.snr_db = cfg.run_snr_db;
      points.push_back(std::move(p));
      break;
    }
    case Study::SensorsVsK: {
      for (const char* placement : {"uniform", "clustered"}) {
        const bool clustered = std::string(placement) == "clustered";
        for (const Method m : {Method::IC, Method::CC, Method::Baseline}) {
          if (!want(m)) continue;
          for (const int k : cfg.k_list) {
            PointSpec p;
            p.label = std::string(placement) + "/" + to_string(m) +
                      "/k=" + std::to_string(k);
            p.k = k;
            p.method = m;
            p.placement = clustered ? clustered_for_k(cfg, k)
                                    : PlacementMode::uniform();
            p.alpha_pct = cfg.chasing.alpha_pct;
            p.m0_factor = cfg.chasing.m0_factor;
            points.push_back(std::move(p));
          }
        }
      }
      break;
    }
    case Study::StartSweep: {
      const Method m = cfg.only_method.value_or(Method::IC);
      if (m == Method::Baseline)
        throw ConfigError("start_sweep applies to adaptive algorithms only");
      for (const int k : cfg.k_list)
        for (const double m0 : cfg.m0_list) {
          PointSpec p;
          p.label = "m0=" + fmt(m0) + "/k=" + std::to_string(k);
          p.k = k;
          p.method = m;
          p.placement = cfg.placement;
          p.alpha_pct = cfg.chasing.alpha_pct;
          p.m0_factor = m0;
          points.push_back(std::move(p));
        }
      break;
    }
    case Study::AlphaSweep: {
      const Method m = cfg.only_method.value_or(Method::IC);
      if (m == Method::Baseline)
        throw ConfigError("alpha_sweep applies to adaptive algorithms only");
      if (cfg.alpha_list.empty())
        throw ConfigError("run_study: alpha_list must not be empty");
      for (const double alpha : cfg.alpha_list) {
        PointSpec p;
        p.label = "alpha=" + fmt(alpha);
        p.k = k0;
        p.method = m;
        p.placement = cfg.placement;
        p.alpha_pct = alpha;
        p.m0_factor = cfg.chasing.m0_factor;
        points.push_back(std::move(p));
      }
      break;
    }
    case Study::Convergence: {
      const Method m = cfg.only_method.value_or(Method::IC);
      if (m == Method::Baseline)
        throw ConfigError("convergence applies to adaptive algorithms only");
      for (const int k : cfg.k_list) {
        PointSpec p;
        p.label = "k=" + std::to_string(k);
        p.k = k;
        p.method = m;
        p.placement = cfg.placement;
        p.alpha_pct = cfg.chasing.alpha_pct;
        p.m0_factor = cfg.chasing.m0_factor;
        points.push_back(std::move(p));
      }
      break;
    }
    case Study::Noise: {
      if (cfg.snr_list.empty())
        throw ConfigError("run_study: snr_list must not be empty");
      const int budget = cfg.chasing.m_budget > 0
                             ? cfg.chasing.m_budget
                             : std::min(cfg.num_sensors, 5 * k0);
      for (const double snr : cfg.snr_list)
        for (const Method m : {Method::IC, Method::Baseline}) {
          if (!want(m)) continue;
          PointSpec p;
          p.label = "snr=" + fmt(snr) + "/" + to_string(m);
          p.k = k0;
          p.method = m;
          p.placement = cfg.placement;
          p.alpha_pct = cfg.chasing.alpha_pct;
          p.m0_factor = cfg.chasing.m0_factor;
          p.snr_db = snr;
          p.m_budget = budget;
          points.push_back(std::move(p));
        }
      break;
    }
  }
  for (std::size_t i = 0; i < points.size(); ++i)
    points[i].index = static_cast<int>(i);
  return points;
}

struct ConvergenceRow {
  int point;
  int trial;
  int round;
  int m;
  double sad;
};

}  // namespace

StudyResult run_study(const ExperimentConfig& cfg) {
  if (cfg.trials_per_point < 1)
    throw ConfigError("run_study: trials_per_point must be >= 1");
  if (cfg.study != Study::SingleRun && cfg.trials_per_point > 10006)
    throw ConfigError("run_study: trials_per_point exceeds the seed stride");

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec)
    throw IoError("run_study: cannot create output dir " + cfg.output_dir +
                  ": " + ec.message());

  StudyResult result;
  std::vector<ConvergenceRow> convergence_rows;
  std::string trace_jsonl;

  for (const PointSpec& spec : build_points(cfg)) {
    PointResult point;
    point.spec = spec;
    point.trials.resize(cfg.trials_per_point);

    TrialSettings settings;
    settings.k = spec.k;
    settings.placement = spec.placement;
    settings.algorithm = spec.method == Method::CC
                             ? ChasingAlgorithm::Centroid
                             : ChasingAlgorithm::Individual;
    settings.alpha_pct = spec.alpha_pct;
    settings.m0_factor = spec.m0_factor;
    settings.snr_db = spec.snr_db;
    settings.m_budget = spec.m_budget;

    switch (cfg.study) {
      case Study::SensorsVsK: {
        min_sensors_for_accuracy(spec.method, cfg, spec.k, spec.index,
                                 &point.trials);
        break;
      }
      case Study::Noise: {
        for_each_trial(cfg.trials_per_point, [&](int t) {
          const std::uint64_t ts = trial_seed(cfg.base_seed, spec.index, t);
          point.trials[t] = spec.method == Method::Baseline
                                ? run_one_baseline(cfg, settings,
                                                   spec.m_budget, ts)
                                : run_one_adaptive(cfg, settings, ts);
        });
        break;
      }
      case Study::Convergence: {
        std::vector<AdaptiveResult> runs(cfg.trials_per_point);
        for_each_trial(cfg.trials_per_point, [&](int t) {
          point.trials[t] = run_one_adaptive(
              cfg, settings, trial_seed(cfg.base_seed, spec.index, t),
              &runs[t]);
        });
        for (int t = 0; t < cfg.trials_per_point; ++t) {
          const auto& history = runs[t].state.history;
          for (std::size_t r = 0; r < history.size(); ++r)
            convergence_rows.push_back({spec.index, t, static_cast<int>(r),
                                        history[r].m,
                                        history[r].sad_if_truth_known});
        }
        break;
      }
      case Study::SingleRun: {
        AdaptiveResult run;
        for (int t = 0; t < cfg.trials_per_point; ++t) {
          const std::uint64_t ts = trial_seed(cfg.base_seed, spec.index, t);
          if (spec.method == Method::Baseline) {
            const int m = spec.m_budget > 0
                              ? spec.m_budget
                              : std::min(cfg.num_sensors, 5 * spec.k);
            point.trials[t] = run_one_baseline(cfg, settings, m, ts);
          } else {
            point.trials[t] = run_one_adaptive(cfg, settings, ts, &run);
            if (t == 0) trace_jsonl = trace_to_jsonl(run.trace);
          }
        }
        break;
      }
      case Study::StartSweep:
      case Study::AlphaSweep: {
        // These sweeps report the sensor cost of reaching an accurate
        // reconstruction, so the loop keeps exploring until exploration
        // stops changing the answer; a run that still terminates
        // inaccurate costs the whole deployment.
        ExperimentConfig sweep_cfg = cfg;
        sweep_cfg.chasing.exploration_cycles =
            std::max(cfg.chasing.exploration_cycles, cfg.chasing.max_rounds);
        for_each_trial(cfg.trials_per_point, [&](int t) {
          TrialResult r = run_one_adaptive(
              sweep_cfg, settings, trial_seed(cfg.base_seed, spec.index, t));
          if (r.sad > cfg.accuracy_sad_tol) r.m_used = cfg.num_sensors;
          point.trials[t] = r;
        });
        break;
      }
    }
    result.points.push_back(std::move(point));
  }

  // trials.csv
  {
    std::ofstream out(fs::path(cfg.output_dir) / "trials.csv");
    if (!out) throw IoError("run_study: cannot write trials.csv");
    out << "study,point,trial,seed,k,algorithm,m_used,rounds,sad,converged,"
           "wall_ms\n";
    for (const auto& point : result.points)
      for (std::size_t t = 0; t < point.trials.size(); ++t) {
        const auto& r = point.trials[t];
        out << to_string(cfg.study) << ',' << point.spec.label << ',' << t
            << ','
            << trial_seed(cfg.base_seed, point.spec.index, static_cast<int>(t))
            << ',' << point.spec.k << ',' << to_string(point.spec.method)
            << ',' << r.m_used << ',' << r.rounds << ',' << fmt(r.sad) << ','
            << (r.converged ? 1 : 0) << ',' << fmt(r.wall_ms) << '\n';
      }
    if (!out) throw IoError("run_study: write failed for trials.csv");
  }

  // aggregate.csv
  nlohmann::json summary_points = nlohmann::json::array();
  {
    std::ofstream out(fs::path(cfg.output_dir) / "aggregate.csv");
    if (!out) throw IoError("run_study: cannot write aggregate.csv");
    out << "study,point,k,algorithm,trials,mean_sad,median_sad,std_sad,"
           "mean_m,median_m,mean_rounds,converged_rate\n";
    for (const auto& point : result.points) {
      std::vector<double> sads, ms, rounds;
      int converged = 0;
      std::vector<int> ms_int;
      for (const auto& r : point.trials) {
        sads.push_back(r.sad);
        ms.push_back(r.m_used);
        ms_int.push_back(r.m_used);
        rounds.push_back(r.rounds);
        converged += r.converged ? 1 : 0;
      }
      const double converged_rate =
          static_cast<double>(converged) / point.trials.size();
      out << to_string(cfg.study) << ',' << point.spec.label << ','
          << point.spec.k << ',' << to_string(point.spec.method) << ','
          << point.trials.size() << ',' << fmt(mean_of(sads)) << ','
          << fmt(median_of(sads)) << ',' << fmt(stddev_of(sads)) << ','
          << fmt(mean_of(ms)) << ',' << median_int(ms_int) << ','
          << fmt(mean_of(rounds)) << ',' << fmt(converged_rate) << '\n';

      nlohmann::json jp;
      jp["point"] = point.spec.label;
      jp["k"] = point.spec.k;
      jp["algorithm"] = to_string(point.spec.method);
      jp["median_sad"] = median_of(sads);
      jp["median_m"] = median_int(ms_int);
      jp["converged_rate"] = converged_rate;
      summary_points.push_back(std::move(jp));
    }
    if (!out) throw IoError("run_study: write failed for aggregate.csv");
  }

  // summary.json
  {
    std::ofstream out(fs::path(cfg.output_dir) / "summary.json");
    if (!out) throw IoError("run_study: cannot write summary.json");
    nlohmann::json j;
    j["tool"] = "chase-cs";
    j["version"] = "0.1.0";
    j["study"] = to_string(cfg.study);
    j["config"] = config_to_json(cfg);
    j["seed_mapping"] = "trial_seed = base_seed + point_index*10007 + trial";
    j["points"] = std::move(summary_points);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("run_study: write failed for summary.json");
  }

  if (!convergence_rows.empty()) {
    std::ofstream out(fs::path(cfg.output_dir) / "convergence_trace.csv");
    if (!out) throw IoError("run_study: cannot write convergence_trace.csv");
    out << "point,trial,round,m,sad\n";
    for (const auto& row : convergence_rows)
      out << row.point << ',' << row.trial << ',' << row.round << ','
          << row.m << ',' << fmt(row.sad) << '\n';
  }
  if (!trace_jsonl.empty()) {
    std::ofstream out(fs::path(cfg.output_dir) / "trace.jsonl");
    if (!out) throw IoError("run_study: cannot write trace.jsonl");
    out << trace_jsonl;
  }
  return result;
}

ExperimentConfig config_from_json(const nlohmann::json& j,
                                  const ExperimentConfig& base) {
  ExperimentConfig cfg = base;
  const auto get = [&](const char* key, auto& target) {
    if (j.contains(key)) target = j.at(key).get<std::decay_t<decltype(target)>>();
  };
  if (j.contains("study")) cfg.study = study_from_string(j.at("study"));
  get("side_len", cfg.side_len);
  get("grid_size_m", cfg.grid_size_m);
  get("amp_min", cfg.amp_min);
  get("amp_max", cfg.amp_max);
  get("num_sensors", cfg.num_sensors);
  if (j.contains("placement")) {
    const auto& p = j.at("placement");
    const std::string mode = p.at("mode").get<std::string>();
    if (mode == "uniform") {
      cfg.placement = PlacementMode::uniform();
    } else if (mode == "clustered") {
      cfg.placement = PlacementMode::clustered(
          p.at("num_clusters").get<int>(),
          p.at("cluster_radius_grids").get<double>());
    } else {
      throw ConfigError("unknown placement mode: " + mode);
    }
  }
  get("beta", cfg.beta);
  get("sigma0", cfg.sigma0);
  get("d_min_m", cfg.d_min_m);
  if (j.contains("chasing")) {
    const auto& c = j.at("chasing");
    const auto getc = [&](const char* key, auto& target) {
      if (c.contains(key))
        target = c.at(key).get<std::decay_t<decltype(target)>>();
    };
    getc("alpha_pct", cfg.chasing.alpha_pct);
    getc("delta_pct", cfg.chasing.delta_pct);
    getc("m0_factor", cfg.chasing.m0_factor);
    getc("exploration_count", cfg.chasing.exploration_count);
    getc("exploration_cycles", cfg.chasing.exploration_cycles);
    getc("max_rounds", cfg.chasing.max_rounds);
    getc("m_budget", cfg.chasing.m_budget);
    if (c.contains("algorithm"))
      cfg.chasing.algorithm =
          method_from_string(c.at("algorithm")) == Method::CC
              ? ChasingAlgorithm::Centroid
              : ChasingAlgorithm::Individual;
  }
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    const auto gets = [&](const char* key, auto& target) {
      if (s.contains(key))
        target = s.at(key).get<std::decay_t<decltype(target)>>();
    };
    gets("epsilon", cfg.solver.epsilon);
    gets("max_iterations", cfg.solver.max_iterations);
    gets("convergence_tol", cfg.solver.convergence_tol);
    gets("nonneg", cfg.solver.nonneg);
  }
  get("k_list", cfg.k_list);
  get("snr_list", cfg.snr_list);
  get("alpha_list", cfg.alpha_list);
  get("m0_list", cfg.m0_list);
  get("trials_per_point", cfg.trials_per_point);
  get("base_seed", cfg.base_seed);
  get("output_dir", cfg.output_dir);
  get("accuracy_sad_tol", cfg.accuracy_sad_tol);
  if (j.contains("algorithm"))
    cfg.only_method = method_from_string(j.at("algorithm"));
  if (j.contains("snr_db")) cfg.run_snr_db = j.at("snr_db").get<double>();
  return cfg;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["study"] = to_string(cfg.study);
  j["side_len"] = cfg.side_len;
  j["grid_size_m"] = cfg.grid_size_m;
  j["amp_min"] = cfg.amp_min;
  j["amp_max"] = cfg.amp_max;
  j["num_sensors"] = cfg.num_sensors;
  if (cfg.placement.kind == PlacementMode::Kind::Clustered) {
    j["placement"] = {{"mode", "clustered"},
                      {"num_clusters", cfg.placement.num_clusters},
                      {"cluster_radius_grids",
                       cfg.placement.cluster_radius_grids}};
  } else {
    j["placement"] = {{"mode", "uniform"}};
  }
  j["beta"] = cfg.beta;
  j["sigma0"] = cfg.sigma0;
  j["d_min_m"] = cfg.d_min_m;
  j["chasing"] = {
      {"alpha_pct", cfg.chasing.alpha_pct},
      {"delta_pct", cfg.chasing.delta_pct},
      {"m0_factor", cfg.chasing.m0_factor},
      {"exploration_count", cfg.chasing.exploration_count},
      {"exploration_cycles", cfg.chasing.exploration_cycles},
      {"max_rounds", cfg.chasing.max_rounds},
      {"m_budget", cfg.chasing.m_budget},
      {"algorithm",
       cfg.chasing.algorithm == ChasingAlgorithm::Centroid ? "cc" : "ic"}};
  j["solver"] = {{"epsilon", cfg.solver.epsilon},
                 {"max_iterations", cfg.solver.max_iterations},
                 {"convergence_tol", cfg.solver.convergence_tol},
                 {"nonneg", cfg.solver.nonneg}};
  j["k_list"] = cfg.k_list;
  j["snr_list"] = cfg.snr_list;
  j["alpha_list"] = cfg.alpha_list;
  j["m0_list"] = cfg.m0_list;
  j["trials_per_point"] = cfg.trials_per_point;
  j["base_seed"] = cfg.base_seed;
  j["output_dir"] = cfg.output_dir;
  j["accuracy_sad_tol"] = cfg.accuracy_sad_tol;
  if (cfg.only_method) j["algorithm"] = to_string(*cfg.only_method);
  if (cfg.run_snr_db) j["snr_db"] = *cfg.run_snr_db;
  return j;
}

}  // namespace chase
