#include "chase/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "chase/errors.hpp"
#include "chase/rng.hpp"

namespace chase {

bool SamplePlan::contains(int grid_index) const {
  return std::find(tasked.begin(), tasked.end(), grid_index) != tasked.end();
}

Eigen::MatrixXd phi_matrix(const SamplePlan& plan, int n) {
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(plan.m(), n);
  for (int m = 0; m < plan.m(); ++m) {
    const int g = plan.tasked[m];
    if (g < 0 || g >= n)
      throw IndexError("phi_matrix: tasked grid " + std::to_string(g) +
                       " out of range [0," + std::to_string(n) + ")");
    phi(m, g) = 1.0;
  }
  return phi;
}

SamplePlan take_samples(const SamplePlan& plan,
                        const std::vector<int>& new_indices,
                        const Eigen::VectorXd& x, const NoiseSpec& noise,
                        const GridField& field) {
  std::unordered_set<int> seen(plan.tasked.begin(), plan.tasked.end());
  std::vector<int> fresh;
  for (const int g : new_indices) {
    if (!field.has_sensor(g))
      throw UnknownSensorError("take_samples: no sensor at grid " +
                               std::to_string(g));
    if (g < 0 || g >= x.size())
      throw IndexError("take_samples: grid index out of range");
    if (seen.insert(g).second) fresh.push_back(g);
  }

  SamplePlan next = plan;
  if (fresh.empty()) return next;

  double sigma = 0.0;
  if (noise.snr_db) {
    // Average clean power over the full extended plan.
    double power = 0.0;
    for (const int g : next.tasked) power += x[g] * x[g];
    for (const int g : fresh) power += x[g] * x[g];
    power /= static_cast<double>(next.m() + fresh.size());
    sigma = std::sqrt(power * std::pow(10.0, -*noise.snr_db / 10.0));
  }

  for (const int g : fresh) {
    const int position = next.m();
    double value = x[g];
    if (noise.snr_db)
      value += sigma * gaussian_at(noise.rng_seed,
                                   static_cast<std::uint64_t>(position));
    next.tasked.push_back(g);
    next.samples.push_back(value);
  }
  const int round = next.rounds.empty() ? 0 : next.rounds.back().round + 1;
  next.rounds.push_back({round, static_cast<int>(fresh.size())});
  return next;
}

Eigen::MatrixXd effective_sensing_matrix(const SamplePlan& plan,
                                         const ChannelMatrix& channel) {
  if (plan.m() == 0)
    throw ConfigError("effective_sensing_matrix: empty sample plan");
  const int n = channel.n();
  Eigen::MatrixXd A(plan.m(), n);
  for (int m = 0; m < plan.m(); ++m) {
    const int g = plan.tasked[m];
    if (g < 0 || g >= n)
      throw IndexError("effective_sensing_matrix: tasked grid out of range");
    A.row(m) = channel.psi.row(g);
  }
  return A;
}

Eigen::VectorXd samples_vector(const SamplePlan& plan) {
  return Eigen::Map<const Eigen::VectorXd>(plan.samples.data(),
                                           plan.samples.size());
}

double suggested_residual_bound(const NoiseSpec& noise,
                                const std::vector<double>& samples) {
  if (!noise.snr_db || samples.empty()) return 0.0;
  double power = 0.0;
  for (const double v : samples) power += v * v;
  power /= static_cast<double>(samples.size());
  const double sigma2 = power * std::pow(10.0, -*noise.snr_db / 10.0);
  return std::sqrt(sigma2 * static_cast<double>(samples.size()));
}

std::string plan_to_json(const SamplePlan& plan) {
  nlohmann::json j;
  j["tasked"] = plan.tasked;
  j["samples"] = plan.samples;
  auto rounds = nlohmann::json::array();
  for (const auto& r : plan.rounds) rounds.push_back({r.round, r.count_added});
  j["rounds"] = std::move(rounds);
  return j.dump();
}

SamplePlan plan_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("plan_from_json: ") + e.what());
  }
  SamplePlan plan;
  plan.tasked = j.at("tasked").get<std::vector<int>>();
  plan.samples = j.at("samples").get<std::vector<double>>();
  for (const auto& r : j.at("rounds"))
    plan.rounds.push_back({r.at(0).get<int>(), r.at(1).get<int>()});
  if (plan.tasked.size() != plan.samples.size())
    throw ConfigError("plan_from_json: tasked/samples length mismatch");
  return plan;
}

}  // namespace chase
