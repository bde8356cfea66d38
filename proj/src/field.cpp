#include "chase/field.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "chase/errors.hpp"
#include "chase/rng.hpp"

namespace chase {

bool GridField::has_sensor(int grid_index) const {
  return std::binary_search(sensor_locations.begin(), sensor_locations.end(),
                            grid_index);
}

Point grid_center(int grid_index, int side_len, double grid_size_m) {
  const int row = grid_index / side_len;
  const int col = grid_index % side_len;
  return {(col + 0.5) * grid_size_m, (row + 0.5) * grid_size_m};
}

Point grid_center(int grid_index, const GridField& field) {
  if (grid_index < 0 || grid_index >= field.n)
    throw IndexError("grid_center: index " + std::to_string(grid_index) +
                     " out of range [0," + std::to_string(field.n) + ")");
  return grid_center(grid_index, field.side_len, field.grid_size_m);
}

double distance_m(const Point& a, const Point& b) {
  return std::hypot(a.x_m - b.x_m, a.y_m - b.y_m);
}

namespace {

// Draws k distinct source grids in a Chebyshev disk around randomly
// assigned cluster centers. Retries on occupied cells; gives up only if
// the requested layout cannot fit.
std::vector<int> place_clustered(Rng& rng, int side_len, int k,
                                 const PlacementMode& mode) {
  const int n = side_len * side_len;
  std::vector<int> centers(mode.num_clusters);
  for (auto& c : centers) c = rng.uniform_int(n);

  const int radius = static_cast<int>(std::floor(mode.cluster_radius_grids));
  std::unordered_set<int> used;
  std::vector<int> grids;
  grids.reserve(k);
  long attempts = 0;
  const long max_attempts = 1000L * k + 1000L;
  while (static_cast<int>(grids.size()) < k) {
    if (++attempts > max_attempts)
      throw ConfigError(
          "clustered placement: could not fit all sources, cluster regions "
          "too small for k");
    const int center = centers[rng.uniform_int(mode.num_clusters)];
    const int cr = center / side_len;
    const int cc = center % side_len;
    const int r0 = std::max(0, cr - radius);
    const int r1 = std::min(side_len - 1, cr + radius);
    const int c0 = std::max(0, cc - radius);
    const int c1 = std::min(side_len - 1, cc + radius);
    const int row = r0 + rng.uniform_int(r1 - r0 + 1);
    const int col = c0 + rng.uniform_int(c1 - c0 + 1);
    const int g = row * side_len + col;
    if (used.insert(g).second) grids.push_back(g);
  }
  return grids;
}

}  // namespace

GridField generate_field(int side_len, double grid_size_m, int k,
                         std::pair<double, double> amp_range,
                         const PlacementMode& mode, int num_sensors,
                         std::uint64_t rng_seed) {
  if (side_len < 1) throw ConfigError("generate_field: side_len must be >= 1");
  if (grid_size_m <= 0.0)
    throw ConfigError("generate_field: grid_size_m must be positive");
  const int n = side_len * side_len;
  if (k < 0 || 4 * k > n)
    throw ConfigError("generate_field: sparsity k must satisfy 0 <= k <= n/4");
  if (num_sensors < 1 || num_sensors > n)
    throw ConfigError("generate_field: num_sensors must be in [1, n]");
  if (amp_range.first <= 0.0 || amp_range.first > amp_range.second)
    throw ConfigError("generate_field: need 0 < amp_min <= amp_max");
  if (mode.kind == PlacementMode::Kind::Clustered) {
    if (mode.num_clusters < 1 || mode.num_clusters > std::max(1, k))
      throw ConfigError("generate_field: need 1 <= num_clusters <= k");
    if (mode.cluster_radius_grids < 1.0)
      throw ConfigError("generate_field: cluster_radius_grids must be >= 1");
  }

  Rng rng(rng_seed);
  GridField field;
  field.side_len = side_len;
  field.grid_size_m = grid_size_m;
  field.n = n;
  field.signal = Eigen::VectorXd::Zero(n);

  // Draw order is fixed: source grids, then amplitudes, then sensors.
  std::vector<int> source_grids;
  if (k > 0) {
    source_grids = (mode.kind == PlacementMode::Kind::Uniform)
                       ? sample_distinct(rng, n, k)
                       : place_clustered(rng, side_len, k, mode);
  }
  for (const int g : source_grids)
    field.signal[g] = rng.uniform(amp_range.first, amp_range.second);

  field.sensor_locations = sample_distinct(rng, n, num_sensors);
  std::sort(field.sensor_locations.begin(), field.sensor_locations.end());
  return field;
}

std::string field_to_json(const GridField& field) {
  nlohmann::json j;
  j["side_len"] = field.side_len;
  j["grid_size_m"] = field.grid_size_m;
  auto signal = nlohmann::json::array();
  for (int i = 0; i < field.n; ++i)
    if (field.signal[i] != 0.0) signal.push_back({i, field.signal[i]});
  j["signal"] = std::move(signal);
  j["sensors"] = field.sensor_locations;
  return j.dump();
}

GridField field_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("field_from_json: ") + e.what());
  }
  GridField field;
  field.side_len = j.at("side_len").get<int>();
  field.grid_size_m = j.at("grid_size_m").get<double>();
  field.n = field.side_len * field.side_len;
  field.signal = Eigen::VectorXd::Zero(field.n);
  for (const auto& entry : j.at("signal")) {
    const int idx = entry.at(0).get<int>();
    if (idx < 0 || idx >= field.n)
      throw ConfigError("field_from_json: signal index out of range");
    field.signal[idx] = entry.at(1).get<double>();
  }
  field.sensor_locations = j.at("sensors").get<std::vector<int>>();
  std::sort(field.sensor_locations.begin(), field.sensor_locations.end());
  for (const int s : field.sensor_locations)
    if (s < 0 || s >= field.n)
      throw ConfigError("field_from_json: sensor index out of range");
  return field;
}

}  // namespace chase
