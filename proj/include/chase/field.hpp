#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace chase {

// Physical coordinates in meters.
struct Point {
  double x_m = 0.0;
  double y_m = 0.0;
};

// Source placement for field generation.
struct PlacementMode {
  enum class Kind { Uniform, Clustered };
  Kind kind = Kind::Uniform;
  int num_clusters = 1;
  double cluster_radius_grids = 1.0;

  static PlacementMode uniform() { return {}; }
  static PlacementMode clustered(int clusters, double radius_grids) {
    return {Kind::Clustered, clusters, radius_grids};
  }
};

// Square sensing domain of side_len x side_len grids, row-major indexing
// from the top-left. `signal` holds the aggregate source power per grid
// (k nonzero entries); `sensor_locations` the grids hosting a sensor,
// sorted ascending, at most one sensor per grid.
struct GridField {
  int side_len = 0;
  double grid_size_m = 0.0;
  int n = 0;
  Eigen::VectorXd signal;
  std::vector<int> sensor_locations;

  int sparsity() const {
    int k = 0;
    for (int i = 0; i < n; ++i)
      if (signal[i] != 0.0) ++k;
    return k;
  }
  bool has_sensor(int grid_index) const;
};

GridField generate_field(int side_len, double grid_size_m, int k,
                         std::pair<double, double> amp_range,
                         const PlacementMode& mode, int num_sensors,
                         std::uint64_t rng_seed);

// Center of a grid cell in meters: x from the column, y from the row.
Point grid_center(int grid_index, const GridField& field);
Point grid_center(int grid_index, int side_len, double grid_size_m);

double distance_m(const Point& a, const Point& b);

std::string field_to_json(const GridField& field);
GridField field_from_json(const std::string& text);

}  // namespace chase
