#include <doctest.h>

#include <Eigen/Core>
#include <cmath>

#include "chase/errors.hpp"
#include "chase/rng.hpp"
#include "chase/sensing.hpp"

using namespace chase;

namespace {

GridField all_sensor_field(int side) {
  GridField f;
  f.side_len = side;
  f.grid_size_m = 30.0;
  f.n = side * side;
  f.signal = Eigen::VectorXd::Zero(f.n);
  for (int i = 0; i < f.n; ++i) f.sensor_locations.push_back(i);
  return f;
}

ChannelMatrix identity_channel(int n) {
  ChannelMatrix ch;
  ch.psi = Eigen::MatrixXd::Identity(n, n);
  return ch;
}

}  // namespace

TEST_SUITE("sensing") {

TEST_CASE("phi matrix rows are unit selectors") {
  SamplePlan plan;
  plan.tasked = {2};
  plan.samples = {0.0};
  Eigen::MatrixXd phi = phi_matrix(plan, 4);
  CHECK(phi.rows() == 1);
  CHECK(phi(0, 0) == 0.0);
  CHECK(phi(0, 2) == 1.0);

  plan.tasked = {0, 3};
  plan.samples = {0.0, 0.0};
  phi = phi_matrix(plan, 4);
  CHECK(phi(0, 0) == 1.0);
  CHECK(phi(1, 3) == 1.0);
  CHECK(phi.sum() == 2.0);

  plan.tasked = {4};
  CHECK_THROWS_AS(phi_matrix(plan, 4), IndexError);
}

TEST_CASE("phi gathers entries of x") {
  const GridField f = all_sensor_field(4);
  Rng rng(3);
  Eigen::VectorXd x(f.n);
  for (int i = 0; i < f.n; ++i) x[i] = rng.uniform(-5.0, 5.0);
  SamplePlan plan = take_samples({}, {3, 9, 0, 14}, x, NoiseSpec::none(), f);
  const Eigen::VectorXd picked = phi_matrix(plan, f.n) * x;
  for (int m = 0; m < plan.m(); ++m) CHECK(picked[m] == x[plan.tasked[m]]);
}

TEST_CASE("noise-free samples copy x and skip duplicates") {
  const GridField f = all_sensor_field(3);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(9);
  x[5] = 42.0;
  x[7] = -1.5;

  const SamplePlan p1 = take_samples({}, {5}, x, NoiseSpec::none(), f);
  CHECK(p1.tasked == std::vector<int>{5});
  CHECK(p1.samples == std::vector<double>{42.0});

  const SamplePlan p2 = take_samples(p1, {5, 7}, x, NoiseSpec::none(), f);
  CHECK(p2.tasked == std::vector<int>{5, 7});
  CHECK(p2.samples == std::vector<double>{42.0, -1.5});
  CHECK(p2.m() == 2);
  CHECK(p2.rounds.size() == 2);
  CHECK(p2.rounds[1].count_added == 1);
}

TEST_CASE("unknown sensors are rejected") {
  GridField f = all_sensor_field(3);
  f.sensor_locations = {0, 1, 2};  // only the first row is deployed
  const Eigen::VectorXd x = Eigen::VectorXd::Ones(9);
  CHECK_THROWS_AS(take_samples({}, {4}, x, NoiseSpec::none(), f),
                  UnknownSensorError);
}

TEST_CASE("plans are append-only across random rounds") {
  const GridField f = all_sensor_field(6);
  Rng rng(17);
  Eigen::VectorXd x(f.n);
  for (int i = 0; i < f.n; ++i) x[i] = rng.uniform(0.0, 10.0);

  SamplePlan plan;
  std::vector<int> tasked_before;
  std::vector<double> samples_before;
  for (int round = 0; round < 8; ++round) {
    std::vector<int> batch;
    for (int d = 0; d < 5; ++d) batch.push_back(rng.uniform_int(f.n));
    plan = take_samples(plan, batch, x, NoiseSpec::at_snr(20.0, 5), f);

    REQUIRE(plan.m() >= static_cast<int>(tasked_before.size()));
    for (std::size_t i = 0; i < tasked_before.size(); ++i) {
      CHECK(plan.tasked[i] == tasked_before[i]);
      CHECK(plan.samples[i] == samples_before[i]);
    }
    tasked_before = plan.tasked;
    samples_before = plan.samples;
  }
  CHECK(plan.m() <= static_cast<int>(f.sensor_locations.size()));
}

TEST_CASE("noise variance follows the SNR definition") {
  const int side = 100;  // 10000 samples in one round
  const GridField f = all_sensor_field(side);
  Rng rng(23);
  Eigen::VectorXd x(f.n);
  for (int i = 0; i < f.n; ++i) x[i] = rng.uniform(5.0, 15.0);

  std::vector<int> all(f.n);
  for (int i = 0; i < f.n; ++i) all[i] = i;
  const SamplePlan plan =
      take_samples({}, all, x, NoiseSpec::at_snr(15.0, 99), f);

  double clean_power = 0.0;
  for (int i = 0; i < f.n; ++i) clean_power += x[i] * x[i];
  clean_power /= f.n;
  const double expected_var = clean_power * std::pow(10.0, -1.5);

  double var = 0.0;
  for (int m = 0; m < plan.m(); ++m) {
    const double eta = plan.samples[m] - x[plan.tasked[m]];
    var += eta * eta;
  }
  var /= plan.m();
  CHECK(std::abs(var - expected_var) <= 0.03 * expected_var);
}

TEST_CASE("effective sensing matrix selects psi rows") {
  const GridField f = all_sensor_field(3);
  ChannelMatrix ch = identity_channel(9);
  const Eigen::VectorXd x = Eigen::VectorXd::Ones(9);
  SamplePlan plan = take_samples({}, {1, 3}, x, NoiseSpec::none(), f);
  const Eigen::MatrixXd A = effective_sensing_matrix(plan, ch);
  CHECK(A.row(0) == Eigen::RowVectorXd::Unit(9, 1));
  CHECK(A.row(1) == Eigen::RowVectorXd::Unit(9, 3));

  // Random psi: A equals the explicit product Phi * Psi.
  Rng rng(8);
  ChannelMatrix dense;
  dense.psi.resize(8, 8);
  for (int j = 0; j < 8; ++j)
    for (int i = 0; i < 8; ++i) dense.psi(j, i) = rng.uniform(0.0, 1.0);
  const GridField f8 = all_sensor_field(2);  // unused geometry
  SamplePlan plan8;
  plan8.tasked = {0, 4, 7};
  plan8.samples = {0.0, 0.0, 0.0};
  const Eigen::MatrixXd A8 = effective_sensing_matrix(plan8, dense);
  const Eigen::MatrixXd expected = phi_matrix(plan8, 8) * dense.psi;
  CHECK((A8 - expected).lpNorm<Eigen::Infinity>() <= 1e-14);

  CHECK_THROWS_AS(effective_sensing_matrix({}, ch), ConfigError);
}

TEST_CASE("suggested residual bound tracks sigma*sqrt(M)") {
  NoiseSpec none = NoiseSpec::none();
  CHECK(suggested_residual_bound(none, {1.0, 2.0}) == 0.0);
  const NoiseSpec noisy = NoiseSpec::at_snr(10.0, 1);
  const std::vector<double> samples{3.0, 4.0};  // mean power 12.5
  const double expected = std::sqrt(12.5 * 0.1 * 2.0);
  CHECK(suggested_residual_bound(noisy, samples) ==
        doctest::Approx(expected));
}

TEST_CASE("plan json round trip") {
  const GridField f = all_sensor_field(3);
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(9, 0.0, 8.0);
  SamplePlan plan = take_samples({}, {2, 6, 1}, x, NoiseSpec::none(), f);
  plan = take_samples(plan, {0}, x, NoiseSpec::none(), f);
  const SamplePlan back = plan_from_json(plan_to_json(plan));
  CHECK(back.tasked == plan.tasked);
  CHECK(back.samples == plan.samples);
  REQUIRE(back.rounds.size() == plan.rounds.size());
  CHECK(back.rounds[1].round == plan.rounds[1].round);
  CHECK(back.rounds[1].count_added == plan.rounds[1].count_added);
}

}  // TEST_SUITE
