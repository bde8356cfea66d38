// Compares the serial reference kernels against the OpenMP variants on
// full-size (30x30 grid) problems and reports speedups, plus an end-to-end
// reconstruction timing.

#include <chrono>
#include <cstdio>

#include <Eigen/Core>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "chase/channel.hpp"
#include "chase/field.hpp"
#include "chase/kernels.hpp"
#include "chase/rng.hpp"
#include "chase/sensing.hpp"
#include "chase/solver.hpp"

namespace {

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

template <typename Fn>
double time_ms(int reps, Fn&& fn) {
  const double start = now_ms();
  for (int r = 0; r < reps; ++r) fn();
  return (now_ms() - start) / reps;
}

void report(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-24s serial %9.3f ms   omp %9.3f ms   speedup %.2fx\n", name,
              serial_ms, parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main() {
  const int side = 30;
  const double grid_m = 30.0;
  const int n = side * side;

#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (built without OpenMP)\n");
#endif

  // Channel fill: n^2 keyed Rayleigh/path-loss entries.
  Eigen::MatrixXd psi_serial, psi_omp;
  const double fill_serial = time_ms(3, [&] {
    chase::kernels::fill_rayleigh_pathloss_serial(psi_serial, side, grid_m,
                                                  3.0, 0.5, 15.0, 42);
  });
  const double fill_omp = time_ms(3, [&] {
    chase::kernels::fill_rayleigh_pathloss(psi_omp, side, grid_m, 3.0, 0.5,
                                           15.0, 42);
  });
  report("channel fill 900x900", fill_serial, fill_omp);
  if (psi_serial != psi_omp) {
    std::printf("ERROR: serial and omp channel fills differ\n");
    return 1;
  }

  // Dense matvec pair on a 400x900 sensing matrix.
  const int m = 400;
  Eigen::MatrixXd A = psi_serial.topRows(m);
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(n, 0.0, 1.0);
  Eigen::VectorXd r = Eigen::VectorXd::LinSpaced(m, -1.0, 1.0);
  Eigen::VectorXd out_serial, out_omp;
  const double mv_serial = time_ms(200, [&] {
    chase::kernels::matvec_serial(A, x, out_serial);
  });
  const double mv_omp =
      time_ms(200, [&] { chase::kernels::matvec(A, x, out_omp); });
  report("matvec 400x900", mv_serial, mv_omp);
  if (out_serial != out_omp) {
    std::printf("ERROR: serial and omp matvec differ\n");
    return 1;
  }

  const double mvt_serial = time_ms(200, [&] {
    chase::kernels::matvec_t_serial(A, r, out_serial);
  });
  const double mvt_omp =
      time_ms(200, [&] { chase::kernels::matvec_t(A, r, out_omp); });
  report("matvec_t 400x900", mvt_serial, mvt_omp);

  // End-to-end: one sparse reconstruction at full scale.
  const chase::GridField field = chase::generate_field(
      side, grid_m, 50, {30.0, 500.0}, chase::PlacementMode::uniform(), 400,
      7);
  const chase::ChannelMatrix channel =
      chase::build_channel(field, 3.0, 0.5, 15.0, 11);
  const Eigen::VectorXd received = chase::propagate(channel, field.signal);
  chase::Rng rng(3);
  std::vector<int> picks;
  for (const int i : chase::sample_distinct(rng, 400, 300))
    picks.push_back(field.sensor_locations[i]);
  const chase::SamplePlan plan = chase::take_samples(
      {}, picks, received, chase::NoiseSpec::none(), field);
  const Eigen::MatrixXd As = chase::effective_sensing_matrix(plan, channel);
  const Eigen::VectorXd y = chase::samples_vector(plan);
  chase::SolverConfig solver_cfg;
  solver_cfg.nonneg = false;

  const double t0 = now_ms();
  const chase::Reconstruction rec = chase::l1_reconstruct(As, y, solver_cfg);
  std::printf("l1 solve 300x900:        %9.3f ms   (residual %.3e, %d iters)\n",
              now_ms() - t0, rec.residual_l2, rec.iterations_used);
  return 0;
}
