#include "chase/kernels.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "chase/rng.hpp"

namespace chase::kernels {

namespace {

// Worth spawning threads only for larger problems and never when already
// inside a parallel region (the harness parallelizes over trials).
bool go_parallel(std::ptrdiff_t work) {
#ifdef _OPENMP
  return work >= 1 << 15 && !omp_in_parallel();
#else
  (void)work;
  return false;
#endif
}

double pathloss_entry(int source, int receiver, int side_len,
                      double grid_size_m, double beta, double sigma0,
                      double d_min_m, std::uint64_t seed, int n) {
  const double sx = (source % side_len + 0.5) * grid_size_m;
  const double sy = (source / side_len + 0.5) * grid_size_m;
  const double rx = (receiver % side_len + 0.5) * grid_size_m;
  const double ry = (receiver / side_len + 0.5) * grid_size_m;
  const double d =
      std::max(std::hypot(sx - rx, sy - ry), d_min_m);
  const auto [gx, gy] = gaussian_pair_at(
      seed, static_cast<std::uint64_t>(source) * n + receiver);
  const double g = std::hypot(sigma0 * gx, sigma0 * gy);
  return g / std::pow(d, beta);
}

}  // namespace

void matvec_serial(const Eigen::MatrixXd& A, const Eigen::VectorXd& x,
                   Eigen::VectorXd& y) {
  const Eigen::Index rows = A.rows();
  y.resize(rows);
  for (Eigen::Index m = 0; m < rows; ++m) y[m] = A.row(m).dot(x);
}

void matvec(const Eigen::MatrixXd& A, const Eigen::VectorXd& x,
            Eigen::VectorXd& y) {
  const Eigen::Index rows = A.rows();
  y.resize(rows);
  if (!go_parallel(A.size())) {
    matvec_serial(A, x, y);
    return;
  }
#pragma omp parallel for schedule(static)
  for (Eigen::Index m = 0; m < rows; ++m) y[m] = A.row(m).dot(x);
}

void matvec_t_serial(const Eigen::MatrixXd& A, const Eigen::VectorXd& r,
                     Eigen::VectorXd& out) {
  const Eigen::Index cols = A.cols();
  out.resize(cols);
  for (Eigen::Index c = 0; c < cols; ++c) out[c] = A.col(c).dot(r);
}

void matvec_t(const Eigen::MatrixXd& A, const Eigen::VectorXd& r,
              Eigen::VectorXd& out) {
  const Eigen::Index cols = A.cols();
  out.resize(cols);
  if (!go_parallel(A.size())) {
    matvec_t_serial(A, r, out);
    return;
  }
#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < cols; ++c) out[c] = A.col(c).dot(r);
}

void fill_rayleigh_pathloss_serial(Eigen::MatrixXd& psi, int side_len,
                                   double grid_size_m, double beta,
                                   double sigma0, double d_min_m,
                                   std::uint64_t seed) {
  const int n = side_len * side_len;
  psi.resize(n, n);
  for (int i = 0; i < n; ++i)      // source = column
    for (int j = 0; j < n; ++j)    // receiver = row
      psi(j, i) = pathloss_entry(i, j, side_len, grid_size_m, beta, sigma0,
                                 d_min_m, seed, n);
}

void fill_rayleigh_pathloss(Eigen::MatrixXd& psi, int side_len,
                            double grid_size_m, double beta, double sigma0,
                            double d_min_m, std::uint64_t seed) {
  const int n = side_len * side_len;
  psi.resize(n, n);
  if (!go_parallel(static_cast<std::ptrdiff_t>(n) * n)) {
    fill_rayleigh_pathloss_serial(psi, side_len, grid_size_m, beta, sigma0,
                                  d_min_m, seed);
    return;
  }
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      psi(j, i) = pathloss_entry(i, j, side_len, grid_size_m, beta, sigma0,
                                 d_min_m, seed, n);
}

}  // namespace chase::kernels
