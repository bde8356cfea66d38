#pragma once

#include <Eigen/Core>
#include <cstdint>

// Hot loops shared by the channel builder and the l1 solver. Each kernel has
// an OpenMP variant and a serial reference; both produce bit-identical
// results because parallelism is only ever over independent output elements
// (no reduction is ever split across threads). The *_serial forms are kept
// for tests and for the kernel benchmark.

namespace chase::kernels {

// y = A * x, one dot product per row.
void matvec(const Eigen::MatrixXd& A, const Eigen::VectorXd& x,
            Eigen::VectorXd& y);
void matvec_serial(const Eigen::MatrixXd& A, const Eigen::VectorXd& x,
                   Eigen::VectorXd& y);

// out = A^T * r, one dot product per column.
void matvec_t(const Eigen::MatrixXd& A, const Eigen::VectorXd& r,
              Eigen::VectorXd& out);
void matvec_t_serial(const Eigen::MatrixXd& A, const Eigen::VectorXd& r,
                     Eigen::VectorXd& out);

// Fills psi(j, i) = |G_seed(i, j)| / max(d(i, j), d_min)^beta where G is a
// complex Gaussian keyed by the ordered pair (i, j). Entry values depend
// only on (seed, i, j), never on thread schedule.
void fill_rayleigh_pathloss(Eigen::MatrixXd& psi, int side_len,
                            double grid_size_m, double beta, double sigma0,
                            double d_min_m, std::uint64_t seed);
void fill_rayleigh_pathloss_serial(Eigen::MatrixXd& psi, int side_len,
                                   double grid_size_m, double beta,
                                   double sigma0, double d_min_m,
                                   std::uint64_t seed);

}  // namespace chase::kernels
