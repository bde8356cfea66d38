#pragma once

#include <Eigen/Core>
#include <optional>

namespace chase {

struct SolverConfig {
  // l2 residual bound of the recovery problem; 0 targets an equality fit.
  double epsilon = 0.0;
  // Total inner-iteration budget across the whole penalty path.
  int max_iterations = 20000;
  // Relative iterate-change tolerance at the final penalty stage; also the
  // absolute slack allowed on the residual bound when reporting convergence.
  double convergence_tol = 1e-8;
  // Project iterates onto the nonnegative orthant (signal powers are
  // nonnegative); disabled for runs that rely on post-hoc trimming instead.
  bool nonneg = true;
};

struct Reconstruction {
  Eigen::VectorXd s_hat;
  double residual_l2 = 0.0;
  int iterations_used = 0;
  bool converged = false;
};

// min ||s||_1  s.t.  ||A s - y||_2 <= epsilon, solved in penalized form
// min lambda ||s||_1 + 1/2 ||A s - y||_2^2 with an accelerated proximal
// gradient inner loop and a geometrically decreasing penalty path. Each
// stage ends with a support least-squares polish that is accepted only when
// it is feasible and does not worsen the l1 objective, which snaps exactly
// recoverable instances to their sparse solution.
Reconstruction l1_reconstruct(const Eigen::MatrixXd& A,
                              const Eigen::VectorXd& y,
                              const SolverConfig& cfg);

// Exhaustive minimum-support solver for small instances: tries every
// support of size <= k_max, keeps the sparsest exact fit (residual <= 1e-8),
// ties broken by smaller l1 norm. Ground truth for solver validation only.
std::optional<Eigen::VectorXd> l0_oracle(const Eigen::MatrixXd& A,
                                         const Eigen::VectorXd& y, int k_max);

}  // namespace chase
