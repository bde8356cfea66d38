#include "chase/solver.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "chase/errors.hpp"
#include "chase/kernels.hpp"

namespace chase {

namespace {

void check_inputs(const Eigen::MatrixXd& A, const Eigen::VectorXd& y) {
  if (A.rows() < 1 || A.cols() < 1)
    throw DimensionError("l1_reconstruct: A must be at least 1x1");
  if (A.rows() != y.size())
    throw DimensionError("l1_reconstruct: A has " + std::to_string(A.rows()) +
                         " rows but y has " + std::to_string(y.size()) +
                         " entries");
  if (!A.allFinite() || !y.allFinite())
    throw NonFiniteError("l1_reconstruct: non-finite input");
}

// Largest eigenvalue of A^T A by power iteration; Rayleigh quotient gives a
// lower bound, so the caller pads it before forming the step size.
double spectral_norm_sq(const Eigen::MatrixXd& A) {
  const Eigen::Index n = A.cols();
  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
  // Deterministic perturbation so v is not orthogonal to the top eigenvector.
  for (Eigen::Index i = 0; i < n; ++i)
    v[i] += 1e-3 * std::sin(0.7 * static_cast<double>(i + 1));
  v.normalize();
  Eigen::VectorXd av, atav;
  double lambda = 0.0;
  for (int it = 0; it < 60; ++it) {
    kernels::matvec(A, v, av);
    kernels::matvec_t(A, av, atav);
    const double norm = atav.norm();
    if (norm == 0.0) return 0.0;
    lambda = v.dot(atav);
    v = atav / norm;
  }
  return lambda;
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

struct Polish {
  bool accepted = false;
  Eigen::VectorXd s;
  double residual = 0.0;
};

// Least squares restricted to a candidate support (original signal
// coordinates). Accepted only when the refit stays feasible and does not
// increase the weighted l1 objective beyond the shrinkage bias of the
// current penalty.
Polish try_one_support(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& s_curr,
                       const std::vector<Eigen::Index>& support,
                       const Eigen::VectorXd& weights, double eps,
                       double lambda_step, bool nonneg) {
  Polish out;
  const Eigen::Index m = A.rows();
  if (support.empty() || static_cast<Eigen::Index>(support.size()) > m)
    return out;

  Eigen::MatrixXd As(m, support.size());
  for (std::size_t c = 0; c < support.size(); ++c)
    As.col(c) = A.col(support[c]);
  const Eigen::VectorXd z = As.colPivHouseholderQr().solve(y);
  if (!z.allFinite()) return out;
  if (nonneg && z.minCoeff() < -1e-12 * std::max(1.0, z.cwiseAbs().maxCoeff()))
    return out;

  const double residual = (As * z - y).norm();
  if (residual > std::max(eps, 1e-10 * y.norm())) return out;

  double obj_curr = 0.0, obj_z = 0.0;
  for (Eigen::Index i = 0; i < s_curr.size(); ++i)
    obj_curr += weights[i] * std::abs(s_curr[i]);
  for (std::size_t c = 0; c < support.size(); ++c)
    obj_z += weights[support[c]] * std::abs(z[c]);
  const double slack =
      0.02 * obj_curr + 10.0 * lambda_step * double(support.size());
  if (obj_z > obj_curr + slack) return out;

  out.accepted = true;
  out.s = Eigen::VectorXd::Zero(s_curr.size());
  for (std::size_t c = 0; c < support.size(); ++c) out.s[support[c]] = z[c];
  out.residual = residual;
  return out;
}

// Tries the iterate's own support plus sparser thresholded variants; the
// sparsest acceptable refit wins. An almost-converged iterate often carries
// the right support under a skirt of small entries.
Polish try_support_polish(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                          const Eigen::VectorXd& s_curr,
                          const Eigen::VectorXd& weights, double eps,
                          double lambda_step, bool nonneg) {
  double magnitude = 0.0;
  for (Eigen::Index i = 0; i < s_curr.size(); ++i)
    magnitude = std::max(magnitude, std::abs(s_curr[i]));
  if (magnitude == 0.0) return {};

  double last_cut = -1.0;
  for (const double rel : {3e-2, 1e-2, 1e-3, 1e-4, 0.0}) {
    const double cut = rel * magnitude;
    std::vector<Eigen::Index> support;
    for (Eigen::Index i = 0; i < s_curr.size(); ++i)
      if (s_curr[i] != 0.0 && std::abs(s_curr[i]) > cut) support.push_back(i);
    if (!support.empty() && double(support.size()) == last_cut) continue;
    last_cut = double(support.size());
    Polish polish = try_one_support(A, y, s_curr, support, weights, eps,
                                    lambda_step, nonneg);
    if (polish.accepted) return polish;
  }
  return {};
}

}  // namespace

Reconstruction l1_reconstruct(const Eigen::MatrixXd& A,
                              const Eigen::VectorXd& y,
                              const SolverConfig& cfg) {
  check_inputs(A, y);
  if (cfg.epsilon < 0.0)
    throw ConfigError("l1_reconstruct: epsilon must be >= 0");
  if (cfg.max_iterations < 1)
    throw ConfigError("l1_reconstruct: max_iterations must be >= 1");

  const Eigen::Index n = A.cols();
  Reconstruction rec;
  rec.s_hat = Eigen::VectorXd::Zero(n);

  // Column equilibration: the recovery guarantees the sensing-matrix
  // construction appeals to are stated for unit-norm dictionary columns,
  // while physical path-loss columns span orders of magnitude. Solve in
  // z = D s with D = diag(column norms), which makes the penalty charge
  // every grid by its actual visibility; a floor keeps nearly-invisible
  // grids from becoming free junk.
  Eigen::VectorXd weights(n);
  double max_norm = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    weights[j] = A.col(j).norm();
    max_norm = std::max(max_norm, weights[j]);
  }
  if (max_norm == 0.0 || y.norm() <= cfg.epsilon) {
    rec.residual_l2 = y.norm();
    rec.converged = rec.residual_l2 <= cfg.epsilon + cfg.convergence_tol;
    return rec;
  }
  for (Eigen::Index j = 0; j < n; ++j)
    weights[j] = std::max(weights[j], 1e-3 * max_norm);

  Eigen::MatrixXd Aw = A;
  for (Eigen::Index j = 0; j < n; ++j) Aw.col(j) /= weights[j];
  // Aw z = A s for z = D s, so residuals below are in original units.

  const double lip = spectral_norm_sq(Aw);
  if (lip == 0.0) {
    rec.residual_l2 = y.norm();
    return rec;
  }
  const double step = 1.0 / (1.1 * lip);

  Eigen::VectorXd grad_probe;
  kernels::matvec_t(Aw, y, grad_probe);
  const double lambda_max = grad_probe.cwiseAbs().maxCoeff();
  const double lambda_floor = lambda_max * 1e-9;
  const double shrink = 0.3;

  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd momentum = z, z_prev = z, az, grad_vec, next(n);
  Eigen::VectorXd s_curr(n);
  int iters_total = 0;
  bool done = false;
  bool path_completed = false;
  double lambda = lambda_max * shrink;

  const auto unscale = [&](const Eigen::VectorXd& zv, Eigen::VectorXd& sv) {
    for (Eigen::Index j = 0; j < n; ++j) sv[j] = zv[j] / weights[j];
  };

  const int stage_cap = std::max(100, cfg.max_iterations / 20);
  while (!done && iters_total < cfg.max_iterations) {
    const bool final_stage = lambda <= lambda_floor;
    const double stage_tol = final_stage ? cfg.convergence_tol : 1e-4;
    const int budget_left = cfg.max_iterations - iters_total;
    const int stage_iters =
        final_stage ? std::min(budget_left, std::max(stage_cap, 3000))
                    : std::min(budget_left, stage_cap);
    const double threshold = lambda * step;

    momentum = z;
    double t_acc = 1.0;
    bool stage_converged = false;
    for (int it = 0; it < stage_iters; ++it) {
      kernels::matvec(Aw, momentum, az);
      az -= y;
      kernels::matvec_t(Aw, az, grad_vec);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double v = momentum[i] - step * grad_vec[i];
        next[i] = cfg.nonneg ? std::max(0.0, v - threshold)
                             : soft_threshold(v, threshold);
      }
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_acc * t_acc));
      const double beta = (t_acc - 1.0) / t_next;
      z_prev = z;
      z = next;
      momentum = z + beta * (z - z_prev);
      t_acc = t_next;
      ++iters_total;

      const double delta = (z - z_prev).lpNorm<Eigen::Infinity>();
      const double scale = std::max(z.lpNorm<Eigen::Infinity>(), threshold);
      if (delta <= stage_tol * scale) {
        stage_converged = true;
        break;
      }
    }

    kernels::matvec(Aw, z, az);
    const double residual = (az - y).norm();

    unscale(z, s_curr);
    const Polish polish = try_support_polish(A, y, s_curr, weights,
                                             cfg.epsilon, threshold,
                                             cfg.nonneg);
    if (polish.accepted) {
      s_curr = polish.s;
      done = true;
      path_completed = true;
      break;
    }
    if (cfg.epsilon > 0.0 && residual <= cfg.epsilon) {
      done = true;
      path_completed = true;
      break;
    }
    if (final_stage) {
      path_completed = stage_converged;
      break;
    }
    lambda = std::max(lambda * shrink, lambda_floor);
  }
  if (!done) unscale(z, s_curr);

  rec.s_hat = s_curr;
  Eigen::VectorXd as_orig;
  kernels::matvec(A, s_curr, as_orig);
  rec.residual_l2 = (as_orig - y).norm();
  rec.iterations_used = iters_total;
  rec.converged = path_completed &&
                  rec.residual_l2 <= cfg.epsilon + cfg.convergence_tol;
  return rec;
}

std::optional<Eigen::VectorXd> l0_oracle(const Eigen::MatrixXd& A,
                                         const Eigen::VectorXd& y, int k_max) {
  check_inputs(A, y);
  const Eigen::Index n = A.cols();
  if (n > 24 || k_max > 3)
    throw SizeError("l0_oracle: limited to n <= 24 and k_max <= 3");
  if (k_max < 0) throw SizeError("l0_oracle: k_max must be >= 0");

  constexpr double kResidualTol = 1e-8;
  if (y.norm() <= kResidualTol) return Eigen::VectorXd::Zero(n);

  for (int size = 1; size <= k_max; ++size) {
    bool found = false;
    double best_l1 = 0.0;
    Eigen::VectorXd best;
    // Lexicographic enumeration of all supports of the current size.
    std::vector<int> idx(size);
    for (int i = 0; i < size; ++i) idx[i] = i;
    Eigen::MatrixXd As(A.rows(), size);
    while (true) {
      for (int c = 0; c < size; ++c) As.col(c) = A.col(idx[c]);
      const Eigen::VectorXd z = As.colPivHouseholderQr().solve(y);
      if (z.allFinite() && (As * z - y).norm() <= kResidualTol) {
        const double l1 = z.lpNorm<1>();
        if (!found || l1 < best_l1) {
          found = true;
          best_l1 = l1;
          best = Eigen::VectorXd::Zero(n);
          for (int c = 0; c < size; ++c) best[idx[c]] = z[c];
        }
      }
      int pos = size - 1;
      while (pos >= 0 && idx[pos] == n - size + pos) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int c = pos + 1; c < size; ++c) idx[c] = idx[c - 1] + 1;
    }
    if (found) return best;
  }
  return std::nullopt;
}

}  // namespace chase
