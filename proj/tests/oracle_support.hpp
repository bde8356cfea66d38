#pragma once

// Test-side uniqueness checker for sparse exact fits: enumerates every
// support up to k_max on its own (independent of the library oracle) and
// reports whether all minimal-size solutions coincide.

#include <Eigen/Core>
#include <Eigen/QR>
#include <optional>
#include <vector>

namespace chase_test {

struct SparseFitCensus {
  int min_size = -1;  // -1: nothing fits
  std::vector<Eigen::VectorXd> solutions;  // deduplicated, minimal size
};

inline SparseFitCensus enumerate_sparse_fits(const Eigen::MatrixXd& A,
                                             const Eigen::VectorXd& y,
                                             int k_max,
                                             double residual_tol = 1e-8,
                                             double dedup_tol = 1e-6) {
  SparseFitCensus census;
  const int n = static_cast<int>(A.cols());
  if (y.norm() <= residual_tol) {
    census.min_size = 0;
    census.solutions.push_back(Eigen::VectorXd::Zero(n));
    return census;
  }
  for (int size = 1; size <= k_max; ++size) {
    std::vector<int> idx(size);
    for (int i = 0; i < size; ++i) idx[i] = i;
    Eigen::MatrixXd As(A.rows(), size);
    while (true) {
      for (int c = 0; c < size; ++c) As.col(c) = A.col(idx[c]);
      const Eigen::VectorXd z = As.colPivHouseholderQr().solve(y);
      if (z.allFinite() && (As * z - y).norm() <= residual_tol) {
        Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
        for (int c = 0; c < size; ++c) s[idx[c]] = z[c];
        bool duplicate = false;
        for (const auto& known : census.solutions)
          if ((known - s).lpNorm<Eigen::Infinity>() <= dedup_tol)
            duplicate = true;
        if (!duplicate) census.solutions.push_back(std::move(s));
      }
      int pos = size - 1;
      while (pos >= 0 && idx[pos] == n - size + pos) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int c = pos + 1; c < size; ++c) idx[c] = idx[c - 1] + 1;
    }
    if (!census.solutions.empty()) {
      census.min_size = size;
      return census;
    }
  }
  return census;
}

inline bool unique_sparse_fit(const SparseFitCensus& census) {
  return census.min_size >= 0 && census.solutions.size() == 1;
}

}  // namespace chase_test
