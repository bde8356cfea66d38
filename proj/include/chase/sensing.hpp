#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chase/channel.hpp"
#include "chase/field.hpp"

namespace chase {

// Accumulated measurement plan. Row m of the implied selector matrix picks
// grid tasked[m]; samples[m] is the (possibly noisy) reading taken there.
// Entries are append-only: a sensor samples once, early rows never change.
struct SamplePlan {
  struct Round {
    int round = 0;
    int count_added = 0;
  };

  std::vector<int> tasked;
  std::vector<double> samples;
  std::vector<Round> rounds;

  int m() const { return static_cast<int>(tasked.size()); }
  bool contains(int grid_index) const;
};

// Additive white Gaussian measurement noise at a given SNR; absent snr_db
// means noise-free sampling.
struct NoiseSpec {
  std::optional<double> snr_db;
  std::uint64_t rng_seed = 0;

  static NoiseSpec none() { return {}; }
  static NoiseSpec at_snr(double snr_db, std::uint64_t seed) {
    return {snr_db, seed};
  }
};

// M x n binary selector: row m is e_{tasked[m]}^T.
Eigen::MatrixXd phi_matrix(const SamplePlan& plan, int n);

// Appends readings x[g] + eta for every not-yet-tasked g in new_indices
// (already-tasked ones are skipped). The noise variance is
// mean(clean^2) * 10^(-snr/10) over the clean values of the extended plan;
// each realization is keyed by its position so earlier samples are frozen.
SamplePlan take_samples(const SamplePlan& plan,
                        const std::vector<int>& new_indices,
                        const Eigen::VectorXd& x, const NoiseSpec& noise,
                        const GridField& field);

// A = Phi * Psi: row m of A is row tasked[m] of Psi.
Eigen::MatrixXd effective_sensing_matrix(const SamplePlan& plan,
                                         const ChannelMatrix& channel);

Eigen::VectorXd samples_vector(const SamplePlan& plan);

// Residual bound suggested by the declared SNR: sigma_hat * sqrt(M), with
// sigma_hat^2 estimated from the measured sample power. Zero when noise-free.
double suggested_residual_bound(const NoiseSpec& noise,
                                const std::vector<double>& samples);

std::string plan_to_json(const SamplePlan& plan);
SamplePlan plan_from_json(const std::string& text);

}  // namespace chase
