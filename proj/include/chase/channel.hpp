#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

#include "chase/field.hpp"

namespace chase {

// n x n gain matrix: column i holds the gains from a source in grid i to
// every receiver grid j, so received power is x = psi * s. Gains follow a
// Rayleigh-faded power law: C_ij = |G_ij| / d_ij^beta with G_ij complex
// Gaussian. One realization per build; the recovery process uses the same
// matrix that produced the samples.
struct ChannelMatrix {
  Eigen::MatrixXd psi;
  double beta = 3.0;
  double sigma0 = 0.5;
  double d_min_m = 0.0;

  int n() const { return static_cast<int>(psi.rows()); }
};

ChannelMatrix build_channel(const GridField& field, double beta, double sigma0,
                            double d_min_m, std::uint64_t rng_seed);

// x = psi * s
Eigen::VectorXd propagate(const ChannelMatrix& channel,
                          const Eigen::VectorXd& s);

// Binary replay dump: 16-byte header ("PSIM", int32 LE n, float64 LE beta)
// followed by n*n row-major float64 entries.
void write_psi_dump(const ChannelMatrix& channel, const std::string& path);

struct PsiDump {
  Eigen::MatrixXd psi;
  double beta = 0.0;
};
PsiDump read_psi_dump(const std::string& path);

}  // namespace chase
