#include "chase/channel.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <vector>

#include "chase/errors.hpp"
#include "chase/kernels.hpp"

namespace chase {

ChannelMatrix build_channel(const GridField& field, double beta, double sigma0,
                            double d_min_m, std::uint64_t rng_seed) {
  if (sigma0 <= 0.0) throw ConfigError("build_channel: sigma0 must be > 0");
  if (d_min_m <= 0.0) throw ConfigError("build_channel: d_min_m must be > 0");
  if (beta < 2.0 || beta > 5.0)
    std::fprintf(stderr,
                 "warning: decay exponent beta=%.3f outside the usual "
                 "[2.0, 5.0] range\n",
                 beta);

  ChannelMatrix channel;
  channel.beta = beta;
  channel.sigma0 = sigma0;
  channel.d_min_m = d_min_m;
  kernels::fill_rayleigh_pathloss(channel.psi, field.side_len,
                                  field.grid_size_m, beta, sigma0, d_min_m,
                                  rng_seed);
  return channel;
}

Eigen::VectorXd propagate(const ChannelMatrix& channel,
                          const Eigen::VectorXd& s) {
  if (s.size() != channel.psi.cols())
    throw DimensionError("propagate: signal length " +
                         std::to_string(s.size()) + " != n " +
                         std::to_string(channel.psi.cols()));
  Eigen::VectorXd x;
  kernels::matvec(channel.psi, s, x);
  return x;
}

namespace {
constexpr char kPsiMagic[4] = {'P', 'S', 'I', 'M'};
}

void write_psi_dump(const ChannelMatrix& channel, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_psi_dump: cannot open " + path);
  const std::int32_t n = channel.n();
  out.write(kPsiMagic, 4);
  out.write(reinterpret_cast<const char*>(&n), 4);
  out.write(reinterpret_cast<const char*>(&channel.beta), 8);
  std::vector<double> row(n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) row[i] = channel.psi(j, i);
    out.write(reinterpret_cast<const char*>(row.data()), 8L * n);
  }
  if (!out) throw IoError("write_psi_dump: write failed for " + path);
}

PsiDump read_psi_dump(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_psi_dump: cannot open " + path);
  char magic[4];
  std::int32_t n = 0;
  PsiDump dump;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&n), 4);
  in.read(reinterpret_cast<char*>(&dump.beta), 8);
  if (!in || std::memcmp(magic, kPsiMagic, 4) != 0)
    throw IoError("read_psi_dump: bad header in " + path);
  if (n < 1) throw IoError("read_psi_dump: invalid dimension in " + path);
  dump.psi.resize(n, n);
  std::vector<double> row(n);
  for (int j = 0; j < n; ++j) {
    in.read(reinterpret_cast<char*>(row.data()), 8L * n);
    for (int i = 0; i < n; ++i) dump.psi(j, i) = row[i];
  }
  if (!in) throw IoError("read_psi_dump: truncated file " + path);
  return dump;
}

}  // namespace chase
