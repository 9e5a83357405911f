/**
 * @file mimo.hpp
 * @brief System model: channels, cluster partitioning, QAM mapping, noise.
 *
 * Conventions (fixed across the library):
 *  - Uplink channel H is B x U (basestation antennas x single-antenna users),
 *    i.i.d. CN(0,1) entries under the Rayleigh model.
 *  - The downlink channel is the reciprocal H^H (U x B).
 *  - Antennas are split into C clusters of B_c rows; partitioning is by
 *    contiguous row blocks in antenna order.
 *  - Per-user symbol energy E_x; SNR is defined as U * E_x / N0.
 */
#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "dcd/numerics.hpp"
#include "dcd/rng.hpp"

namespace dcd {

struct ClusterLayout {
  std::vector<std::size_t> sizes;  // rows per cluster, in antenna order

  std::size_t clusters() const { return sizes.size(); }
  std::size_t total_rows() const {
    return std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  }

  /// Single cluster holding all B rows.
  static ClusterLayout whole(std::size_t b) { return {{b}}; }

  /// C equal clusters; throws if B is not divisible by C.
  static ClusterLayout uniform(std::size_t b, std::size_t c);
};

struct ChannelRealization {
  ComplexMatrix h;  // B x U uplink matrix
  std::uint64_t seed = 0;
  ClusterLayout layout;
};

/// i.i.d. CN(0,1) channel, entries drawn in column-major order from the
/// stream keyed by (seed, channel, 0). Requires B >= U >= 1.
ChannelRealization gen_rayleigh(std::size_t b, std::size_t u, std::uint64_t seed);

/// Split H into per-cluster row blocks. Throws if the layout row count does
/// not match H.
std::vector<ComplexMatrix> partition_rows(const ComplexMatrix& h, const ClusterLayout& layout);

/// Inverse of partition_rows.
ComplexMatrix stack_rows(const std::vector<ComplexMatrix>& blocks);

/// Square QAM constellation with a per-axis Gray labeling. Point index is the
/// symbol's bit label: the first half of the bits (MSB first) selects the
/// in-phase level, the second half the quadrature level. Mean energy is
/// normalized to E_x exactly.
class Constellation {
 public:
  /// order in {4, 16, 64}.
  static Constellation qam(unsigned order, double ex = 1.0);

  unsigned order() const { return static_cast<unsigned>(points_.size()); }
  unsigned bits_per_symbol() const { return bits_; }
  double energy() const { return ex_; }
  const std::vector<cf64>& points() const { return points_; }

  /// Nearest constellation point; distance ties break to the lowest index.
  unsigned slice(cf64 y) const;

 private:
  Constellation() = default;
  std::vector<cf64> points_;
  unsigned bits_ = 0;
  double ex_ = 0.0;
};

/// Map bits (bits_per_symbol per drawn symbol, MSB first) to symbols.
/// Bit count must be a multiple of bits_per_symbol.
ComplexVector modulate(const std::vector<std::uint8_t>& bits, const Constellation& c);

/// Hard nearest-point demapping back to bits.
std::vector<std::uint8_t> demodulate_hard(const ComplexVector& symbols, const Constellation& c);

/// y + CN(0, n0) noise per entry, from stream (seed, noise, 0). n0 may be 0.
ComplexVector awgn(const ComplexVector& y, double n0, std::uint64_t seed);
ComplexVector awgn(const ComplexVector& y, double n0, RngStream& stream);

/// N0 for a target SNR (dB): N0 = U * E_x / 10^(snr/10).
double snr_to_n0(double snr_db, std::size_t users, double ex);

/// Binary channel-matrix file: magic "DCDM", uint32 rows, uint32 cols, then
/// row-major (re, im) little-endian fp64 pairs.
void save_channel(const std::string& path, const ComplexMatrix& h);
ComplexMatrix load_channel(const std::string& path);

}  // namespace dcd
