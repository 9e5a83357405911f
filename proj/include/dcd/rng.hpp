/**
 * @file rng.hpp
 * @brief Deterministic random streams.
 *
 * Every random quantity in the simulator is drawn from a stream keyed by
 * (master seed, purpose, index). Streams use std::mt19937_64 (whose output
 * sequence is fixed by the standard) seeded through a splitmix64 mix of the
 * key, and a hand-rolled Box-Muller transform for gaussians, so runs are
 * reproducible bit for bit on a given build and independent per key.
 */
#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace dcd {

/// Stream purposes; keeps independent uses of the same index uncorrelated.
enum class RngPurpose : std::uint64_t {
  channel = 1,
  noise = 2,
  payload_bits = 3,
  generic = 4,
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t z);

/// Seed for the (master, purpose, index) stream.
std::uint64_t derive_seed(std::uint64_t master, RngPurpose purpose, std::uint64_t index);

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}
  RngStream(std::uint64_t master, RngPurpose purpose, std::uint64_t index)
      : engine_(derive_seed(master, purpose, index)) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01();

  /// Standard normal via Box-Muller (pairs cached).
  double gaussian();

  /// Circularly symmetric complex gaussian with total variance `var`.
  std::complex<double> cgaussian(double var);

  /// One uniform random bit.
  unsigned bit();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
  std::uint64_t bit_buffer_ = 0;
  int bits_left_ = 0;
};

}  // namespace dcd
