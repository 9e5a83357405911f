#include "dcd/rng.hpp"

#include <cmath>
#include <numbers>

namespace dcd {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, RngPurpose purpose, std::uint64_t index) {
  return mix64(mix64(mix64(master) ^ static_cast<std::uint64_t>(purpose)) ^ index);
}

double RngStream::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform01();
  const double u2 = uniform01();
  if (u1 < 0x1.0p-100) u1 = 0x1.0p-100;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(t);
  has_spare_ = true;
  return r * std::cos(t);
}

std::complex<double> RngStream::cgaussian(double var) {
  const double s = std::sqrt(var / 2.0);
  const double re = gaussian();
  const double im = gaussian();
  return {s * re, s * im};
}

unsigned RngStream::bit() {
  if (bits_left_ == 0) {
    bit_buffer_ = engine_();
    bits_left_ = 64;
  }
  const unsigned b = static_cast<unsigned>(bit_buffer_ & 1u);
  bit_buffer_ >>= 1;
  --bits_left_;
  return b;
}

}  // namespace dcd
