#include "dcd/mimo.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>

namespace dcd {

ClusterLayout ClusterLayout::uniform(std::size_t b, std::size_t c) {
  if (c == 0 || b == 0 || b % c != 0)
    throw std::invalid_argument("ClusterLayout::uniform: antenna count must be a positive multiple of the cluster count");
  return {std::vector<std::size_t>(c, b / c)};
}

ChannelRealization gen_rayleigh(std::size_t b, std::size_t u, std::uint64_t seed) {
  if (u == 0 || b < u)
    throw std::invalid_argument("gen_rayleigh: need B >= U >= 1");
  ChannelRealization r;
  r.h = ComplexMatrix(b, u);
  r.seed = seed;
  r.layout = ClusterLayout::whole(b);
  RngStream stream(seed, RngPurpose::channel, 0);
  for (auto& z : r.h.flat()) z = stream.cgaussian(1.0);
  return r;
}

std::vector<ComplexMatrix> partition_rows(const ComplexMatrix& h, const ClusterLayout& layout) {
  if (layout.clusters() == 0)
    throw std::invalid_argument("partition_rows: empty layout");
  if (layout.total_rows() != h.rows())
    throw std::invalid_argument("partition_rows: layout rows do not sum to the matrix row count");
  std::vector<ComplexMatrix> blocks;
  blocks.reserve(layout.clusters());
  std::size_t row0 = 0;
  for (std::size_t bc : layout.sizes) {
    ComplexMatrix blk(bc, h.cols());
    for (std::size_t j = 0; j < h.cols(); ++j)
      for (std::size_t i = 0; i < bc; ++i) blk(i, j) = h(row0 + i, j);
    blocks.push_back(std::move(blk));
    row0 += bc;
  }
  return blocks;
}

ComplexMatrix stack_rows(const std::vector<ComplexMatrix>& blocks) {
  if (blocks.empty()) throw std::invalid_argument("stack_rows: no blocks");
  const std::size_t cols = blocks.front().cols();
  std::size_t rows = 0;
  for (const auto& b : blocks) {
    if (b.cols() != cols) throw std::invalid_argument("stack_rows: column counts differ");
    rows += b.rows();
  }
  ComplexMatrix h(rows, cols);
  std::size_t row0 = 0;
  for (const auto& b : blocks) {
    for (std::size_t j = 0; j < cols; ++j)
      for (std::size_t i = 0; i < b.rows(); ++i) h(row0 + i, j) = b(i, j);
    row0 += b.rows();
  }
  return h;
}

Constellation Constellation::qam(unsigned order, double ex) {
  if (order != 4 && order != 16 && order != 64)
    throw std::invalid_argument("Constellation::qam: order must be 4, 16 or 64");
  if (!(ex > 0.0))
    throw std::invalid_argument("Constellation::qam: symbol energy must be positive");

  Constellation c;
  unsigned levels = 2;
  c.bits_ = 2;
  while (levels * levels < order) {
    levels <<= 1;
    c.bits_ += 2;
  }
  const unsigned axis_bits = c.bits_ / 2;
  c.ex_ = ex;

  // Per-axis amplitudes +-1, +-3, ... scaled so the mean symbol energy is ex.
  const double scale = std::sqrt(3.0 * ex / (2.0 * (levels * levels - 1.0)));
  std::vector<double> level_of_label(levels);
  for (unsigned pos = 0; pos < levels; ++pos) {
    const unsigned label = pos ^ (pos >> 1);
    level_of_label[label] = scale * (2.0 * pos - (levels - 1.0));
  }

  c.points_.resize(order);
  for (unsigned idx = 0; idx < order; ++idx) {
    const unsigned li = idx >> axis_bits;
    const unsigned lq = idx & (levels - 1);
    c.points_[idx] = {level_of_label[li], level_of_label[lq]};
  }

  // Sanity: Gray labels of amplitude-adjacent levels differ in one bit, and
  // the normalization really hits ex.
  for (unsigned pos = 0; pos + 1 < levels; ++pos) {
    const unsigned a = pos ^ (pos >> 1);
    const unsigned b = (pos + 1) ^ ((pos + 1) >> 1);
    if (__builtin_popcount(a ^ b) != 1)
      throw std::logic_error("Constellation::qam: broken Gray labeling");
  }
  double mean = 0.0;
  for (const auto& p : c.points_) mean += std::norm(p);
  mean /= order;
  if (std::abs(mean - ex) > 1e-12 * ex)
    throw std::logic_error("Constellation::qam: energy normalization off");
  return c;
}

unsigned Constellation::slice(cf64 y) const {
  unsigned best = 0;
  double best_d = std::norm(y - points_[0]);
  for (unsigned i = 1; i < points_.size(); ++i) {
    const double d = std::norm(y - points_[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

ComplexVector modulate(const std::vector<std::uint8_t>& bits, const Constellation& c) {
  const unsigned bps = c.bits_per_symbol();
  if (bits.empty() || bits.size() % bps != 0)
    throw std::invalid_argument("modulate: bit count must be a positive multiple of bits per symbol");
  ComplexVector out(bits.size() / bps);
  for (std::size_t s = 0; s < out.size(); ++s) {
    unsigned label = 0;
    for (unsigned k = 0; k < bps; ++k) {
      const std::uint8_t bit = bits[s * bps + k];
      if (bit > 1) throw std::invalid_argument("modulate: bits must be 0 or 1");
      label = (label << 1) | bit;
    }
    out[s] = c.points()[label];
  }
  return out;
}

std::vector<std::uint8_t> demodulate_hard(const ComplexVector& symbols, const Constellation& c) {
  const unsigned bps = c.bits_per_symbol();
  std::vector<std::uint8_t> bits(symbols.size() * bps);
  for (std::size_t s = 0; s < symbols.size(); ++s) {
    const unsigned label = c.slice(symbols[s]);
    for (unsigned k = 0; k < bps; ++k)
      bits[s * bps + k] = static_cast<std::uint8_t>((label >> (bps - 1 - k)) & 1u);
  }
  return bits;
}

ComplexVector awgn(const ComplexVector& y, double n0, RngStream& stream) {
  if (n0 < 0.0) throw std::invalid_argument("awgn: noise power must be nonnegative");
  ComplexVector out = y;
  if (n0 == 0.0) return out;
  for (auto& v : out) v += stream.cgaussian(n0);
  return out;
}

ComplexVector awgn(const ComplexVector& y, double n0, std::uint64_t seed) {
  RngStream stream(seed, RngPurpose::noise, 0);
  return awgn(y, n0, stream);
}

double snr_to_n0(double snr_db, std::size_t users, double ex) {
  if (users == 0 || !(ex > 0.0))
    throw std::invalid_argument("snr_to_n0: need users >= 1 and positive symbol energy");
  return static_cast<double>(users) * ex / std::pow(10.0, snr_db / 10.0);
}

void save_channel(const std::string& path, const ComplexMatrix& h) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("save_channel: cannot open " + path);
  const char magic[4] = {'D', 'C', 'D', 'M'};
  const std::uint32_t rows = static_cast<std::uint32_t>(h.rows());
  const std::uint32_t cols = static_cast<std::uint32_t>(h.cols());
  bool ok = std::fwrite(magic, 1, 4, f) == 4 &&
            std::fwrite(&rows, 4, 1, f) == 1 && std::fwrite(&cols, 4, 1, f) == 1;
  for (std::size_t i = 0; ok && i < h.rows(); ++i)
    for (std::size_t j = 0; ok && j < h.cols(); ++j) {
      const double re_im[2] = {h(i, j).real(), h(i, j).imag()};
      ok = std::fwrite(re_im, sizeof(double), 2, f) == 2;
    }
  std::fclose(f);
  if (!ok) throw std::runtime_error("save_channel: short write to " + path);
}

ComplexMatrix load_channel(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("load_channel: cannot open " + path);
  char magic[4];
  std::uint32_t rows = 0, cols = 0;
  bool ok = std::fread(magic, 1, 4, f) == 4 && std::memcmp(magic, "DCDM", 4) == 0 &&
            std::fread(&rows, 4, 1, f) == 1 && std::fread(&cols, 4, 1, f) == 1 &&
            rows > 0 && cols > 0;
  ComplexMatrix h;
  if (ok) {
    h = ComplexMatrix(rows, cols);
    for (std::size_t i = 0; ok && i < rows; ++i)
      for (std::size_t j = 0; ok && j < cols; ++j) {
        double re_im[2];
        ok = std::fread(re_im, sizeof(double), 2, f) == 2;
        if (ok) h(i, j) = {re_im[0], re_im[1]};
      }
  }
  std::fclose(f);
  if (!ok) throw std::runtime_error("load_channel: bad or truncated file " + path);
  return h;
}

}  // namespace dcd
