#include "dcd/precode.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dcd {

namespace {

void check_downlink(const ComplexMatrix& h_dl, const ComplexVector& s) {
  if (h_dl.rows() == 0 || h_dl.cols() == 0)
    throw std::invalid_argument("precoder: empty channel matrix");
  if (s.size() != h_dl.rows())
    throw std::invalid_argument("precoder: symbol count must match user count");
}

/// Rows of the U x B downlink matrix, conjugated, as contiguous vectors.
std::vector<ComplexVector> conj_rows(const ComplexMatrix& h_dl) {
  const std::size_t u = h_dl.rows(), b = h_dl.cols();
  std::vector<ComplexVector> rows(u, ComplexVector(b));
  for (std::size_t j = 0; j < b; ++j) {
    const auto col = h_dl.col(j);
    for (std::size_t i = 0; i < u; ++i) rows[i][j] = std::conj(col[i]);
  }
  return rows;
}

}  // namespace

ComplexVector zf_exact(const ComplexMatrix& h_dl, const ComplexVector& s) {
  check_downlink(h_dl, s);
  const std::size_t u = h_dl.rows(), b = h_dl.cols();
  const auto rows = conj_rows(h_dl);
  ComplexMatrix a(u, u);
  for (std::size_t j = 0; j < u; ++j)
    for (std::size_t i = 0; i < u; ++i)
      a(i, j) = kernels::cdotc(rows[i].data(), rows[j].data(), b);
  ComplexVector z;
  try {
    z = hermitian_solve(a, s);
  } catch (const std::runtime_error&) {
    throw std::runtime_error("zf_exact: channel rows are rank deficient");
  }
  // x = H^H z; column j of H holds the per-user coefficients of antenna j.
  ComplexVector x(b);
  for (std::size_t j = 0; j < b; ++j)
    x[j] = kernels::cdotc(h_dl.col(j).data(), z.data(), u);
  return x;
}

ComplexVector cd_precode(const ComplexMatrix& h_dl, const ComplexVector& s,
                         unsigned t_max, const PrecisionMode& prec,
                         SweepObserver* observer) {
  check_downlink(h_dl, s);
  if (t_max == 0)
    throw std::invalid_argument("cd_precode: need at least one sweep");

  const std::size_t u = h_dl.rows(), b = h_dl.cols();
  const bool store_rounded = prec.rounds_storage();

  ComplexMatrix hs = h_dl;
  ComplexVector sb = s;
  if (store_rounded) {
    round_precision(hs, prec.format);
    round_precision(sb, prec.format);
  }

  // Unit-normalize the channel rows; fold the normalizer into the targets.
  auto rows = conj_rows(hs);
  std::vector<double> p(u);
  for (std::size_t i = 0; i < u; ++i) {
    const double e = kernels::norm2sq(rows[i].data(), b);
    if (e == 0.0)
      throw std::runtime_error("cd_precode: user " + std::to_string(i) +
                               " has an all-zero channel row");
    p[i] = 1.0 / std::sqrt(e);
  }
  if (store_rounded) round_precision(std::span<double>(p.data(), u), prec.format);
  for (std::size_t i = 0; i < u; ++i) {
    for (auto& v : rows[i]) v *= p[i];
    sb[i] *= p[i];
    if (store_rounded) {
      round_precision(rows[i], prec.format);
      sb[i] = round_precision(sb[i], prec.format);
    }
  }

  ComplexVector x(b, cf64{0.0, 0.0});
  for (unsigned t = 0; t < t_max; ++t) {
    for (std::size_t i = 0; i < u; ++i) {
      const cf64 resid = kernels::cdotc(rows[i].data(), x.data(), b) - sb[i];
      kernels::caxpy(-resid, rows[i].data(), x.data(), b);
      if (store_rounded) round_precision(x, prec.format);
      if (observer) observer->after_update(t, i, x, {});
    }
  }
  return x;
}

void power_scale(ComplexVector& x, double rho) {
  if (!(rho > 0.0))
    throw std::invalid_argument("power_scale: amplitude must be positive");
  if (x.empty())
    throw std::invalid_argument("power_scale: empty beamformer");
  const double n2 = kernels::norm2sq(x.data(), x.size());
  if (n2 == 0.0)
    throw std::runtime_error("power_scale: zero beamformer cannot be scaled");
  const double g = rho / std::sqrt(n2);
  for (auto& v : x) v *= g;
}

namespace {

PrecodeResult assemble_blocks(std::span<const ComplexMatrix> h_dl_blocks,
                              const ComplexVector& s,
                              std::vector<ComplexVector>&& blocks) {
  PrecodeResult res;
  res.blocks = std::move(blocks);
  std::size_t b = 0;
  for (const auto& blk : res.blocks) b += blk.size();
  res.x.reserve(b);
  ComplexVector combined(s.size(), cf64{0.0, 0.0});
  for (std::size_t c = 0; c < res.blocks.size(); ++c) {
    res.x.insert(res.x.end(), res.blocks[c].begin(), res.blocks[c].end());
    const ComplexVector yc = matvec(h_dl_blocks[c], res.blocks[c]);
    for (std::size_t i = 0; i < combined.size(); ++i) combined[i] += yc[i];
  }
  const double se = kernels::norm2sq(s.data(), s.size());
  if (se > 0.0) res.effective_gain = dotc(s, combined).real() / se;
  return res;
}

}  // namespace

PrecodeResult decentralized_cd_precode(std::span<const ComplexMatrix> h_dl_blocks,
                                       const ComplexVector& s,
                                       const PrecoderConfig& cfg,
                                       bool concurrent) {
  if (h_dl_blocks.empty())
    throw std::invalid_argument("decentralized_cd_precode: no clusters");
  const std::size_t u = s.size();
  for (std::size_t c = 0; c < h_dl_blocks.size(); ++c) {
    if (h_dl_blocks[c].rows() != u)
      throw std::invalid_argument("decentralized_cd_precode: cluster " +
                                  std::to_string(c) + " disagrees on user count");
    if (h_dl_blocks[c].cols() < u)
      throw std::invalid_argument(
          "decentralized_cd_precode: cluster " + std::to_string(c) + " has " +
          std::to_string(h_dl_blocks[c].cols()) + " antennas for " +
          std::to_string(u) + " users; local zero-forcing needs B_c >= U");
  }

  const std::size_t nc = h_dl_blocks.size();
  const double rho_c = cfg.rho / std::sqrt(static_cast<double>(nc));

  // Broadcast boundary: every cluster receives the symbol vector in the
  // wire precision.
  ComplexVector s_msg = s;
  if (cfg.precision.rounds()) round_precision(s_msg, cfg.precision.format);

  std::vector<ComplexVector> blocks(nc);
  run_cluster_workers(nc, concurrent, [&](std::size_t c) {
    ComplexVector xc = cd_precode(h_dl_blocks[c], s_msg, cfg.t_max, cfg.precision);
    power_scale(xc, rho_c);
    blocks[c] = std::move(xc);
  });
  return assemble_blocks(h_dl_blocks, s, std::move(blocks));
}

PrecodeResult mf_precode(std::span<const ComplexMatrix> h_dl_blocks,
                         const ComplexVector& s, double rho,
                         const PrecisionMode& prec) {
  if (h_dl_blocks.empty())
    throw std::invalid_argument("mf_precode: no clusters");
  const std::size_t u = s.size();
  const std::size_t nc = h_dl_blocks.size();
  const double rho_c = rho / std::sqrt(static_cast<double>(nc));

  ComplexVector s_msg = s;
  if (prec.rounds()) round_precision(s_msg, prec.format);

  std::vector<ComplexVector> blocks(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    const auto& h = h_dl_blocks[c];
    if (h.rows() != u)
      throw std::invalid_argument("mf_precode: cluster " + std::to_string(c) +
                                  " disagrees on user count");
    ComplexVector xc(h.cols());
    for (std::size_t j = 0; j < h.cols(); ++j)
      xc[j] = kernels::cdotc(h.col(j).data(), s_msg.data(), u);
    if (prec.rounds_storage()) round_precision(xc, prec.format);
    try {
      power_scale(xc, rho_c);
    } catch (const std::runtime_error&) {
      throw std::runtime_error("mf_precode: cluster " + std::to_string(c) +
                               " produced a zero beamformer");
    }
    blocks[c] = std::move(xc);
  }
  return assemble_blocks(h_dl_blocks, s, std::move(blocks));
}

ReceiveStats downlink_receive_and_ber(const ComplexMatrix& h_dl,
                                      const ComplexVector& x,
                                      const ComplexVector& s, double n0,
                                      const Constellation& c, RngStream& noise) {
  check_downlink(h_dl, s);
  if (x.size() != h_dl.cols())
    throw std::invalid_argument("downlink_receive_and_ber: beamformer length mismatch");

  ReceiveStats st;
  const ComplexVector y0 = matvec(h_dl, x);
  st.y = awgn(y0, n0, noise);

  const double se = kernels::norm2sq(s.data(), s.size());
  st.beta = se > 0.0 ? dotc(s, y0).real() / se : 0.0;

  const auto ref_bits = demodulate_hard(s, c);
  st.bits = ref_bits.size();
  if (!(st.beta > 0.0) || !std::isfinite(st.beta)) {
    st.flagged = true;
    st.bit_errors = st.bits / 2;
    return st;
  }

  ComplexVector shat = st.y;
  for (auto& v : shat) v /= st.beta;
  const auto hat_bits = demodulate_hard(shat, c);
  for (std::size_t i = 0; i < ref_bits.size(); ++i)
    st.bit_errors += ref_bits[i] != hat_bits[i];
  return st;
}

}  // namespace dcd
