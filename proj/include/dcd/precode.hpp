/**
 * @file precode.hpp
 * @brief Downlink precoding: exact zero-forcing, coordinate descent on the
 *        ZF Lagrangian dual, matched filter, and the decentralized wrapper.
 *
 * The downlink channel is U x B. cd_precode runs coordinate descent on the
 * dual of  min ||x||^2  s.t.  H x = s:  every update exactly zeroes one
 * user's constraint residual against the unit-norm channel row, and the
 * iterate stays in the row space of H, so it converges to the minimum-norm
 * zero-forcing beamformer. Transmit power is applied afterwards by
 * power_scale; decentralized clusters each get an equal share rho/sqrt(C)
 * of the total amplitude budget rho.
 */
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dcd/detect.hpp"
#include "dcd/mimo.hpp"
#include "dcd/numerics.hpp"
#include "dcd/precision.hpp"

namespace dcd {

struct PrecoderConfig {
  double rho = 1.0;  // total transmit amplitude, ||x|| after scaling
  unsigned t_max = 3;
  PrecisionMode precision{};
};

struct PrecodeResult {
  ComplexVector x;                     // stacked beamformer, length B
  std::vector<ComplexVector> blocks;   // per-cluster beamformers
  double effective_gain = 0.0;         // Re(s^H H x) / ||s||^2 (genie scale)
};

/// Minimum-norm beamformer with H x = s exactly:
/// x = H^H (H H^H)^{-1} s. Throws on rank-deficient rows.
ComplexVector zf_exact(const ComplexMatrix& h_dl, const ComplexVector& s);

/// Dual coordinate descent toward the minimum-norm ZF beamformer, T_max
/// sweeps over users in ascending order from x = 0. Returns the
/// unnormalized beamformer; apply power_scale afterwards. Throws if some
/// user's channel row is all zero.
ComplexVector cd_precode(const ComplexMatrix& h_dl, const ComplexVector& s,
                         unsigned t_max, const PrecisionMode& prec = {},
                         SweepObserver* observer = nullptr);

/// Rescale x to Euclidean norm rho (throws on a zero vector or rho <= 0).
void power_scale(ComplexVector& x, double rho);

/// Per-cluster cd_precode on the broadcast symbol vector, each block scaled
/// to rho/sqrt(C). Requires every cluster to have at least U antennas; the
/// error message names the first offending cluster.
PrecodeResult decentralized_cd_precode(std::span<const ComplexMatrix> h_dl_blocks,
                                       const ComplexVector& s,
                                       const PrecoderConfig& cfg,
                                       bool concurrent = false);

/// Decentralized matched-filter (conjugate) beamformer, per-cluster blocks
/// scaled to rho/sqrt(C).
PrecodeResult mf_precode(std::span<const ComplexMatrix> h_dl_blocks,
                         const ComplexVector& s, double rho,
                         const PrecisionMode& prec = {});

struct ReceiveStats {
  ComplexVector y;            // per-user receive samples
  double beta = 0.0;          // genie gain estimate Re(s^H y0)/||s||^2
  std::uint64_t bits = 0;
  std::uint64_t bit_errors = 0;
  bool flagged = false;       // beta <= 0: counted at half the bits wrong
};

/// Apply the channel, add receiver noise, rescale by the genie gain and
/// slice. The reference bits are recovered from s itself (exact, since s is
/// a tuple of constellation points).
ReceiveStats downlink_receive_and_ber(const ComplexMatrix& h_dl,
                                      const ComplexVector& x,
                                      const ComplexVector& s, double n0,
                                      const Constellation& c, RngStream& noise);

}  // namespace dcd
