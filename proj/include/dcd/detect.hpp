/**
 * @file detect.hpp
 * @brief Uplink data detection: coordinate descent, exact L-MMSE, matched
 *        filter, and the decentralized fusion wrapper.
 *
 * The coordinate-descent detector minimizes
 *     J(x) = ||y - H x||^2 + (N0/E_x) ||x||^2
 * one user coordinate at a time. Each cluster runs it on its own antenna
 * block; the fusion node then combines the per-cluster estimates with
 * inverse-variance weights derived from the clusters' post-equalization
 * noise variances (or uniformly).
 */
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dcd/numerics.hpp"
#include "dcd/precision.hpp"

namespace dcd {

enum class FusionMode : std::uint8_t { optimal, uniform };

/// Inspection hook invoked after every coordinate update; used by tests to
/// check per-update descent and residual bookkeeping. `residual` is empty
/// for algorithms that do not maintain one.
class SweepObserver {
 public:
  virtual ~SweepObserver() = default;
  virtual void after_update(unsigned sweep, std::size_t coord,
                            std::span<const cf64> x,
                            std::span<const cf64> residual) = 0;
};

struct DetectorConfig {
  double n0 = 0.0;
  double ex = 1.0;
  unsigned t_max = 3;
  FusionMode fusion = FusionMode::optimal;
  PrecisionMode precision{};
};

/// One cluster's view of the uplink: its antenna rows and receive samples.
struct ClusterData {
  ComplexMatrix h;  // B_c x U
  ComplexVector y;  // B_c
};

/// Exact L-MMSE estimate (H^H H + (N0/E_x) I)^{-1} H^H y.
ComplexVector lmmse_exact(const ComplexMatrix& h, const ComplexVector& y,
                          double n0, double ex);

/// Coordinate-descent L-MMSE detection, T_max full sweeps over the users in
/// ascending order from a zero initial estimate. Precision emulation rounds
/// per `prec` (full_storage scope rounds ingested inputs, the preprocessed
/// per-user constants, and every stored update).
ComplexVector cd_detect(const ComplexMatrix& h, const ComplexVector& y,
                        double n0, double ex, unsigned t_max,
                        const PrecisionMode& prec = {},
                        SweepObserver* observer = nullptr);

/// Post-equalization noise variance of an L-MMSE cluster estimate:
/// (E_x/U) * trace((I + (E_x/N0) H_c^H H_c)^{-1}). Requires N0 > 0.
double post_eq_variance(const ComplexMatrix& hc, double n0, double ex);

/// Inverse-variance fusion weights, normalized to sum to one.
std::vector<double> fusion_weights(std::span<const double> sigma2);

struct DetectionResult {
  ComplexVector xhat;                 // fused estimate
  std::vector<ComplexVector> local;   // per-cluster estimates as transmitted
  std::vector<double> sigma2;         // per-cluster variances (optimal fusion)
  std::vector<double> weights;        // fusion weights applied
};

/// Per-cluster cd_detect plus weighted fusion in ascending cluster order.
/// Message payloads (the local estimates, and the variance scalars under
/// optimal fusion) are rounded to the configured precision before fusion.
/// With `concurrent` set, clusters run on their own threads; the fused
/// output is identical either way.
DetectionResult decentralized_cd_detect(std::span<const ClusterData> clusters,
                                        const DetectorConfig& cfg,
                                        bool concurrent = false);

/// Decentralized matched filter: clusters send partial correlations
/// h_{u,c}^H y_c and partial column energies; the center sums and divides.
/// Throws if some user's total channel energy is zero.
ComplexVector mf_detect(std::span<const ClusterData> clusters,
                        const PrecisionMode& prec = {});

/// Multiplicative bias of the L-MMSE estimator per user,
/// beta_u = 1 - kappa * [(H^H H + kappa I)^{-1}]_{uu} with kappa = N0/E_x.
/// Dividing an (exact or converged) L-MMSE estimate by beta_u makes hard
/// slicing consistent with the unshrunk constellation; the measurement
/// harness applies it to every MMSE-family estimate.
std::vector<double> mmse_bias_factors(const ComplexMatrix& h, double n0, double ex);

/// Run `worker(c)` for c in [0, count), either inline in ascending order or
/// on one thread per cluster; worker exceptions are rethrown after joining.
void run_cluster_workers(std::size_t count, bool concurrent,
                         const std::function<void(std::size_t)>& worker);

}  // namespace dcd
