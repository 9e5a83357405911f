/**
 * @file cluster.hpp
 * @brief In-process simulation of the decentralized basestation: per-cluster
 *        workers, the fusion/broadcast node, and interconnect accounting.
 *
 * A round processes a batch of subcarriers under one configuration. Every
 * payload that crosses the cluster/center boundary is logged as a
 * MessageRecord whose byte size reflects the serialized wire precision:
 * complex samples cost bytes_per_complex(format), real side values (the
 * per-cluster variance under optimal fusion, the matched filter's partial
 * energies) cost half that.
 *
 * Centralized reference methods are modeled as raw-sample forwarding: each
 * cluster ships its B_c receive samples (uplink) or receives its B_c
 * beamformer samples (downlink) per subcarrier.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dcd/detect.hpp"
#include "dcd/mimo.hpp"
#include "dcd/precode.hpp"

namespace dcd {

enum class MsgDirection : std::uint8_t { cluster_to_center, center_to_cluster };

struct MessageRecord {
  MsgDirection direction;
  std::uint32_t cluster_id;
  std::uint32_t subcarrier;
  std::uint64_t payload_elements;  // complex samples
  std::uint64_t aux_reals;         // real side values
  std::uint64_t bytes;
  PrecisionFormat precision;
};

MessageRecord make_message(MsgDirection dir, std::uint32_t cluster_id,
                           std::uint32_t subcarrier, std::uint64_t elements,
                           std::uint64_t aux_reals, PrecisionFormat f);

struct MessageLog {
  std::vector<MessageRecord> records;

  void add(const MessageRecord& r) { records.push_back(r); }
  std::uint64_t total_bytes() const;
  /// Columns: direction,cluster_id,subcarrier,elements,bytes,precision
  void write_csv(const std::string& path) const;
};

struct InterconnectSummary {
  std::uint64_t messages = 0;
  std::uint64_t uplink_bytes = 0;    // cluster -> center
  std::uint64_t downlink_bytes = 0;  // center -> cluster
  std::uint64_t total_bytes = 0;
  std::uint64_t payload_elements = 0;
  std::uint64_t aux_reals = 0;
  PrecisionFormat precision = PrecisionFormat::fp64;
  /// Bytes a naive centralized architecture would move: all B antennas'
  /// samples for every subcarrier, at the same precision.
  std::uint64_t baseline_bytes = 0;
  double reduction_ratio = 0.0;  // total_bytes / baseline_bytes
};

/// Aggregate a log. Throws if records mix precisions. An empty log yields
/// an all-zero summary.
InterconnectSummary interconnect_summary(const MessageLog& log,
                                         std::size_t total_antennas,
                                         std::size_t subcarriers);

enum class UplinkMethod : std::uint8_t { dcd, cd_centralized, lmmse_exact, mf };
enum class DownlinkMethod : std::uint8_t { dcd, cd_centralized, zf_exact, mf };

/// Per-subcarrier instances sharing one configuration.
struct SubcarrierBatch {
  ClusterLayout layout;
  std::size_t users = 0;
  std::vector<ComplexMatrix> h;                  // uplink B x U per subcarrier
  std::vector<std::vector<std::uint8_t>> bits;   // payload bits per subcarrier
  std::size_t size() const { return h.size(); }
};

/// Rayleigh channels and uniform payload bits for subcarriers
/// [first_trial, first_trial + count), deterministically keyed by
/// (seed, trial index).
SubcarrierBatch make_batch(const ClusterLayout& layout, std::size_t users,
                           const Constellation& c, std::size_t count,
                           std::uint64_t seed, std::uint64_t first_trial = 0);

struct TransmissionReport {
  std::uint64_t subcarriers = 0;
  std::uint64_t bits = 0;
  std::uint64_t bit_errors = 0;
  std::uint64_t flagged_trials = 0;   // downlink genie-gain failures
  std::uint64_t messages = 0;
  std::uint64_t message_bytes = 0;
  double residual_norm2 = 0.0;        // summed when collect_residuals is on

  double ber() const { return bits ? static_cast<double>(bit_errors) / static_cast<double>(bits) : 0.0; }
  void merge(const TransmissionReport& o);
};

struct EngineOptions {
  bool concurrent_clusters = false;
  bool collect_residuals = false;
};

struct UplinkRunResult {
  std::vector<ComplexVector> xhat;  // fused estimates per subcarrier
  TransmissionReport report;
};

/// Detect every subcarrier in the batch. Receiver noise is drawn from
/// streams keyed by (seed, noise, first_trial + s), so reruns with the same
/// seeds reproduce the same observations regardless of method.
UplinkRunResult run_uplink_round(const SubcarrierBatch& batch, const Constellation& c,
                                 const DetectorConfig& cfg, UplinkMethod method,
                                 std::uint64_t seed, std::uint64_t first_trial,
                                 MessageLog* log = nullptr,
                                 const EngineOptions& opts = {});

struct DownlinkRunResult {
  std::vector<ComplexVector> x;  // stacked beamformers per subcarrier
  TransmissionReport report;
};

/// Precode and deliver every subcarrier in the batch; BER is measured at the
/// genie-rescaled user receivers.
DownlinkRunResult run_downlink_round(const SubcarrierBatch& batch, const Constellation& c,
                                     const PrecoderConfig& cfg, DownlinkMethod method,
                                     double n0, std::uint64_t seed,
                                     std::uint64_t first_trial,
                                     MessageLog* log = nullptr,
                                     const EngineOptions& opts = {});

}  // namespace dcd
