/**
 * @file harness.hpp
 * @brief Experiment drivers: BER sweeps, convergence studies, throughput
 *        benchmarks, and their CSV outputs.
 *
 * A sweep accumulates Monte Carlo trials per SNR point until it has counted
 * at least min_bits bits (capped by max_trials). Channel, payload and noise
 * realizations are keyed by (seed, SNR index, trial), so every method and
 * T_max variant in one spec sees identical realizations and repeated runs
 * produce byte-identical CSV files.
 */
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dcd/cluster.hpp"

namespace dcd {

enum class LinkDirection : std::uint8_t { uplink, downlink };
enum class SweepMethod : std::uint8_t { dcd, cd, exact, mf };

std::string_view direction_name(LinkDirection d);
LinkDirection parse_direction(std::string_view name);
std::string_view method_name(SweepMethod m);
SweepMethod parse_method(std::string_view name);

struct SweepSpec {
  LinkDirection direction = LinkDirection::uplink;
  std::vector<SweepMethod> methods = {SweepMethod::dcd};
  std::size_t users = 8;
  std::size_t cluster_size = 32;  // B_c
  std::size_t clusters = 4;       // C; B = clusters * cluster_size
  unsigned qam_order = 16;
  double ex = 1.0;
  std::vector<double> snr_db = {0, 2, 4, 6, 8};
  std::vector<unsigned> t_max = {3};  // sweep counts for the CD methods
  PrecisionMode precision{};
  FusionMode fusion = FusionMode::optimal;
  std::uint64_t min_bits = 1'000'000;
  std::uint64_t max_trials = 4'000'000'000ULL;  // trials per point cap
  std::uint64_t seed = 1;
  std::size_t batch_subcarriers = 256;   // engine chunk size
  std::size_t bench_subcarriers = 1200;  // workload for throughput runs
  std::size_t instances = 200;           // convergence study sample size
  bool concurrent_clusters = false;

  std::size_t antennas() const { return cluster_size * clusters; }
  void validate() const;  // throws on inconsistent settings
  std::uint64_t hash() const;
};

struct BerPoint {
  SweepMethod method;
  unsigned t_max;  // 0 for the non-iterative methods
  double snr_db;
  std::uint64_t bits = 0;
  std::uint64_t errors = 0;
  double ber = 0.0;
  double ci_halfwidth = 0.0;  // 95% normal-approximation half width
  std::uint64_t message_bytes = 0;
  std::uint64_t flagged_trials = 0;
};

/// Run the sweep; optionally stream the points to a CSV file.
std::vector<BerPoint> run_ber_sweep(const SweepSpec& spec, const std::string& csv_path = "");

struct ConvergencePoint {
  unsigned t = 0;
  double median = 0.0;
  double p95 = 0.0;
};

/// Median and 95th-percentile relative distance between the T-sweep CD
/// solution and the direction's exact oracle (L-MMSE or min-norm ZF) over
/// spec.instances random systems at the first SNR point, for
/// T = 1 .. max(spec.t_max).
std::vector<ConvergencePoint> run_convergence_study(const SweepSpec& spec,
                                                    const std::string& csv_path = "");

struct BenchRow {
  LinkDirection direction;
  SweepMethod method;
  PrecisionFormat precision;
  std::size_t clusters = 0;
  std::size_t subcarriers = 0;
  double elapsed_s = 0.0;
  double subcarriers_per_s = 0.0;
  double per_cluster_rate = 0.0;  // cluster-subcarrier tasks per second
  std::uint64_t message_bytes = 0;
  double payload_gbps = 0.0;  // message bytes moved per wall-clock second
};

/// Wall-clock processing rates on prebuilt batches. Rates are host-specific
/// and not comparable across machines; the CSV says so in its header.
std::vector<BenchRow> run_throughput_bench(const SweepSpec& spec,
                                           const std::string& csv_path = "");

/// Exact bit error rate of hard-sliced square QAM with Gray labeling over an
/// AWGN channel at symbol SNR es_over_n0 (linear).
double analytic_qam_ber(unsigned order, double es_over_n0);

/// SNR (dB) where a measured BER curve crosses `target`, by log-linear
/// interpolation between bracketing grid points. NaN when nothing brackets it.
double snr_at_ber(const std::vector<std::pair<double, double>>& curve, double target);

/// Parse "start:step:stop" into a grid (inclusive of stop within 1e-9).
std::vector<double> parse_snr_range(const std::string& text);

}  // namespace dcd
