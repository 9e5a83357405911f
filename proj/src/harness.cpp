#include "dcd/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace dcd {

std::string_view direction_name(LinkDirection d) {
  return d == LinkDirection::uplink ? "uplink" : "downlink";
}

LinkDirection parse_direction(std::string_view name) {
  if (name == "uplink" || name == "ul") return LinkDirection::uplink;
  if (name == "downlink" || name == "dl") return LinkDirection::downlink;
  throw std::invalid_argument("unknown direction: " + std::string(name));
}

std::string_view method_name(SweepMethod m) {
  switch (m) {
    case SweepMethod::dcd: return "dcd";
    case SweepMethod::cd: return "cd";
    case SweepMethod::exact: return "exact";
    case SweepMethod::mf: return "mf";
  }
  return "unknown";
}

SweepMethod parse_method(std::string_view name) {
  if (name == "dcd") return SweepMethod::dcd;
  if (name == "cd") return SweepMethod::cd;
  if (name == "exact") return SweepMethod::exact;
  if (name == "mf") return SweepMethod::mf;
  throw std::invalid_argument("unknown method: " + std::string(name));
}

void SweepSpec::validate() const {
  if (users == 0 || cluster_size == 0 || clusters == 0)
    throw std::invalid_argument("sweep: users, cluster size and cluster count must be positive");
  if (methods.empty()) throw std::invalid_argument("sweep: no methods selected");
  if (snr_db.empty()) throw std::invalid_argument("sweep: empty SNR grid");
  if (t_max.empty()) throw std::invalid_argument("sweep: empty T_max list");
  for (unsigned t : t_max)
    if (t == 0) throw std::invalid_argument("sweep: T_max entries must be >= 1");
  if (!(ex > 0.0)) throw std::invalid_argument("sweep: symbol energy must be positive");
  if (min_bits < 10'000)
    throw std::invalid_argument("sweep: min_bits must be at least 10000");
  if (max_trials == 0 || max_trials > 0xffffffffULL)
    throw std::invalid_argument("sweep: max_trials must be in [1, 2^32-1]");
  if (batch_subcarriers == 0)
    throw std::invalid_argument("sweep: batch size must be positive");
  if (antennas() < users)
    throw std::invalid_argument("sweep: need at least as many antennas as users");
  if (direction == LinkDirection::downlink && cluster_size < users)
    throw std::invalid_argument(
        "sweep: downlink clusters need at least as many antennas as users (B_c >= U)");
  Constellation::qam(qam_order, ex);  // validates the order
}

std::uint64_t SweepSpec::hash() const {
  char buf[512];
  int n = std::snprintf(
      buf, sizeof buf, "%s|u%zu|bc%zu|c%zu|q%u|ex%.17g|f%s|sc%s|fu%d|mb%llu|mt%llu|s%llu",
      std::string(direction_name(direction)).c_str(), users, cluster_size, clusters,
      qam_order, ex, std::string(format_name(precision.format)).c_str(),
      std::string(scope_name(precision.scope)).c_str(), static_cast<int>(fusion),
      static_cast<unsigned long long>(min_bits),
      static_cast<unsigned long long>(max_trials),
      static_cast<unsigned long long>(seed));
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const char* p, int len) {
    for (int i = 0; i < len; ++i) {
      h ^= static_cast<unsigned char>(p[i]);
      h *= 0x100000001b3ULL;
    }
  };
  mix(buf, n);
  for (auto m : methods) {
    n = std::snprintf(buf, sizeof buf, "|m%s", std::string(method_name(m)).c_str());
    mix(buf, n);
  }
  for (double s : snr_db) {
    n = std::snprintf(buf, sizeof buf, "|snr%.17g", s);
    mix(buf, n);
  }
  for (unsigned t : t_max) {
    n = std::snprintf(buf, sizeof buf, "|t%u", t);
    mix(buf, n);
  }
  return h;
}

namespace {

UplinkMethod to_uplink(SweepMethod m) {
  switch (m) {
    case SweepMethod::dcd: return UplinkMethod::dcd;
    case SweepMethod::cd: return UplinkMethod::cd_centralized;
    case SweepMethod::exact: return UplinkMethod::lmmse_exact;
    case SweepMethod::mf: return UplinkMethod::mf;
  }
  throw std::logic_error("bad method");
}

DownlinkMethod to_downlink(SweepMethod m) {
  switch (m) {
    case SweepMethod::dcd: return DownlinkMethod::dcd;
    case SweepMethod::cd: return DownlinkMethod::cd_centralized;
    case SweepMethod::exact: return DownlinkMethod::zf_exact;
    case SweepMethod::mf: return DownlinkMethod::mf;
  }
  throw std::logic_error("bad method");
}

bool iterative(SweepMethod m) { return m == SweepMethod::dcd || m == SweepMethod::cd; }

struct CsvFile {
  std::FILE* f = nullptr;
  explicit CsvFile(const std::string& path) {
    if (path.empty()) return;
    f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open output file: " + path);
  }
  ~CsvFile() {
    if (f) std::fclose(f);
  }
  CsvFile(const CsvFile&) = delete;
  CsvFile& operator=(const CsvFile&) = delete;
};

/// One BER point: run engine chunks until the bit budget is met.
TransmissionReport measure_point(const SweepSpec& spec, const Constellation& cons,
                                 SweepMethod method, unsigned t, std::size_t snr_idx,
                                 double snr) {
  const double n0 = snr_to_n0(snr, spec.users, spec.ex);
  const ClusterLayout layout{std::vector<std::size_t>(spec.clusters, spec.cluster_size)};
  const std::uint64_t bits_per_trial =
      static_cast<std::uint64_t>(spec.users) * cons.bits_per_symbol();
  std::uint64_t trials =
      std::min<std::uint64_t>((spec.min_bits + bits_per_trial - 1) / bits_per_trial,
                              spec.max_trials);
  if (trials == 0) trials = 1;

  EngineOptions opts;
  opts.concurrent_clusters = spec.concurrent_clusters;

  DetectorConfig det;
  det.n0 = n0;
  det.ex = spec.ex;
  det.t_max = t ? t : 1;
  det.fusion = spec.fusion;
  det.precision = spec.precision;

  PrecoderConfig pre;
  pre.rho = std::sqrt(static_cast<double>(spec.users) * spec.ex);
  pre.t_max = t ? t : 1;
  pre.precision = spec.precision;

  TransmissionReport total;
  std::uint64_t done = 0;
  while (done < trials) {
    const std::size_t chunk =
        static_cast<std::size_t>(std::min<std::uint64_t>(spec.batch_subcarriers, trials - done));
    const std::uint64_t first_trial = (static_cast<std::uint64_t>(snr_idx) << 32) + done;
    const SubcarrierBatch batch =
        make_batch(layout, spec.users, cons, chunk, spec.seed, first_trial);
    MessageLog log;
    if (spec.direction == LinkDirection::uplink) {
      const auto res = run_uplink_round(batch, cons, det, to_uplink(method), spec.seed,
                                        first_trial, &log, opts);
      total.merge(res.report);
    } else {
      const auto res = run_downlink_round(batch, cons, pre, to_downlink(method), n0,
                                          spec.seed, first_trial, &log, opts);
      total.merge(res.report);
    }
    done += chunk;
  }
  return total;
}

}  // namespace

std::vector<BerPoint> run_ber_sweep(const SweepSpec& spec, const std::string& csv_path) {
  spec.validate();
  const Constellation cons = Constellation::qam(spec.qam_order, spec.ex);

  CsvFile csv(csv_path);
  if (csv.f) {
    std::fprintf(csv.f, "# dcdsim-ber-v1 spec=%016llx\n",
                 static_cast<unsigned long long>(spec.hash()));
    std::fputs(
        "direction,method,t_max,precision,scope,fusion,snr_db,bits,errors,ber,"
        "ci_halfwidth,message_bytes,flagged_trials\n",
        csv.f);
  }

  std::vector<BerPoint> points;
  for (SweepMethod m : spec.methods) {
    const std::vector<unsigned> ts =
        iterative(m) ? spec.t_max : std::vector<unsigned>{0};
    for (unsigned t : ts) {
      for (std::size_t i = 0; i < spec.snr_db.size(); ++i) {
        const TransmissionReport rep = measure_point(spec, cons, m, t, i, spec.snr_db[i]);
        BerPoint p;
        p.method = m;
        p.t_max = t;
        p.snr_db = spec.snr_db[i];
        p.bits = rep.bits;
        p.errors = rep.bit_errors;
        p.ber = rep.ber();
        p.ci_halfwidth =
            rep.bits ? 1.96 * std::sqrt(std::max(p.ber * (1.0 - p.ber), 0.0) /
                                        static_cast<double>(rep.bits))
                     : 0.0;
        p.message_bytes = rep.message_bytes;
        p.flagged_trials = rep.flagged_trials;
        points.push_back(p);
        if (csv.f)
          std::fprintf(csv.f, "%s,%s,%u,%s,%s,%s,%.6g,%llu,%llu,%.9e,%.9e,%llu,%llu\n",
                       std::string(direction_name(spec.direction)).c_str(),
                       std::string(method_name(m)).c_str(), t,
                       std::string(format_name(spec.precision.format)).c_str(),
                       std::string(scope_name(spec.precision.scope)).c_str(),
                       spec.fusion == FusionMode::optimal ? "optimal" : "uniform",
                       p.snr_db, static_cast<unsigned long long>(p.bits),
                       static_cast<unsigned long long>(p.errors), p.ber, p.ci_halfwidth,
                       static_cast<unsigned long long>(p.message_bytes),
                       static_cast<unsigned long long>(p.flagged_trials));
      }
    }
  }
  return points;
}

std::vector<ConvergencePoint> run_convergence_study(const SweepSpec& spec,
                                                    const std::string& csv_path) {
  spec.validate();
  if (spec.instances == 0)
    throw std::invalid_argument("convergence study: need at least one instance");
  const Constellation cons = Constellation::qam(spec.qam_order, spec.ex);
  const unsigned t_top = *std::max_element(spec.t_max.begin(), spec.t_max.end());
  const double snr = spec.snr_db.front();
  const double n0 = snr_to_n0(snr, spec.users, spec.ex);
  const std::size_t b = spec.antennas();

  // distances[t-1] collects the per-instance relative errors for T = t.
  std::vector<std::vector<double>> distances(t_top);
  for (std::size_t inst = 0; inst < spec.instances; ++inst) {
    const ComplexMatrix h =
        gen_rayleigh(b, spec.users, derive_seed(spec.seed, RngPurpose::generic, inst)).h;
    RngStream bs(spec.seed, RngPurpose::payload_bits, inst);
    std::vector<std::uint8_t> bits(spec.users * cons.bits_per_symbol());
    for (auto& v : bits) v = static_cast<std::uint8_t>(bs.bit());
    const ComplexVector sym = modulate(bits, cons);

    ComplexVector oracle;
    ComplexMatrix h_dl;
    ComplexVector y;
    if (spec.direction == LinkDirection::uplink) {
      RngStream noise(spec.seed, RngPurpose::noise, inst);
      y = awgn(matvec(h, sym), n0, noise);
      oracle = lmmse_exact(h, y, n0, spec.ex);
    } else {
      h_dl = h.hermitian();
      oracle = zf_exact(h_dl, sym);
    }
    const double onorm = vecnorm2(oracle);

    for (unsigned t = 1; t <= t_top; ++t) {
      const ComplexVector xt =
          spec.direction == LinkDirection::uplink
              ? cd_detect(h, y, n0, spec.ex, t, spec.precision)
              : cd_precode(h_dl, sym, t, spec.precision);
      double d2 = 0.0;
      for (std::size_t j = 0; j < xt.size(); ++j) d2 += std::norm(xt[j] - oracle[j]);
      distances[t - 1].push_back(onorm > 0.0 ? std::sqrt(d2) / onorm
                                             : std::sqrt(d2));
    }
  }

  std::vector<ConvergencePoint> out;
  out.reserve(t_top);
  for (unsigned t = 1; t <= t_top; ++t) {
    auto& v = distances[t - 1];
    std::sort(v.begin(), v.end());
    ConvergencePoint p;
    p.t = t;
    p.median = v[v.size() / 2];
    p.p95 = v[std::min(v.size() - 1, static_cast<std::size_t>(0.95 * (v.size() - 1) + 0.5))];
    out.push_back(p);
  }

  CsvFile csv(csv_path);
  if (csv.f) {
    std::fprintf(csv.f, "# dcdsim-converge-v1 spec=%016llx\n",
                 static_cast<unsigned long long>(spec.hash()));
    std::fputs("t,median_rel_distance,p95_rel_distance\n", csv.f);
    for (const auto& p : out)
      std::fprintf(csv.f, "%u,%.9e,%.9e\n", p.t, p.median, p.p95);
  }
  return out;
}

std::vector<BenchRow> run_throughput_bench(const SweepSpec& spec,
                                           const std::string& csv_path) {
  spec.validate();
  const Constellation cons = Constellation::qam(spec.qam_order, spec.ex);
  const ClusterLayout layout{std::vector<std::size_t>(spec.clusters, spec.cluster_size)};
  const double snr = spec.snr_db.front();
  const double n0 = snr_to_n0(snr, spec.users, spec.ex);
  const unsigned t = spec.t_max.front();
  const std::size_t s_count = spec.bench_subcarriers;

  EngineOptions opts;
  opts.concurrent_clusters = spec.concurrent_clusters;

  std::vector<BenchRow> rows;
  for (SweepMethod m : spec.methods) {
    BenchRow row;
    row.direction = spec.direction;
    row.method = m;
    row.precision = spec.precision.format;
    row.clusters = spec.clusters;
    row.subcarriers = s_count;

    if (s_count > 0) {
      const SubcarrierBatch batch = make_batch(layout, spec.users, cons, s_count, spec.seed, 0);
      DetectorConfig det;
      det.n0 = n0;
      det.ex = spec.ex;
      det.t_max = t;
      det.fusion = spec.fusion;
      det.precision = spec.precision;
      PrecoderConfig pre;
      pre.rho = std::sqrt(static_cast<double>(spec.users) * spec.ex);
      pre.t_max = t;
      pre.precision = spec.precision;

      // One warmup pass, then the timed pass.
      MessageLog log;
      TransmissionReport rep;
      for (int pass = 0; pass < 2; ++pass) {
        log.records.clear();
        const auto t0 = std::chrono::steady_clock::now();
        if (spec.direction == LinkDirection::uplink)
          rep = run_uplink_round(batch, cons, det, to_uplink(m), spec.seed, 0, &log, opts).report;
        else
          rep = run_downlink_round(batch, cons, pre, to_downlink(m), n0, spec.seed, 0, &log, opts).report;
        const auto t1 = std::chrono::steady_clock::now();
        row.elapsed_s = std::chrono::duration<double>(t1 - t0).count();
      }
      row.subcarriers_per_s = row.elapsed_s > 0.0 ? s_count / row.elapsed_s : 0.0;
      row.per_cluster_rate = row.subcarriers_per_s * static_cast<double>(spec.clusters);
      row.message_bytes = rep.message_bytes;
      row.payload_gbps = row.elapsed_s > 0.0
                             ? static_cast<double>(rep.message_bytes) * 8.0 / row.elapsed_s / 1e9
                             : 0.0;
    }
    rows.push_back(row);
  }

  CsvFile csv(csv_path);
  if (csv.f) {
    std::fprintf(csv.f, "# dcdsim-bench-v1 spec=%016llx\n",
                 static_cast<unsigned long long>(spec.hash()));
    std::fputs("# wall-clock rates are specific to this host and build; not comparable across machines\n",
               csv.f);
    std::fputs(
        "direction,method,precision,clusters,subcarriers,elapsed_s,subcarriers_per_s,"
        "per_cluster_rate,message_bytes,payload_gbps\n",
        csv.f);
    for (const auto& r : rows)
      std::fprintf(csv.f, "%s,%s,%s,%zu,%zu,%.6e,%.6e,%.6e,%llu,%.6e\n",
                   std::string(direction_name(r.direction)).c_str(),
                   std::string(method_name(r.method)).c_str(),
                   std::string(format_name(r.precision)).c_str(), r.clusters,
                   r.subcarriers, r.elapsed_s, r.subcarriers_per_s, r.per_cluster_rate,
                   static_cast<unsigned long long>(r.message_bytes), r.payload_gbps);
  }
  return rows;
}

double analytic_qam_ber(unsigned order, double es_over_n0) {
  if (order != 4 && order != 16 && order != 64)
    throw std::invalid_argument("analytic_qam_ber: order must be 4, 16 or 64");
  if (!(es_over_n0 > 0.0))
    throw std::invalid_argument("analytic_qam_ber: SNR must be positive");

  unsigned levels = 2;
  while (levels * levels < order) levels <<= 1;
  const unsigned axis_bits = static_cast<unsigned>(std::lround(std::log2(levels)));

  // Unit symbol energy; per-axis noise variance N0/2.
  const double scale = std::sqrt(3.0 / (2.0 * (levels * levels - 1.0)));
  const double sigma = std::sqrt(1.0 / es_over_n0 / 2.0);
  auto phi = [](double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); };

  std::vector<double> level(levels);
  std::vector<unsigned> label(levels);
  for (unsigned pos = 0; pos < levels; ++pos) {
    level[pos] = scale * (2.0 * pos - (levels - 1.0));
    label[pos] = pos ^ (pos >> 1);
  }

  double bad_bits = 0.0;
  for (unsigned sent = 0; sent < levels; ++sent) {
    for (unsigned dec = 0; dec < levels; ++dec) {
      const double lo = dec == 0 ? -std::numeric_limits<double>::infinity()
                                 : 0.5 * (level[dec - 1] + level[dec]);
      const double hi = dec + 1 == levels ? std::numeric_limits<double>::infinity()
                                          : 0.5 * (level[dec] + level[dec + 1]);
      const double p = phi((hi - level[sent]) / sigma) - phi((lo - level[sent]) / sigma);
      bad_bits += p * __builtin_popcount(label[sent] ^ label[dec]);
    }
  }
  return bad_bits / (levels * axis_bits);
}

double snr_at_ber(const std::vector<std::pair<double, double>>& curve, double target) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (!(target > 0.0)) return nan;
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    const auto [s0, b0] = curve[i];
    const auto [s1, b1] = curve[i + 1];
    if (b0 <= 0.0 || b1 <= 0.0) continue;
    if (b0 >= target && target >= b1 && b0 > b1) {
      const double f = (std::log10(target) - std::log10(b0)) /
                       (std::log10(b1) - std::log10(b0));
      return s0 + f * (s1 - s0);
    }
  }
  return nan;
}

std::vector<double> parse_snr_range(const std::string& text) {
  double start = 0, step = 0, stop = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &start, &step, &stop) != 3)
    throw std::invalid_argument("SNR range must be start:step:stop, got: " + text);
  if (!(step > 0.0) && start != stop)
    throw std::invalid_argument("SNR range step must be positive");
  std::vector<double> out;
  if (start == stop) {
    out.push_back(start);
    return out;
  }
  for (double s = start; s <= stop + 1e-9; s += step) out.push_back(s);
  if (out.empty()) throw std::invalid_argument("SNR range is empty: " + text);
  return out;
}

}  // namespace dcd
