#include "dcd/cluster.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace dcd {

MessageRecord make_message(MsgDirection dir, std::uint32_t cluster_id,
                           std::uint32_t subcarrier, std::uint64_t elements,
                           std::uint64_t aux_reals, PrecisionFormat f) {
  const std::uint64_t bpc = bytes_per_complex(f);
  MessageRecord r;
  r.direction = dir;
  r.cluster_id = cluster_id;
  r.subcarrier = subcarrier;
  r.payload_elements = elements;
  r.aux_reals = aux_reals;
  r.bytes = elements * bpc + aux_reals * (bpc / 2);
  r.precision = f;
  return r;
}

std::uint64_t MessageLog::total_bytes() const {
  std::uint64_t t = 0;
  for (const auto& r : records) t += r.bytes;
  return t;
}

void MessageLog::write_csv(const std::string& path) const {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("MessageLog::write_csv: cannot open " + path);
  std::fputs("direction,cluster_id,subcarrier,elements,bytes,precision\n", f);
  for (const auto& r : records)
    std::fprintf(f, "%s,%u,%u,%llu,%llu,%s\n",
                 r.direction == MsgDirection::cluster_to_center ? "cluster_to_center"
                                                                : "center_to_cluster",
                 r.cluster_id, r.subcarrier,
                 static_cast<unsigned long long>(r.payload_elements),
                 static_cast<unsigned long long>(r.bytes),
                 std::string(format_name(r.precision)).c_str());
  std::fclose(f);
}

InterconnectSummary interconnect_summary(const MessageLog& log,
                                         std::size_t total_antennas,
                                         std::size_t subcarriers) {
  InterconnectSummary s;
  if (log.records.empty()) return s;
  s.precision = log.records.front().precision;
  for (const auto& r : log.records) {
    if (r.precision != s.precision)
      throw std::invalid_argument("interconnect_summary: log mixes precisions");
    ++s.messages;
    s.payload_elements += r.payload_elements;
    s.aux_reals += r.aux_reals;
    s.total_bytes += r.bytes;
    if (r.direction == MsgDirection::cluster_to_center)
      s.uplink_bytes += r.bytes;
    else
      s.downlink_bytes += r.bytes;
  }
  s.baseline_bytes = static_cast<std::uint64_t>(total_antennas) * subcarriers *
                     bytes_per_complex(s.precision);
  if (s.baseline_bytes)
    s.reduction_ratio = static_cast<double>(s.total_bytes) / static_cast<double>(s.baseline_bytes);
  return s;
}

void TransmissionReport::merge(const TransmissionReport& o) {
  subcarriers += o.subcarriers;
  bits += o.bits;
  bit_errors += o.bit_errors;
  flagged_trials += o.flagged_trials;
  messages += o.messages;
  message_bytes += o.message_bytes;
  residual_norm2 += o.residual_norm2;
}

SubcarrierBatch make_batch(const ClusterLayout& layout, std::size_t users,
                           const Constellation& c, std::size_t count,
                           std::uint64_t seed, std::uint64_t first_trial) {
  const std::size_t b = layout.total_rows();
  if (layout.clusters() == 0 || b == 0)
    throw std::invalid_argument("make_batch: empty layout");
  if (users == 0 || b < users)
    throw std::invalid_argument("make_batch: need B >= U >= 1");

  SubcarrierBatch batch;
  batch.layout = layout;
  batch.users = users;
  batch.h.reserve(count);
  batch.bits.reserve(count);
  const unsigned bps = c.bits_per_symbol();
  for (std::size_t s = 0; s < count; ++s) {
    const std::uint64_t trial = first_trial + s;
    batch.h.push_back(
        gen_rayleigh(b, users, derive_seed(seed, RngPurpose::generic, trial)).h);
    RngStream bs(seed, RngPurpose::payload_bits, trial);
    std::vector<std::uint8_t> bits(users * bps);
    for (auto& v : bits) v = static_cast<std::uint8_t>(bs.bit());
    batch.bits.push_back(std::move(bits));
  }
  return batch;
}

namespace {

std::vector<ClusterData> split_observation(const ComplexMatrix& h,
                                           const ComplexVector& y,
                                           const ClusterLayout& layout) {
  auto blocks = partition_rows(h, layout);
  std::vector<ClusterData> out(blocks.size());
  std::size_t row0 = 0;
  for (std::size_t c = 0; c < blocks.size(); ++c) {
    out[c].h = std::move(blocks[c]);
    out[c].y.assign(y.begin() + row0, y.begin() + row0 + layout.sizes[c]);
    row0 += layout.sizes[c];
  }
  return out;
}

}  // namespace

UplinkRunResult run_uplink_round(const SubcarrierBatch& batch, const Constellation& c,
                                 const DetectorConfig& cfg, UplinkMethod method,
                                 std::uint64_t seed, std::uint64_t first_trial,
                                 MessageLog* log, const EngineOptions& opts) {
  const ClusterLayout& layout = batch.layout;
  const std::size_t nc = layout.clusters();
  const std::size_t u = batch.users;
  const PrecisionFormat fmt = cfg.precision.format;

  UplinkRunResult out;
  out.xhat.reserve(batch.size());
  out.report.subcarriers = batch.size();

  for (std::size_t s = 0; s < batch.size(); ++s) {
    const std::uint32_t sc = static_cast<std::uint32_t>(s);
    const std::uint64_t trial = first_trial + s;
    const ComplexMatrix& h = batch.h[s];
    const ComplexVector x_true = modulate(batch.bits[s], c);

    RngStream noise(seed, RngPurpose::noise, trial);
    const ComplexVector y = awgn(matvec(h, x_true), cfg.n0, noise);

    ComplexVector xhat;
    bool unbias = true;
    switch (method) {
      case UplinkMethod::dcd: {
        const auto clusters = split_observation(h, y, layout);
        const auto res = decentralized_cd_detect(clusters, cfg, opts.concurrent_clusters);
        xhat = res.xhat;
        if (log) {
          const std::uint64_t aux = cfg.fusion == FusionMode::optimal ? 1 : 0;
          for (std::size_t cl = 0; cl < nc; ++cl)
            log->add(make_message(MsgDirection::cluster_to_center,
                                  static_cast<std::uint32_t>(cl), sc, u, aux, fmt));
        }
        break;
      }
      case UplinkMethod::cd_centralized:
      case UplinkMethod::lmmse_exact: {
        // Raw-sample forwarding: every cluster ships its antenna samples.
        ComplexVector y_fwd = y;
        if (cfg.precision.rounds()) round_precision(y_fwd, fmt);
        xhat = method == UplinkMethod::cd_centralized
                   ? cd_detect(h, y_fwd, cfg.n0, cfg.ex, cfg.t_max, cfg.precision)
                   : lmmse_exact(h, y_fwd, cfg.n0, cfg.ex);
        if (log)
          for (std::size_t cl = 0; cl < nc; ++cl)
            log->add(make_message(MsgDirection::cluster_to_center,
                                  static_cast<std::uint32_t>(cl), sc,
                                  layout.sizes[cl], 0, fmt));
        break;
      }
      case UplinkMethod::mf: {
        const auto clusters = split_observation(h, y, layout);
        xhat = mf_detect(clusters, cfg.precision);
        unbias = false;  // the matched filter slices its raw output
        if (log)
          for (std::size_t cl = 0; cl < nc; ++cl)
            log->add(make_message(MsgDirection::cluster_to_center,
                                  static_cast<std::uint32_t>(cl), sc, u, u, fmt));
        break;
      }
    }

    if (opts.collect_residuals) {
      ComplexVector r = y;
      const ComplexVector hx = matvec(h, xhat);
      for (std::size_t i = 0; i < r.size(); ++i) r[i] -= hx[i];
      out.report.residual_norm2 += kernels::norm2sq(r.data(), r.size());
    }

    // Genie slicing aid: divide out the deterministic MMSE shrinkage so the
    // hard decisions refer to the unshrunk constellation.
    ComplexVector sliced = xhat;
    if (unbias && cfg.n0 > 0.0) {
      const auto beta = mmse_bias_factors(h, cfg.n0, cfg.ex);
      for (std::size_t j = 0; j < u; ++j) sliced[j] /= beta[j];
    }
    const auto hat_bits = demodulate_hard(sliced, c);
    for (std::size_t i = 0; i < batch.bits[s].size(); ++i)
      out.report.bit_errors += hat_bits[i] != batch.bits[s][i];
    out.report.bits += batch.bits[s].size();
    out.xhat.push_back(std::move(xhat));
  }

  if (log) {
    // This round's contribution (the log may be shared across rounds).
    std::uint64_t bytes = 0, count = 0;
    const std::size_t per_sc = nc;
    const std::size_t added = per_sc * batch.size();
    for (std::size_t i = log->records.size() - added; i < log->records.size(); ++i) {
      bytes += log->records[i].bytes;
      ++count;
    }
    out.report.messages = count;
    out.report.message_bytes = bytes;
  }
  return out;
}

DownlinkRunResult run_downlink_round(const SubcarrierBatch& batch, const Constellation& c,
                                     const PrecoderConfig& cfg, DownlinkMethod method,
                                     double n0, std::uint64_t seed,
                                     std::uint64_t first_trial,
                                     MessageLog* log, const EngineOptions& opts) {
  const ClusterLayout& layout = batch.layout;
  const std::size_t nc = layout.clusters();
  const std::size_t u = batch.users;
  const PrecisionFormat fmt = cfg.precision.format;

  DownlinkRunResult out;
  out.x.reserve(batch.size());
  out.report.subcarriers = batch.size();

  for (std::size_t s = 0; s < batch.size(); ++s) {
    const std::uint32_t sc = static_cast<std::uint32_t>(s);
    const std::uint64_t trial = first_trial + s;
    const ComplexVector s_vec = modulate(batch.bits[s], c);

    // Reciprocity: per-cluster downlink blocks are the hermitian transposes
    // of the uplink row blocks.
    const auto ul_blocks = partition_rows(batch.h[s], layout);
    std::vector<ComplexMatrix> dl_blocks(nc);
    for (std::size_t cl = 0; cl < nc; ++cl) dl_blocks[cl] = ul_blocks[cl].hermitian();

    ComplexVector x;
    switch (method) {
      case DownlinkMethod::dcd: {
        const auto res = decentralized_cd_precode(dl_blocks, s_vec, cfg,
                                                  opts.concurrent_clusters);
        x = res.x;
        if (log)
          for (std::size_t cl = 0; cl < nc; ++cl)
            log->add(make_message(MsgDirection::center_to_cluster,
                                  static_cast<std::uint32_t>(cl), sc, u, 0, fmt));
        break;
      }
      case DownlinkMethod::mf: {
        const auto res = mf_precode(dl_blocks, s_vec, cfg.rho, cfg.precision);
        x = res.x;
        if (log)
          for (std::size_t cl = 0; cl < nc; ++cl)
            log->add(make_message(MsgDirection::center_to_cluster,
                                  static_cast<std::uint32_t>(cl), sc, u, 0, fmt));
        break;
      }
      case DownlinkMethod::cd_centralized:
      case DownlinkMethod::zf_exact: {
        const ComplexMatrix h_dl = stack_rows(ul_blocks).hermitian();
        x = method == DownlinkMethod::cd_centralized
                ? cd_precode(h_dl, s_vec, cfg.t_max, cfg.precision)
                : zf_exact(h_dl, s_vec);
        power_scale(x, cfg.rho);
        if (cfg.precision.rounds()) round_precision(x, fmt);
        // Beamformer forwarding: each cluster receives its antenna block.
        if (log)
          for (std::size_t cl = 0; cl < nc; ++cl)
            log->add(make_message(MsgDirection::center_to_cluster,
                                  static_cast<std::uint32_t>(cl), sc,
                                  layout.sizes[cl], 0, fmt));
        break;
      }
    }

    const ComplexMatrix h_dl_full = batch.h[s].hermitian();
    RngStream noise(seed, RngPurpose::noise, trial);
    const ReceiveStats st = downlink_receive_and_ber(h_dl_full, x, s_vec, n0, c, noise);
    out.report.bits += st.bits;
    out.report.bit_errors += st.bit_errors;
    out.report.flagged_trials += st.flagged;
    if (opts.collect_residuals) {
      // Interference energy relative to the genie-scaled targets.
      const ComplexVector y0 = matvec(h_dl_full, x);
      ComplexVector r(u);
      for (std::size_t i = 0; i < u; ++i) r[i] = y0[i] - st.beta * s_vec[i];
      out.report.residual_norm2 += kernels::norm2sq(r.data(), r.size());
    }
    out.x.push_back(std::move(x));
  }

  if (log) {
    std::uint64_t bytes = 0, count = 0;
    const std::size_t added = nc * batch.size();
    for (std::size_t i = log->records.size() - added; i < log->records.size(); ++i) {
      bytes += log->records[i].bytes;
      ++count;
    }
    out.report.messages = count;
    out.report.message_bytes = bytes;
  }
  return out;
}

}  // namespace dcd
