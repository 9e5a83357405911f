/**
 * @file dcdsim.cpp
 * @brief Command-line driver for the decentralized detection/precoding
 *        simulator: BER sweeps, convergence studies, throughput benchmarks.
 */
#include <cctype>
#include <cstdio>
#include <exception>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dcd/harness.hpp"
#include "dcd/kernels.hpp"

namespace {

struct CliOptions {
  std::string direction = "uplink";
  std::string methods = "dcd";
  std::size_t users = 8;
  std::size_t cluster_size = 32;
  std::size_t clusters = 4;
  std::string mod = "qam16";
  std::string snr = "0:2:8";
  std::vector<unsigned> tmax = {3};
  std::string precision = "fp64";
  std::string precision_scope = "messages";
  std::string fusion = "optimal";
  std::uint64_t min_bits = 1'000'000;
  std::uint64_t max_trials = 4'000'000'000ULL;
  std::uint64_t seed = 1;
  std::size_t batch = 256;
  std::size_t subcarriers = 1200;
  std::size_t instances = 200;
  bool concurrent = false;
  std::string simd = "auto";
  std::string out;
  std::string config;
};

std::string trim_copy(std::string s) {
  const auto sp = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && sp(s.back())) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && sp(s[b])) ++b;
  return s.substr(b);
}

// Flat key=value option file: keys are the long option names without the
// leading dashes, '#' starts a comment, list values may be comma or space
// separated. Values given on the command line take precedence over the file.
void apply_config_file(CLI::App* cmd, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim_copy(line);
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error(where + ": expected key=value");
    const std::string key = trim_copy(line.substr(0, eq));
    const std::string value = trim_copy(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw std::runtime_error(where + ": expected key=value");
    if (key == "config") throw std::runtime_error(where + ": config files cannot nest");
    CLI::Option* op = cmd->get_option_no_throw("--" + key);
    if (op == nullptr) throw std::runtime_error(where + ": unknown option '" + key + "'");
    if (op->count() > 0) continue;
    if (op->get_items_expected_max() > 1) {
      std::size_t pos = 0;
      while (pos < value.size()) {
        std::size_t next = value.find(' ', pos);
        if (next == std::string::npos) next = value.size();
        if (next > pos) op->add_result(value.substr(pos, next - pos));
        pos = next + 1;
      }
    } else {
      op->add_result(value);
    }
    op->run_callback();
  }
}

unsigned parse_mod(const std::string& mod) {
  if (mod == "qam4") return 4;
  if (mod == "qam16") return 16;
  if (mod == "qam64") return 64;
  throw std::invalid_argument("unknown modulation: " + mod + " (use qam4|qam16|qam64)");
}

dcd::SweepSpec to_spec(const CliOptions& o) {
  dcd::SweepSpec spec;
  spec.direction = dcd::parse_direction(o.direction);
  spec.methods.clear();
  std::size_t pos = 0;
  while (pos <= o.methods.size()) {
    const std::size_t comma = o.methods.find(',', pos);
    const std::string name = o.methods.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!name.empty()) spec.methods.push_back(dcd::parse_method(name));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  spec.users = o.users;
  spec.cluster_size = o.cluster_size;
  spec.clusters = o.clusters;
  spec.qam_order = parse_mod(o.mod);
  spec.snr_db = dcd::parse_snr_range(o.snr);
  spec.t_max = o.tmax;
  spec.precision.format = dcd::parse_format(o.precision);
  spec.precision.scope = dcd::parse_scope(o.precision_scope);
  spec.fusion = o.fusion == "uniform" ? dcd::FusionMode::uniform : dcd::FusionMode::optimal;
  if (o.fusion != "uniform" && o.fusion != "optimal")
    throw std::invalid_argument("unknown fusion mode: " + o.fusion);
  spec.min_bits = o.min_bits;
  spec.max_trials = o.max_trials;
  spec.seed = o.seed;
  spec.batch_subcarriers = o.batch;
  spec.bench_subcarriers = o.subcarriers;
  spec.instances = o.instances;
  spec.concurrent_clusters = o.concurrent;
  return spec;
}

void apply_simd(const std::string& simd) {
  if (simd == "auto") return;
  if (simd == "scalar") return dcd::kernels::set_backend(dcd::kernels::Backend::scalar);
  if (simd == "avx2") return dcd::kernels::set_backend(dcd::kernels::Backend::avx2);
  throw std::invalid_argument("unknown simd backend: " + simd + " (use auto|scalar|avx2)");
}

void add_common(CLI::App* cmd, CliOptions& o) {
  cmd->add_option("--direction", o.direction, "Link direction: uplink|downlink");
  cmd->add_option("--methods", o.methods, "Comma list of dcd,cd,exact,mf");
  cmd->add_option("--users,-u", o.users, "Number of single-antenna users U");
  cmd->add_option("--cluster-size", o.cluster_size, "Antennas per cluster B_c");
  cmd->add_option("--clusters,-c", o.clusters, "Number of clusters C");
  cmd->add_option("--mod", o.mod, "Modulation: qam4|qam16|qam64");
  cmd->add_option("--snr", o.snr, "SNR grid in dB as start:step:stop");
  cmd->add_option("--tmax", o.tmax, "Sweep counts for the CD methods")->delimiter(',');
  cmd->add_option("--precision", o.precision, "Arithmetic emulation: fp64|fp32|fp16");
  cmd->add_option("--precision-scope", o.precision_scope,
                  "What gets rounded: messages|full");
  cmd->add_option("--fusion", o.fusion, "Uplink fusion weights: optimal|uniform");
  cmd->add_option("--min-bits", o.min_bits, "Bit budget per BER point");
  cmd->add_option("--max-trials", o.max_trials, "Trial cap per BER point");
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--batch", o.batch, "Subcarriers per engine chunk");
  cmd->add_option("--subcarriers", o.subcarriers, "Batch size for bench runs");
  cmd->add_option("--instances", o.instances, "Instances for convergence runs");
  cmd->add_flag("--concurrent", o.concurrent, "One thread per cluster");
  cmd->add_option("--simd", o.simd, "Kernel backend: auto|scalar|avx2");
  cmd->add_option("--out,-o", o.out, "Output CSV path");
  cmd->add_option("--config", o.config,
                  "Read options from a key=value file (command-line values win)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized coordinate-descent MU-MIMO simulator"};
  app.require_subcommand(1);

  CliOptions ber_opts, conv_opts, bench_opts;
  CLI::App* ber = app.add_subcommand("ber", "Monte Carlo BER sweep over an SNR grid");
  add_common(ber, ber_opts);
  CLI::App* conv = app.add_subcommand("converge", "Distance to the exact solution vs sweep count");
  add_common(conv, conv_opts);
  CLI::App* bench = app.add_subcommand("bench", "Wall-clock throughput of the cluster engine");
  add_common(bench, bench_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (ber->parsed() && !ber_opts.config.empty()) apply_config_file(ber, ber_opts.config);
    if (conv->parsed() && !conv_opts.config.empty()) apply_config_file(conv, conv_opts.config);
    if (bench->parsed() && !bench_opts.config.empty()) apply_config_file(bench, bench_opts.config);

    if (ber->parsed()) {
      apply_simd(ber_opts.simd);
      const auto spec = to_spec(ber_opts);
      const auto points = dcd::run_ber_sweep(spec, ber_opts.out);
      std::printf("# backend=%s\n", std::string(dcd::kernels::backend_name(
                                        dcd::kernels::active_backend())).c_str());
      std::printf("method,t_max,snr_db,bits,errors,ber,ci_halfwidth\n");
      for (const auto& p : points)
        std::printf("%s,%u,%.6g,%llu,%llu,%.9e,%.9e\n",
                    std::string(dcd::method_name(p.method)).c_str(), p.t_max, p.snr_db,
                    static_cast<unsigned long long>(p.bits),
                    static_cast<unsigned long long>(p.errors), p.ber, p.ci_halfwidth);
      if (!ber_opts.out.empty()) std::fprintf(stderr, "wrote %s\n", ber_opts.out.c_str());
    } else if (conv->parsed()) {
      apply_simd(conv_opts.simd);
      const auto spec = to_spec(conv_opts);
      const auto pts = dcd::run_convergence_study(spec, conv_opts.out);
      std::printf("t,median_rel_distance,p95_rel_distance\n");
      for (const auto& p : pts) std::printf("%u,%.9e,%.9e\n", p.t, p.median, p.p95);
      if (!conv_opts.out.empty()) std::fprintf(stderr, "wrote %s\n", conv_opts.out.c_str());
    } else if (bench->parsed()) {
      apply_simd(bench_opts.simd);
      const auto spec = to_spec(bench_opts);
      const auto rows = dcd::run_throughput_bench(spec, bench_opts.out);
      std::printf("# rates are host-specific\n");
      std::printf("direction,method,precision,clusters,subcarriers,elapsed_s,"
                  "subcarriers_per_s,per_cluster_rate,message_bytes,payload_gbps\n");
      for (const auto& r : rows)
        std::printf("%s,%s,%s,%zu,%zu,%.6e,%.6e,%.6e,%llu,%.6e\n",
                    std::string(dcd::direction_name(r.direction)).c_str(),
                    std::string(dcd::method_name(r.method)).c_str(),
                    std::string(dcd::format_name(r.precision)).c_str(), r.clusters,
                    r.subcarriers, r.elapsed_s, r.subcarriers_per_s, r.per_cluster_rate,
                    static_cast<unsigned long long>(r.message_bytes), r.payload_gbps);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
