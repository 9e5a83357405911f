#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcd/harness.hpp"

using dcd::BerPoint;
using dcd::Constellation;
using dcd::LinkDirection;
using dcd::SweepMethod;
using dcd::SweepSpec;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

double q_func(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("snr range parsing") {
  CHECK(dcd::parse_snr_range("0:2:8") == std::vector<double>{0, 2, 4, 6, 8});
  CHECK(dcd::parse_snr_range("5:1:5") == std::vector<double>{5});
  const auto frac = dcd::parse_snr_range("1:0.5:2");
  REQUIRE(frac.size() == 3);
  CHECK(frac[2] == doctest::Approx(2.0));
  CHECK_THROWS_AS(dcd::parse_snr_range("8:2:0"), std::invalid_argument);
  CHECK_THROWS_AS(dcd::parse_snr_range("1:0:5"), std::invalid_argument);
  CHECK_THROWS_AS(dcd::parse_snr_range("nonsense"), std::invalid_argument);
}

TEST_CASE("analytic QAM bit error rates match the Gray/PAM closed forms") {
  // 4-QAM is QPSK: BER = Q(sqrt(Es/N0)).
  CHECK(dcd::analytic_qam_ber(4, 4.0) == doctest::Approx(q_func(2.0)).epsilon(1e-12));
  // 16-QAM Gray closed form at Es/N0 = gamma, a = sqrt(gamma/5):
  // BER = (3/4) Q(a) + (1/2) Q(3a) - (1/4) Q(5a).
  for (double gamma : {2.0, 10.0, 40.0}) {
    const double a = std::sqrt(gamma / 5.0);
    const double want = 0.75 * q_func(a) + 0.5 * q_func(3 * a) - 0.25 * q_func(5 * a);
    CHECK(dcd::analytic_qam_ber(16, gamma) == doctest::Approx(want).epsilon(1e-12));
  }
  CHECK(dcd::analytic_qam_ber(16, 1e6) < 1e-12);
  CHECK(dcd::analytic_qam_ber(64, 10.0) > dcd::analytic_qam_ber(16, 10.0));
  CHECK_THROWS_AS(dcd::analytic_qam_ber(8, 1.0), std::invalid_argument);
}

TEST_CASE("analytic QAM BER matches a Monte Carlo spot check") {
  const auto c = Constellation::qam(16, 1.0);
  const double es_over_n0 = 8.0;
  const double n0 = 1.0 / es_over_n0;
  std::uint64_t errors = 0, bits = 0;
  for (std::uint64_t t = 0; t < 2000; ++t) {
    dcd::RngStream bitgen(500, dcd::RngPurpose::payload_bits, t);
    std::vector<std::uint8_t> tx;
    for (int k = 0; k < 64; ++k) tx.push_back(static_cast<std::uint8_t>(bitgen.bit()));
    const auto sym = dcd::modulate(tx, c);
    dcd::RngStream noise(500, dcd::RngPurpose::noise, t);
    const auto y = dcd::awgn(sym, n0, noise);
    const auto rx = dcd::demodulate_hard(y, c);
    for (std::size_t i = 0; i < tx.size(); ++i) errors += tx[i] != rx[i];
    bits += tx.size();
  }
  const double ber = static_cast<double>(errors) / static_cast<double>(bits);
  const double want = dcd::analytic_qam_ber(16, es_over_n0);
  const double ci = 3.0 * std::sqrt(want * (1.0 - want) / static_cast<double>(bits));
  CHECK(std::abs(ber - want) <= ci);
}

TEST_CASE("snr_at_ber interpolates on a log scale") {
  const std::vector<std::pair<double, double>> curve = {{0.0, 1e-2}, {2.0, 1e-4}};
  CHECK(dcd::snr_at_ber(curve, 1e-3) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dcd::snr_at_ber(curve, 1e-2) == doctest::Approx(0.0).epsilon(1e-9));
  const std::vector<std::pair<double, double>> with_zero = {
      {0.0, 1e-2}, {2.0, 1e-4}, {4.0, 0.0}};
  CHECK(dcd::snr_at_ber(with_zero, 1e-3) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::isnan(dcd::snr_at_ber(curve, 1e-6)));
  CHECK(std::isnan(dcd::snr_at_ber({{0.0, 1e-2}}, 1e-3)));
}

TEST_CASE("method and direction names round-trip") {
  for (auto m : {SweepMethod::dcd, SweepMethod::cd, SweepMethod::exact, SweepMethod::mf})
    CHECK(dcd::parse_method(std::string(dcd::method_name(m))) == m);
  CHECK(dcd::parse_direction("uplink") == LinkDirection::uplink);
  CHECK(dcd::parse_direction("ul") == LinkDirection::uplink);
  CHECK(dcd::parse_direction("dl") == LinkDirection::downlink);
  CHECK_THROWS_AS(dcd::parse_method("turbo"), std::invalid_argument);
  CHECK_THROWS_AS(dcd::parse_direction("sideways"), std::invalid_argument);
}

TEST_CASE("spec validation rejects inconsistent settings") {
  SweepSpec spec;
  spec.min_bits = 100;  // too small to mean anything
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

  SweepSpec dl;
  dl.direction = LinkDirection::downlink;
  dl.users = 8;
  dl.cluster_size = 4;  // fewer antennas than users per cluster
  dl.min_bits = 10000;
  CHECK_THROWS_AS(dl.validate(), std::invalid_argument);

  SweepSpec bad_qam;
  bad_qam.qam_order = 32;
  CHECK_THROWS_AS(bad_qam.validate(), std::invalid_argument);

  SweepSpec bad_trials;
  bad_trials.max_trials = 0;
  CHECK_THROWS_AS(bad_trials.validate(), std::invalid_argument);

  SweepSpec ok;
  ok.min_bits = 10000;
  CHECK_NOTHROW(ok.validate());
  CHECK(ok.antennas() == 128);
  CHECK(ok.hash() != SweepSpec{}.hash());
}

TEST_CASE("downlink sweep validation happens before any simulation") {
  SweepSpec spec;
  spec.direction = LinkDirection::downlink;
  spec.users = 8;
  spec.cluster_size = 4;
  spec.clusters = 2;
  spec.min_bits = 10000;
  CHECK_THROWS_AS(dcd::run_ber_sweep(spec), std::invalid_argument);
}

TEST_CASE("BER sweeps are reproducible down to the CSV bytes") {
  SweepSpec spec;
  spec.direction = LinkDirection::uplink;
  spec.methods = {SweepMethod::dcd, SweepMethod::exact};
  spec.users = 4;
  spec.cluster_size = 16;
  spec.clusters = 2;
  spec.snr_db = {4.0, 6.0};
  spec.t_max = {2};
  spec.min_bits = 20000;
  spec.seed = 5;
  spec.batch_subcarriers = 64;

  const std::string p1 = "test_sweep_a.csv", p2 = "test_sweep_b.csv";
  const auto r1 = dcd::run_ber_sweep(spec, p1);
  const auto r2 = dcd::run_ber_sweep(spec, p2);
  REQUIRE(r1.size() == r2.size());
  for (std::size_t i = 0; i < r1.size(); ++i) {
    CHECK(r1[i].errors == r2[i].errors);
    CHECK(r1[i].bits == r2[i].bits);
  }
  const auto t1 = slurp(p1), t2 = slurp(p2);
  CHECK(t1 == t2);
  CHECK(t1.find("direction,method,t_max,precision,scope,fusion,snr_db,bits,errors,"
                "ber,ci_halfwidth,message_bytes,flagged_trials") != std::string::npos);
  std::remove(p1.c_str());
  std::remove(p2.c_str());

  // Each requested point appears once per method/t_max combination.
  CHECK(r1.size() == 2 * 2);  // (dcd@T2, exact) x 2 SNRs
  for (const auto& pt : r1) CHECK(pt.bits >= spec.min_bits);
}

TEST_CASE("exact uplink detection beats the matched filter at high SNR") {
  SweepSpec spec;
  spec.methods = {SweepMethod::exact, SweepMethod::mf};
  spec.users = 4;
  spec.cluster_size = 16;
  spec.clusters = 2;
  spec.snr_db = {12.0};
  spec.min_bits = 40000;
  spec.seed = 9;
  const auto pts = dcd::run_ber_sweep(spec);
  REQUIRE(pts.size() == 2);
  double exact_ber = 0.0, mf_ber = 0.0;
  for (const auto& pt : pts) {
    if (pt.method == SweepMethod::exact) exact_ber = pt.ber;
    if (pt.method == SweepMethod::mf) mf_ber = pt.ber;
  }
  CHECK(exact_ber < mf_ber);
  CHECK(mf_ber > 1e-3);  // interference floor
}

TEST_CASE("downlink zero forcing drives the error rate to zero at high SNR") {
  SweepSpec spec;
  spec.direction = LinkDirection::downlink;
  spec.methods = {SweepMethod::exact};
  spec.users = 4;
  spec.cluster_size = 32;
  spec.clusters = 1;
  spec.snr_db = {10.0, 30.0};
  spec.min_bits = 20000;
  spec.seed = 11;
  const auto pts = dcd::run_ber_sweep(spec);
  REQUIRE(pts.size() == 2);
  CHECK(pts[1].ber <= pts[0].ber);
  CHECK(pts[1].errors == 0);
  CHECK(pts[0].flagged_trials == 0);
}

TEST_CASE("uplink detection with an identity channel matches the analytic curve") {
  // B = U = 8 with H = I decouples the users into scalar AWGN channels whose
  // per-symbol SNR is Es/N0 = 10^(snr/10)/U; bias-corrected slicing must then
  // match the closed-form QAM error rate within Monte Carlo error.
  const std::size_t u = 8;
  const auto c = Constellation::qam(16, 1.0);
  dcd::SubcarrierBatch batch;
  batch.layout = dcd::ClusterLayout::whole(u);
  batch.users = u;
  const std::size_t trials = 4000;
  dcd::RngStream bitgen(321, dcd::RngPurpose::payload_bits, 0);
  for (std::size_t t = 0; t < trials; ++t) {
    batch.h.push_back(dcd::ComplexMatrix::identity(u));
    std::vector<std::uint8_t> bits;
    for (std::size_t k = 0; k < u * 4; ++k)
      bits.push_back(static_cast<std::uint8_t>(bitgen.bit()));
    batch.bits.push_back(std::move(bits));
  }
  const double snr_db = 16.0;
  dcd::DetectorConfig cfg;
  cfg.n0 = dcd::snr_to_n0(snr_db, u, 1.0);
  cfg.t_max = 3;
  const auto res = dcd::run_uplink_round(batch, c, cfg, dcd::UplinkMethod::cd_centralized,
                                         321, 0);
  const double ber = res.report.ber();
  const double want = dcd::analytic_qam_ber(16, std::pow(10.0, snr_db / 10.0) /
                                                    static_cast<double>(u));
  const double ci = 3.0 * std::sqrt(want * (1.0 - want) /
                                    static_cast<double>(res.report.bits));
  CHECK(std::abs(ber - want) <= ci);
}

TEST_CASE("convergence study medians shrink with the sweep count") {
  SweepSpec spec;
  spec.direction = LinkDirection::uplink;
  spec.users = 8;
  spec.cluster_size = 32;
  spec.clusters = 1;
  spec.snr_db = {8.0};
  spec.t_max = {6};
  spec.instances = 40;
  spec.min_bits = 10000;
  spec.seed = 13;
  const std::string path = "test_converge.csv";
  const auto pts = dcd::run_convergence_study(spec, path);
  REQUIRE(pts.size() == 6);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(pts[i].t == i + 1);
    CHECK(pts[i].median >= 0.0);
    CHECK(pts[i].p95 >= pts[i].median);
    if (i > 0) CHECK(pts[i].median <= pts[i - 1].median * (1.0 + 1e-9));
  }
  const auto text = slurp(path);
  CHECK(text.find("t,median_rel_distance,p95_rel_distance") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("long convergence studies reach the oracle in both directions") {
  for (auto dir : {LinkDirection::uplink, LinkDirection::downlink}) {
    SweepSpec spec;
    spec.direction = dir;
    spec.users = 4;
    spec.cluster_size = 16;
    spec.clusters = 1;
    spec.snr_db = {6.0};
    spec.t_max = {64};
    spec.instances = 10;
    spec.min_bits = 10000;
    spec.seed = 17;
    const auto pts = dcd::run_convergence_study(spec);
    CHECK(pts.back().median <= 1e-8);
  }
}

TEST_CASE("throughput bench reports positive rates and format-scaled payload bytes") {
  SweepSpec spec;
  spec.users = 4;
  spec.cluster_size = 16;
  spec.clusters = 2;
  spec.snr_db = {6.0};
  spec.t_max = {3};
  spec.bench_subcarriers = 100;
  spec.min_bits = 10000;
  spec.seed = 19;

  spec.precision = {dcd::PrecisionFormat::fp32, dcd::PrecisionScope::messages_only};
  const std::string path = "test_bench.csv";
  const auto r32 = dcd::run_throughput_bench(spec, path);
  REQUIRE(r32.size() == 1);
  CHECK(r32[0].subcarriers == 100);
  CHECK(r32[0].subcarriers_per_s > 0.0);
  CHECK(r32[0].per_cluster_rate == doctest::Approx(r32[0].subcarriers_per_s * 2));
  CHECK(r32[0].message_bytes > 0);

  spec.precision = {dcd::PrecisionFormat::fp16, dcd::PrecisionScope::messages_only};
  const auto r16 = dcd::run_throughput_bench(spec);
  CHECK(r16[0].message_bytes * 2 == r32[0].message_bytes);

  const auto text = slurp(path);
  CHECK(text.find("host") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("throughput bench with an empty workload does not divide by zero") {
  SweepSpec spec;
  spec.users = 4;
  spec.cluster_size = 16;
  spec.clusters = 2;
  spec.bench_subcarriers = 0;
  spec.min_bits = 10000;
  const auto rows = dcd::run_throughput_bench(spec);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].subcarriers == 0);
  CHECK(rows[0].subcarriers_per_s == 0.0);
  CHECK(rows[0].message_bytes == 0);
}

TEST_CASE("BER sweep CSV embeds the run-configuration fingerprint") {
  SweepSpec spec;
  spec.users = 4;
  spec.cluster_size = 16;
  spec.clusters = 1;
  spec.snr_db = {6.0};
  spec.min_bits = 10000;
  spec.seed = 23;
  const std::string path = "test_fingerprint.csv";
  dcd::run_ber_sweep(spec, path);
  const auto text = slurp(path);
  char expect[64];
  std::snprintf(expect, sizeof(expect), "spec=%016llx",
                static_cast<unsigned long long>(spec.hash()));
  CHECK(text.find(expect) != std::string::npos);
  std::remove(path.c_str());
}
