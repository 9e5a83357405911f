#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <random>
#include <stdexcept>
#include <vector>

#include "dcd/numerics.hpp"
#include "dcd/precision.hpp"

using dcd::cf64;
using dcd::ComplexMatrix;
using dcd::ComplexVector;

namespace {

std::mt19937_64& rng() {
  static std::mt19937_64 engine(101);
  return engine;
}

std::size_t rand_index(std::size_t m) { return static_cast<std::size_t>(rng()() % m); }

cf64 randc() {
  static std::normal_distribution<double> g;
  return {g(rng()), g(rng())};
}

ComplexMatrix random_matrix(std::size_t r, std::size_t c) {
  ComplexMatrix m(r, c);
  for (auto& z : m.flat()) z = randc();
  return m;
}

ComplexVector random_vector(std::size_t n) {
  ComplexVector v(n);
  for (auto& z : v) z = randc();
  return v;
}

// B^H B + I: hermitian and comfortably positive definite.
ComplexMatrix random_spd(std::size_t n) {
  const ComplexMatrix b = random_matrix(n + 3, n);
  ComplexMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      cf64 s{0.0, 0.0};
      for (std::size_t k = 0; k < b.rows(); ++k) s += std::conj(b(k, i)) * b(k, j);
      a(i, j) = s + (i == j ? cf64{1.0, 0.0} : cf64{0.0, 0.0});
    }
  return a;
}

double vec_dist(const ComplexVector& a, const ComplexVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("matvec with the identity returns the input") {
  const auto v = random_vector(9);
  const auto y = dcd::matvec(ComplexMatrix::identity(9), v);
  REQUIRE(y.size() == 9);
  for (std::size_t i = 0; i < 9; ++i) CHECK(y[i] == v[i]);
}

TEST_CASE("matvec with a zero matrix returns zero") {
  const ComplexMatrix z(6, 4);
  const auto y = dcd::matvec(z, random_vector(4));
  for (const auto& e : y) CHECK(std::abs(e) == 0.0);
}

TEST_CASE("matvec matches a naive triple loop") {
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t r = 1 + rand_index(12), c = 1 + rand_index(12);
    const auto a = random_matrix(r, c);
    const auto v = random_vector(c);
    const auto y = dcd::matvec(a, v);
    double scale = 1.0;
    for (const auto& z : a.flat()) scale = std::max(scale, std::abs(z));
    for (std::size_t i = 0; i < r; ++i) {
      cf64 want{0.0, 0.0};
      for (std::size_t j = 0; j < c; ++j) want += a(i, j) * v[j];
      CHECK(std::abs(y[i] - want) <= 1e-12 * scale * static_cast<double>(c));
    }
  }
}

TEST_CASE("matvec is reproducible for fixed inputs") {
  const auto a = random_matrix(16, 7);
  const auto v = random_vector(7);
  const auto y1 = dcd::matvec(a, v);
  const auto y2 = dcd::matvec(a, v);
  CHECK(std::memcmp(y1.data(), y2.data(), y1.size() * sizeof(cf64)) == 0);
}

TEST_CASE("matvec rejects mismatched shapes") {
  CHECK_THROWS_AS(dcd::matvec(random_matrix(4, 3), random_vector(4)), std::invalid_argument);
}

TEST_CASE("hermitian_solve on small known systems") {
  ComplexMatrix a(2, 2);
  a(0, 0) = 2.0;
  a(1, 1) = 2.0;
  const auto x = dcd::hermitian_solve(a, {cf64{4.0, 0.0}, cf64{6.0, 0.0}});
  CHECK(std::abs(x[0] - cf64{2.0, 0.0}) <= 1e-14);
  CHECK(std::abs(x[1] - cf64{3.0, 0.0}) <= 1e-14);

  const auto x1 = dcd::hermitian_solve(ComplexMatrix::identity(1), {cf64{0.0, 1.0}});
  CHECK(std::abs(x1[0] - cf64{0.0, 1.0}) <= 1e-15);
}

TEST_CASE("hermitian_solve residual is tiny on random positive definite systems") {
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + rand_index(10);
    const auto a = random_spd(n);
    const auto b = random_vector(n);
    const auto x = dcd::hermitian_solve(a, b);
    const auto ax = dcd::matvec(a, x);
    CHECK(vec_dist(ax, b) <= 1e-9 * (1.0 + dcd::vecnorm2(b)));
  }
}

TEST_CASE("hermitian_solve then matvec round-trips") {
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + rand_index(8);
    const auto a = random_spd(n);
    const auto x0 = random_vector(n);
    const auto x = dcd::hermitian_solve(a, dcd::matvec(a, x0));
    CHECK(vec_dist(x, x0) <= 1e-9 * (1.0 + dcd::vecnorm2(x0)));
  }
}

TEST_CASE("hermitian_solve rejects non-hermitian input") {
  ComplexMatrix a(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 1.0;
  a(0, 1) = cf64{0.5, 0.5};
  a(1, 0) = cf64{0.5, 0.5};  // should be the conjugate
  CHECK_THROWS_AS(dcd::hermitian_solve(a, random_vector(2)), std::invalid_argument);
}

TEST_CASE("hermitian_solve reports singular systems") {
  ComplexMatrix z(3, 3);
  CHECK_THROWS_AS(dcd::hermitian_solve(z, random_vector(3)), std::runtime_error);

  ComplexMatrix tiny(2, 2);
  tiny(0, 0) = 1.0;
  tiny(1, 1) = 1e-20;
  CHECK_THROWS_AS(dcd::hermitian_solve(tiny, random_vector(2)), std::runtime_error);

  // Rank-one outer product.
  const auto v = random_vector(4);
  ComplexMatrix outer(4, 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) outer(i, j) = v[i] * std::conj(v[j]);
  CHECK_THROWS_AS(dcd::hermitian_solve(outer, random_vector(4)), std::runtime_error);
}

TEST_CASE("hermitian_solve rejects shape mismatches") {
  CHECK_THROWS_AS(dcd::hermitian_solve(ComplexMatrix::identity(3), random_vector(2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(dcd::hermitian_solve(random_matrix(3, 2), random_vector(2)),
                  std::invalid_argument);
}

TEST_CASE("hermitian transpose") {
  const auto a = random_matrix(5, 3);
  const auto h = a.hermitian();
  REQUIRE(h.rows() == 3);
  REQUIRE(h.cols() == 5);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(h(j, i) == std::conj(a(i, j)));
}

TEST_CASE("dotc and vecnorm2 on known vectors") {
  const ComplexVector a = {{1.0, 0.0}, {0.0, 1.0}};
  const cf64 d = dcd::dotc(a, a);
  CHECK(std::abs(d - cf64{2.0, 0.0}) <= 1e-15);

  const ComplexVector b = {{3.0, 0.0}, {0.0, 4.0}};
  CHECK(dcd::vecnorm2(b) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("dotc matches a naive loop at length 64") {
  const auto a = random_vector(64);
  const auto b = random_vector(64);
  cf64 want{0.0, 0.0};
  for (std::size_t i = 0; i < 64; ++i) want += std::conj(a[i]) * b[i];
  CHECK(std::abs(dcd::dotc(a, b) - want) <= 1e-12 * (1.0 + std::abs(want)));
}

TEST_CASE("dotc rejects empty and mismatched input") {
  CHECK_THROWS_AS(dcd::dotc({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(dcd::dotc(random_vector(3), random_vector(4)), std::invalid_argument);
}

TEST_CASE("round_precision at fp64 is the identity") {
  auto v = random_vector(17);
  const auto v0 = v;
  dcd::round_precision(v, dcd::PrecisionFormat::fp64);
  CHECK(std::memcmp(v.data(), v0.data(), v.size() * sizeof(cf64)) == 0);

  auto m = random_matrix(4, 5);
  ComplexMatrix m0 = m;
  dcd::round_precision(m, dcd::PrecisionFormat::fp64);
  CHECK(std::memcmp(m.flat().data(), m0.flat().data(), m.flat().size() * sizeof(cf64)) == 0);

  CHECK(dcd::round_precision(0.1, dcd::PrecisionFormat::fp64) == 0.1);
}

TEST_CASE("round_precision narrows vectors and matrices consistently") {
  auto v = random_vector(9);
  auto v2 = v;
  dcd::round_precision(v, dcd::PrecisionFormat::fp32);
  for (std::size_t i = 0; i < v.size(); ++i) {
    CHECK(v[i].real() == static_cast<double>(static_cast<float>(v2[i].real())));
    CHECK(v[i].imag() == static_cast<double>(static_cast<float>(v2[i].imag())));
  }

  const cf64 z = dcd::round_precision(cf64{1.0 / 3.0, 2049.0}, dcd::PrecisionFormat::fp16);
  CHECK(z.imag() == 2048.0);
  CHECK(std::abs(z.real() - 1.0 / 3.0) <= std::ldexp(1.0 / 3.0, -11));
}

TEST_CASE("precision format metadata") {
  CHECK(dcd::bytes_per_complex(dcd::PrecisionFormat::fp64) == 16);
  CHECK(dcd::bytes_per_complex(dcd::PrecisionFormat::fp32) == 8);
  CHECK(dcd::bytes_per_complex(dcd::PrecisionFormat::fp16) == 4);
  CHECK(dcd::parse_format("fp16") == dcd::PrecisionFormat::fp16);
  CHECK(dcd::format_name(dcd::PrecisionFormat::fp32) == "fp32");
  CHECK_THROWS_AS(dcd::parse_format("fp8"), std::invalid_argument);
  CHECK(dcd::parse_scope("full") == dcd::PrecisionScope::full_storage);
  CHECK(dcd::parse_scope("messages") == dcd::PrecisionScope::messages_only);
  CHECK_THROWS_AS(dcd::parse_scope("half"), std::invalid_argument);
}
