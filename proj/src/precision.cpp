#include "dcd/precision.hpp"

#include <stdexcept>
#include <string>

namespace dcd {

std::size_t bytes_per_complex(PrecisionFormat f) {
  switch (f) {
    case PrecisionFormat::fp64: return 16;
    case PrecisionFormat::fp32: return 8;
    case PrecisionFormat::fp16: return 4;
  }
  throw std::invalid_argument("bytes_per_complex: bad format");
}

std::string_view format_name(PrecisionFormat f) {
  switch (f) {
    case PrecisionFormat::fp64: return "fp64";
    case PrecisionFormat::fp32: return "fp32";
    case PrecisionFormat::fp16: return "fp16";
  }
  return "unknown";
}

PrecisionFormat parse_format(std::string_view name) {
  if (name == "fp64") return PrecisionFormat::fp64;
  if (name == "fp32") return PrecisionFormat::fp32;
  if (name == "fp16") return PrecisionFormat::fp16;
  throw std::invalid_argument("unknown precision format: " + std::string(name));
}

std::string_view scope_name(PrecisionScope s) {
  return s == PrecisionScope::messages_only ? "messages" : "full";
}

PrecisionScope parse_scope(std::string_view name) {
  if (name == "messages") return PrecisionScope::messages_only;
  if (name == "full") return PrecisionScope::full_storage;
  throw std::invalid_argument("unknown precision scope: " + std::string(name));
}

void round_precision(std::span<double> xs, PrecisionFormat f) {
  switch (f) {
    case PrecisionFormat::fp64: return;
    case PrecisionFormat::fp32: kernels::round_fp32(xs.data(), xs.size()); return;
    case PrecisionFormat::fp16: kernels::round_fp16(xs.data(), xs.size()); return;
  }
}

double round_precision(double x, PrecisionFormat f) {
  round_precision(std::span<double>(&x, 1), f);
  return x;
}

cf64 round_precision(cf64 x, PrecisionFormat f) {
  double re_im[2] = {x.real(), x.imag()};
  round_precision(std::span<double>(re_im, 2), f);
  return {re_im[0], re_im[1]};
}

void round_precision(std::span<cf64> xs, PrecisionFormat f) {
  round_precision(std::span<double>(reinterpret_cast<double*>(xs.data()), 2 * xs.size()), f);
}

void round_precision(ComplexVector& v, PrecisionFormat f) {
  round_precision(std::span<cf64>(v.data(), v.size()), f);
}

void round_precision(ComplexMatrix& m, PrecisionFormat f) {
  round_precision(m.flat(), f);
}

}  // namespace dcd
