/**
 * @file precision.hpp
 * @brief Reduced-precision emulation.
 *
 * All arithmetic runs in double; precision is emulated by rounding values to
 * binary16 or binary32 (round-to-nearest-even) and widening back at
 * designated boundaries. The scope controls which boundaries round:
 *
 *  - messages_only: just the payloads exchanged between clusters and the
 *    fusion/broadcast node.
 *  - full_storage: additionally every stored algorithm quantity (ingested
 *    inputs, preprocessed constants, each coordinate-update result and the
 *    running residual/output vector).
 */
#pragma once

#include <cstdint>
#include <span>
#include <string_view>

#include "dcd/numerics.hpp"

namespace dcd {

enum class PrecisionFormat : std::uint8_t { fp64, fp32, fp16 };
enum class PrecisionScope : std::uint8_t { messages_only, full_storage };

struct PrecisionMode {
  PrecisionFormat format = PrecisionFormat::fp64;
  PrecisionScope scope = PrecisionScope::messages_only;

  bool rounds() const { return format != PrecisionFormat::fp64; }
  bool rounds_storage() const { return rounds() && scope == PrecisionScope::full_storage; }
};

/// Bytes used to serialize one complex sample in the given format.
std::size_t bytes_per_complex(PrecisionFormat f);

std::string_view format_name(PrecisionFormat f);
PrecisionFormat parse_format(std::string_view name);
std::string_view scope_name(PrecisionScope s);
PrecisionScope parse_scope(std::string_view name);

/// Round to the target format and widen back to double (identity for fp64).
double round_precision(double x, PrecisionFormat f);
cf64 round_precision(cf64 x, PrecisionFormat f);
void round_precision(std::span<double> xs, PrecisionFormat f);
void round_precision(std::span<cf64> xs, PrecisionFormat f);
void round_precision(ComplexVector& v, PrecisionFormat f);
void round_precision(ComplexMatrix& m, PrecisionFormat f);

}  // namespace dcd
