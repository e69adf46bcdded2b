// kernels.hpp - data-parallel inner loops with scalar reference
// implementations and AVX2 variants selected once at startup. The scalar and
// SIMD paths are equivalence-tested against each other; everything downstream
// sees only the dispatching front ends.
#pragma once

#include <cstddef>
#include <cstdint>

namespace evobench::kernels {

// In-place fast Walsh-Hadamard butterfly on a power-of-two int32 vector.
// Applying it twice multiplies the input by n.
void fwht(std::int32_t* data, std::size_t n);

// Expand packed truth-table bits into the polarity vector (-1)^bit:
// bit 0 -> +1, bit 1 -> -1. n_bits need not be a multiple of 64.
void bits_to_polarity(const std::uint64_t* words, std::int32_t* out, std::size_t n_bits);

// max_i |data[i]|, n >= 1.
std::int32_t max_abs(const std::int32_t* data, std::size_t n);

// Total popcount over a word array.
std::size_t popcount_words(const std::uint64_t* words, std::size_t n_words);

// Scalar reference versions, exposed for equivalence tests.
namespace scalar {
void fwht(std::int32_t* data, std::size_t n);
void bits_to_polarity(const std::uint64_t* words, std::int32_t* out, std::size_t n_bits);
std::int32_t max_abs(const std::int32_t* data, std::size_t n);
std::size_t popcount_words(const std::uint64_t* words, std::size_t n_words);
} // namespace scalar

// Name of the active backend: "avx2" or "scalar".
const char* backend_name();

} // namespace evobench::kernels
