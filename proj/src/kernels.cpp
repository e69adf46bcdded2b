#include "evobench/kernels.hpp"

#include <bit>
#include <cstdlib>

namespace evobench::kernels {

namespace scalar {

void fwht(std::int32_t* data, std::size_t n) {
    for (std::size_t h = 1; h < n; h <<= 1) {
        for (std::size_t i = 0; i < n; i += h << 1) {
            for (std::size_t j = i; j < i + h; ++j) {
                const std::int32_t x = data[j];
                const std::int32_t y = data[j + h];
                data[j] = x + y;
                data[j + h] = x - y;
            }
        }
    }
}

void bits_to_polarity(const std::uint64_t* words, std::int32_t* out, std::size_t n_bits) {
    for (std::size_t i = 0; i < n_bits; ++i) {
        out[i] = ((words[i >> 6] >> (i & 63)) & 1u) ? -1 : 1;
    }
}

std::int32_t max_abs(const std::int32_t* data, std::size_t n) {
    std::int32_t best = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::int32_t a = data[i] < 0 ? -data[i] : data[i];
        if (a > best) best = a;
    }
    return best;
}

std::size_t popcount_words(const std::uint64_t* words, std::size_t n_words) {
    std::size_t total = 0;
    for (std::size_t i = 0; i < n_words; ++i) total += std::popcount(words[i]);
    return total;
}

} // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define EVOBENCH_X86 1
namespace avx2 {
void fwht(std::int32_t* data, std::size_t n);
void bits_to_polarity(const std::uint64_t* words, std::int32_t* out, std::size_t n_bits);
std::int32_t max_abs(const std::int32_t* data, std::size_t n);
} // namespace avx2
#else
#define EVOBENCH_X86 0
#endif

namespace {

bool use_avx2() {
#if EVOBENCH_X86
    static const bool enabled = [] {
        if (std::getenv("EVOBENCH_NO_SIMD") != nullptr) return false;
        return __builtin_cpu_supports("avx2") != 0;
    }();
    return enabled;
#else
    return false;
#endif
}

} // namespace

void fwht(std::int32_t* data, std::size_t n) {
#if EVOBENCH_X86
    if (use_avx2() && n >= 16) {
        avx2::fwht(data, n);
        return;
    }
#endif
    scalar::fwht(data, n);
}

void bits_to_polarity(const std::uint64_t* words, std::int32_t* out, std::size_t n_bits) {
#if EVOBENCH_X86
    if (use_avx2() && n_bits >= 64) {
        avx2::bits_to_polarity(words, out, n_bits);
        return;
    }
#endif
    scalar::bits_to_polarity(words, out, n_bits);
}

std::int32_t max_abs(const std::int32_t* data, std::size_t n) {
#if EVOBENCH_X86
    if (use_avx2() && n >= 16) return avx2::max_abs(data, n);
#endif
    return scalar::max_abs(data, n);
}

std::size_t popcount_words(const std::uint64_t* words, std::size_t n_words) {
    // Hardware popcnt via std::popcount is already the fast path.
    return scalar::popcount_words(words, n_words);
}

const char* backend_name() {
    return use_avx2() ? "avx2" : "scalar";
}

} // namespace evobench::kernels
