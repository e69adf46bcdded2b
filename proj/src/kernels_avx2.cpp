// AVX2 kernel variants. This translation unit is the only one compiled with
// -mavx2; callers reach it through the runtime dispatch in kernels.cpp.
#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cstddef>
#include <cstdint>

namespace evobench::kernels::avx2 {

void fwht(std::int32_t* data, std::size_t n) {
    // Sub-vector stages (h = 1, 2, 4) via in-register shuffles on one lane of 8.
    for (std::size_t i = 0; i < n; i += 8) {
        __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(data + i));
        // h = 1: pairs (0,1)(2,3)...
        __m256i sw = _mm256_shuffle_epi32(v, _MM_SHUFFLE(2, 3, 0, 1));
        __m256i sum = _mm256_add_epi32(v, sw);
        __m256i diff = _mm256_sub_epi32(v, sw);
        v = _mm256_blend_epi32(sum, diff, 0b10101010);
        // h = 2: pairs (0,2)(1,3)...
        sw = _mm256_shuffle_epi32(v, _MM_SHUFFLE(1, 0, 3, 2));
        sum = _mm256_add_epi32(v, sw);
        diff = _mm256_sub_epi32(v, sw);
        v = _mm256_blend_epi32(sum, diff, 0b11001100);
        // h = 4: swap 128-bit halves.
        sw = _mm256_permute2x128_si256(v, v, 0x01);
        sum = _mm256_add_epi32(v, sw);
        diff = _mm256_sub_epi32(v, sw);
        v = _mm256_blend_epi32(sum, diff, 0b11110000);
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(data + i), v);
    }
    // Full-vector stages.
    for (std::size_t h = 8; h < n; h <<= 1) {
        for (std::size_t i = 0; i < n; i += h << 1) {
            for (std::size_t j = i; j < i + h; j += 8) {
                __m256i a = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(data + j));
                __m256i b = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(data + j + h));
                _mm256_storeu_si256(reinterpret_cast<__m256i*>(data + j), _mm256_add_epi32(a, b));
                _mm256_storeu_si256(reinterpret_cast<__m256i*>(data + j + h), _mm256_sub_epi32(a, b));
            }
        }
    }
}

void bits_to_polarity(const std::uint64_t* words, std::int32_t* out, std::size_t n_bits) {
    const __m256i ones = _mm256_set1_epi32(1);
    const __m256i shifts = _mm256_setr_epi32(0, 1, 2, 3, 4, 5, 6, 7);
    std::size_t i = 0;
    for (; i + 64 <= n_bits; i += 64) {
        const std::uint64_t w = words[i >> 6];
        for (int b = 0; b < 64; b += 8) {
            // Broadcast the byte, isolate bits 0..7, map 0 -> +1, 1 -> -1.
            __m256i byte = _mm256_set1_epi32(static_cast<std::int32_t>((w >> b) & 0xff));
            __m256i bits = _mm256_and_si256(_mm256_srlv_epi32(byte, shifts), ones);
            __m256i pol = _mm256_sub_epi32(ones, _mm256_slli_epi32(bits, 1));
            _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i + b), pol);
        }
    }
    for (; i < n_bits; ++i) {
        out[i] = ((words[i >> 6] >> (i & 63)) & 1u) ? -1 : 1;
    }
}

std::int32_t max_abs(const std::int32_t* data, std::size_t n) {
    __m256i best = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(data + i));
        best = _mm256_max_epi32(best, _mm256_abs_epi32(v));
    }
    alignas(32) std::int32_t lanes[8];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), best);
    std::int32_t result = 0;
    for (std::int32_t lane : lanes) {
        if (lane > result) result = lane;
    }
    for (; i < n; ++i) {
        const std::int32_t a = data[i] < 0 ? -data[i] : data[i];
        if (a > result) result = a;
    }
    return result;
}

} // namespace evobench::kernels::avx2

#endif
