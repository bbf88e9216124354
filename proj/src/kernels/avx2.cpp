#include <immintrin.h>

#include <bit>

#include "fimpkit/kernels.hpp"

namespace fimpkit::kernels::avx2 {
namespace {

// Nibble-table popcount (Mula): per-byte counts via vpshufb, folded into four
// 64-bit lanes with vpsadbw.
inline __m256i popcount_bytes(__m256i v) {
    const __m256i lookup = _mm256_setr_epi8(
        0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
        0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
    const __m256i low_mask = _mm256_set1_epi8(0x0f);
    const __m256i lo = _mm256_and_si256(v, low_mask);
    const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
    return _mm256_add_epi8(_mm256_shuffle_epi8(lookup, lo), _mm256_shuffle_epi8(lookup, hi));
}

inline std::uint64_t horizontal_sum(__m256i acc) {
    alignas(32) std::uint64_t lanes[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
    return lanes[0] + lanes[1] + lanes[2] + lanes[3];
}

}  // namespace

std::uint64_t and_popcount(const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
    __m256i acc = _mm256_setzero_si256();
    const __m256i zero = _mm256_setzero_si256();
    std::size_t i = 0;
    // Four byte-count additions of at most 8 each stay far below the 255
    // byte limit before folding with vpsadbw.
    for (; i + 16 <= words; i += 16) {
        __m256i bytes = zero;
        for (std::size_t j = 0; j < 16; j += 4) {
            const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i + j));
            const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i + j));
            bytes = _mm256_add_epi8(bytes, popcount_bytes(_mm256_and_si256(va, vb)));
        }
        acc = _mm256_add_epi64(acc, _mm256_sad_epu8(bytes, zero));
    }
    for (; i + 4 <= words; i += 4) {
        const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
        acc = _mm256_add_epi64(acc, _mm256_sad_epu8(popcount_bytes(_mm256_and_si256(va, vb)), zero));
    }
    std::uint64_t total = horizontal_sum(acc);
    for (; i < words; ++i) {
        total += static_cast<std::uint64_t>(std::popcount(a[i] & b[i]));
    }
    return total;
}

std::uint64_t popcount(const std::uint64_t* a, std::size_t words) {
    __m256i acc = _mm256_setzero_si256();
    const __m256i zero = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + 4 <= words; i += 4) {
        const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        acc = _mm256_add_epi64(acc, _mm256_sad_epu8(popcount_bytes(va), zero));
    }
    std::uint64_t total = horizontal_sum(acc);
    for (; i < words; ++i) {
        total += static_cast<std::uint64_t>(std::popcount(a[i]));
    }
    return total;
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    if (i + 4 <= n) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        i += 4;
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, _mm256_add_pd(acc0, acc1));
    double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; i < n; ++i) {
        sum += a[i] * b[i];
    }
    return sum;
}

}  // namespace fimpkit::kernels::avx2
