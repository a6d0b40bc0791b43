#pragma once

#include <cstddef>
#include <cstdint>

namespace vibelsd::kernels {

// dst[i] ^= src[i] for i in [0, n).
void xor_words(std::uint64_t* dst, const std::uint64_t* src, std::size_t n);

// Parity (0/1) of popcount(a[i] & b[i]) summed over i in [0, n).
std::uint64_t and_parity(const std::uint64_t* a, const std::uint64_t* b, std::size_t n);

// Sum of x[i]^2.  Both implementations accumulate into four stride-4 partial
// sums combined as (s0+s2)+(s1+s3), so the scalar and AVX2 paths return
// bit-identical doubles.
double sum_squares(const double* x, std::size_t n);

// True when the AVX2 implementations were selected at load time.
bool using_avx2();

namespace detail {
void xor_words_scalar(std::uint64_t* dst, const std::uint64_t* src, std::size_t n);
std::uint64_t and_parity_scalar(const std::uint64_t* a, const std::uint64_t* b, std::size_t n);
double sum_squares_scalar(const double* x, std::size_t n);
#if defined(__x86_64__) || defined(_M_X64)
void xor_words_avx2(std::uint64_t* dst, const std::uint64_t* src, std::size_t n);
std::uint64_t and_parity_avx2(const std::uint64_t* a, const std::uint64_t* b, std::size_t n);
double sum_squares_avx2(const double* x, std::size_t n);
#endif
}  // namespace detail

}  // namespace vibelsd::kernels
