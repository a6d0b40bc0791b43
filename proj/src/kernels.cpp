#include "vibelsd/kernels.hpp"

#include <bit>

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#endif

namespace vibelsd::kernels {

namespace detail {

void xor_words_scalar(std::uint64_t* dst, const std::uint64_t* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] ^= src[i];
}

std::uint64_t and_parity_scalar(const std::uint64_t* a, const std::uint64_t* b, std::size_t n) {
  std::uint64_t parity = 0;
  for (std::size_t i = 0; i < n; ++i)
    parity ^= static_cast<std::uint64_t>(std::popcount(a[i] & b[i]) & 1);
  return parity;
}

double sum_squares_scalar(const double* x, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += x[i + 0] * x[i + 0];
    s1 += x[i + 1] * x[i + 1];
    s2 += x[i + 2] * x[i + 2];
    s3 += x[i + 3] * x[i + 3];
  }
  double* lanes[4] = {&s0, &s1, &s2, &s3};
  for (std::size_t j = 0; i + j < n; ++j) *lanes[j] += x[i + j] * x[i + j];
  return (s0 + s2) + (s1 + s3);
}

#if defined(__x86_64__) || defined(_M_X64)

__attribute__((target("avx2"))) void xor_words_avx2(std::uint64_t* dst, const std::uint64_t* src,
                                                    std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256i d = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst + i));
    __m256i s = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + i), _mm256_xor_si256(d, s));
  }
  for (; i < n; ++i) dst[i] ^= src[i];
}

__attribute__((target("avx2"))) std::uint64_t and_parity_avx2(const std::uint64_t* a,
                                                              const std::uint64_t* b,
                                                              std::size_t n) {
  std::uint64_t parity = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    __m256i vand = _mm256_and_si256(va, vb);
    alignas(32) std::uint64_t w[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(w), vand);
    parity ^= static_cast<std::uint64_t>((std::popcount(w[0]) + std::popcount(w[1]) +
                                          std::popcount(w[2]) + std::popcount(w[3])) &
                                         1);
  }
  for (; i < n; ++i) parity ^= static_cast<std::uint64_t>(std::popcount(a[i] & b[i]) & 1);
  return parity;
}

__attribute__((target("avx2"))) double sum_squares_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
  }
  alignas(32) double s[4];
  _mm256_store_pd(s, acc);
  for (std::size_t j = 0; i + j < n; ++j) s[j] += x[i + j] * x[i + j];
  return (s[0] + s[2]) + (s[1] + s[3]);
}

#endif  // x86_64

}  // namespace detail

namespace {

bool detect_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const bool g_avx2 = detect_avx2();

}  // namespace

bool using_avx2() { return g_avx2; }

void xor_words(std::uint64_t* dst, const std::uint64_t* src, std::size_t n) {
#if defined(__x86_64__) || defined(_M_X64)
  if (g_avx2) {
    detail::xor_words_avx2(dst, src, n);
    return;
  }
#endif
  detail::xor_words_scalar(dst, src, n);
}

std::uint64_t and_parity(const std::uint64_t* a, const std::uint64_t* b, std::size_t n) {
#if defined(__x86_64__) || defined(_M_X64)
  if (g_avx2) return detail::and_parity_avx2(a, b, n);
#endif
  return detail::and_parity_scalar(a, b, n);
}

double sum_squares(const double* x, std::size_t n) {
#if defined(__x86_64__) || defined(_M_X64)
  if (g_avx2) return detail::sum_squares_avx2(x, n);
#endif
  return detail::sum_squares_scalar(x, n);
}

}  // namespace vibelsd::kernels
