// AVX2 backend. This translation unit is compiled with -mavx2 -mfma on
// x86-64 (see CMakeLists.txt); selection still happens at runtime via
// __builtin_cpu_supports, so the binary stays usable on older CPUs.

#include "spinemeasure/kernels.hpp"

#if (defined(__x86_64__) || defined(_M_X64)) && defined(__AVX2__) && \
    defined(__FMA__)

#include <immintrin.h>

#include <bit>
#include <cmath>

namespace spine::kernels {

namespace {

void madd_f32_avx2(float* dst, const float* src, float w, std::size_t n) {
  const __m256 vw = _mm256_set1_ps(w);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 d = _mm256_loadu_ps(dst + i);
    __m256 s = _mm256_loadu_ps(src + i);
    _mm256_storeu_ps(dst + i, _mm256_fmadd_ps(vw, s, d));
  }
  for (; i < n; ++i) dst[i] = std::fma(w, src[i], dst[i]);
}

void madd_f64_avx2(double* dst, const double* src, double w, std::size_t n) {
  const __m256d vw = _mm256_set1_pd(w);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_loadu_pd(dst + i);
    __m256d s = _mm256_loadu_pd(src + i);
    _mm256_storeu_pd(dst + i, _mm256_fmadd_pd(vw, s, d));
  }
  for (; i < n; ++i) dst[i] = std::fma(w, src[i], dst[i]);
}

void add_f32_avx2(float* dst, const float* a, const float* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_ps(dst + i, _mm256_add_ps(_mm256_loadu_ps(a + i),
                                            _mm256_loadu_ps(b + i)));
  }
  for (; i < n; ++i) dst[i] = a[i] + b[i];
}

void scale_shift_f32_avx2(float* dst, const float* src, float scale,
                          float shift, std::size_t n) {
  const __m256 vs = _mm256_set1_ps(scale);
  const __m256 vb = _mm256_set1_ps(shift);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_ps(dst + i,
                     _mm256_fmadd_ps(vs, _mm256_loadu_ps(src + i), vb));
  }
  for (; i < n; ++i) dst[i] = std::fma(scale, src[i], shift);
}

void relu_f32_avx2(float* v, std::size_t n) {
  const __m256 zero = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_ps(v + i, _mm256_max_ps(_mm256_loadu_ps(v + i), zero));
  }
  for (; i < n; ++i) v[i] = v[i] > 0.0f ? v[i] : 0.0f;
}

void max_f32_avx2(float* dst, const float* a, const float* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    // max_ps(a, b) yields b when a == b or either is NaN, matching the
    // scalar (a > b ? a : b) exactly.
    _mm256_storeu_ps(dst + i, _mm256_max_ps(_mm256_loadu_ps(a + i),
                                            _mm256_loadu_ps(b + i)));
  }
  for (; i < n; ++i) dst[i] = a[i] > b[i] ? a[i] : b[i];
}

void sum2_f32_avx2(const float* v, std::size_t n, double* sum,
                   double* sum_sq) {
  __m256d s = _mm256_setzero_pd();
  __m256d s2 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d x = _mm256_cvtps_pd(_mm_loadu_ps(v + i));
    s = _mm256_add_pd(s, x);
    s2 = _mm256_fmadd_pd(x, x, s2);
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, s);
  double total = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  _mm256_store_pd(lane, s2);
  double total2 = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (; i < n; ++i) {
    const double x = v[i];
    total += x;
    total2 += x * x;
  }
  *sum = total;
  *sum_sq = total2;
}

std::uint64_t count_nonzero_u8_avx2(const std::uint8_t* v, std::size_t n) {
  const __m256i zero = _mm256_setzero_si256();
  std::uint64_t c = 0;
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(v + i));
    const auto eq0 = static_cast<std::uint32_t>(
        _mm256_movemask_epi8(_mm256_cmpeq_epi8(x, zero)));
    c += 32u - std::popcount(eq0);
  }
  for (; i < n; ++i) c += v[i] != 0;
  return c;
}

std::uint64_t count_both_nonzero_u8_avx2(const std::uint8_t* a,
                                         const std::uint8_t* b,
                                         std::size_t n) {
  const __m256i zero = _mm256_setzero_si256();
  std::uint64_t c = 0;
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    __m256i xa = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    __m256i xb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    __m256i either_zero = _mm256_or_si256(_mm256_cmpeq_epi8(xa, zero),
                                          _mm256_cmpeq_epi8(xb, zero));
    const auto m =
        static_cast<std::uint32_t>(_mm256_movemask_epi8(either_zero));
    c += 32u - std::popcount(m);
  }
  for (; i < n; ++i) c += (a[i] != 0) && (b[i] != 0);
  return c;
}

void threshold_ge_u8_avx2(std::uint8_t* dst, const std::uint8_t* src,
                          std::uint8_t t, std::size_t n) {
  const __m256i vt = _mm256_set1_epi8(static_cast<char>(t));
  const __m256i one = _mm256_set1_epi8(1);
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
    // unsigned x >= t  <=>  max(x, t) == x
    __m256i ge = _mm256_cmpeq_epi8(_mm256_max_epu8(x, vt), x);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + i),
                        _mm256_and_si256(ge, one));
  }
  for (; i < n; ++i) dst[i] = src[i] >= t ? 1 : 0;
}

constexpr Ops kAvx2Ops = {
    "avx2",
    madd_f32_avx2,
    madd_f64_avx2,
    add_f32_avx2,
    scale_shift_f32_avx2,
    relu_f32_avx2,
    max_f32_avx2,
    sum2_f32_avx2,
    count_nonzero_u8_avx2,
    count_both_nonzero_u8_avx2,
    threshold_ge_u8_avx2,
};

}  // namespace

const Ops* avx2_ops() {
  static const bool supported =
      __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &kAvx2Ops : nullptr;
}

}  // namespace spine::kernels

#else

namespace spine::kernels {
const Ops* avx2_ops() { return nullptr; }
}  // namespace spine::kernels

#endif
