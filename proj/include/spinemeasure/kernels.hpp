#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace spine::kernels {

// Dispatch table for the arithmetic inner loops shared by the network
// forward pass, the metric suite, and mask thresholding. There is one
// scalar reference backend plus an AVX2 backend selected at runtime.
//
// Contracts:
//  - madd_* and scale_shift_f32 use a fused multiply-add per element
//    (std::fma in the scalar backend), so every backend produces
//    bit-identical results for them and for the other elementwise ops.
//  - sum2_f32 accumulates in double; backends may associate differently,
//    agreement is to ~1e-12 relative (see test_kernels.cpp).
struct Ops {
  const char* name;

  // dst[i] += w * src[i]
  void (*madd_f32)(float* dst, const float* src, float w, std::size_t n);
  void (*madd_f64)(double* dst, const double* src, double w, std::size_t n);
  // dst[i] = a[i] + b[i]
  void (*add_f32)(float* dst, const float* a, const float* b, std::size_t n);
  // dst[i] = scale * src[i] + shift
  void (*scale_shift_f32)(float* dst, const float* src, float scale,
                          float shift, std::size_t n);
  // v[i] = max(v[i], 0)
  void (*relu_f32)(float* v, std::size_t n);
  // dst[i] = max(a[i], b[i])
  void (*max_f32)(float* dst, const float* a, const float* b, std::size_t n);
  // *sum = Σ v[i], *sum_sq = Σ v[i]^2 (double accumulation)
  void (*sum2_f32)(const float* v, std::size_t n, double* sum,
                   double* sum_sq);
  // number of nonzero bytes
  std::uint64_t (*count_nonzero_u8)(const std::uint8_t* v, std::size_t n);
  // number of positions where both bytes are nonzero
  std::uint64_t (*count_both_nonzero_u8)(const std::uint8_t* a,
                                         const std::uint8_t* b,
                                         std::size_t n);
  // dst[i] = src[i] >= t ? 1 : 0
  void (*threshold_ge_u8)(std::uint8_t* dst, const std::uint8_t* src,
                          std::uint8_t t, std::size_t n);
};

// Active backend (AVX2 when the CPU supports AVX2+FMA, scalar otherwise).
const Ops& active();

// Force a backend by name ("scalar", "avx2"). Returns false and leaves the
// selection unchanged when the backend is unavailable. Intended for tests.
bool select(const std::string& name);

std::vector<std::string> available();

const Ops& scalar_ops();

// nullptr when the build target is not x86-64 or the CPU lacks AVX2/FMA.
const Ops* avx2_ops();

}  // namespace spine::kernels
