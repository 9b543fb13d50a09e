#include "spinemeasure/kernels.hpp"

#include <atomic>
#include <cmath>

namespace spine::kernels {

namespace {

void madd_f32_scalar(float* dst, const float* src, float w, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = std::fma(w, src[i], dst[i]);
}

void madd_f64_scalar(double* dst, const double* src, double w, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = std::fma(w, src[i], dst[i]);
}

void add_f32_scalar(float* dst, const float* a, const float* b,
                    std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] + b[i];
}

void scale_shift_f32_scalar(float* dst, const float* src, float scale,
                            float shift, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = std::fma(scale, src[i], shift);
}

void relu_f32_scalar(float* v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) v[i] = v[i] > 0.0f ? v[i] : 0.0f;
}

void max_f32_scalar(float* dst, const float* a, const float* b,
                    std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] > b[i] ? a[i] : b[i];
}

void sum2_f32_scalar(const float* v, std::size_t n, double* sum,
                     double* sum_sq) {
  double s = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = v[i];
    s += x;
    s2 += x * x;
  }
  *sum = s;
  *sum_sq = s2;
}

std::uint64_t count_nonzero_u8_scalar(const std::uint8_t* v, std::size_t n) {
  std::uint64_t c = 0;
  for (std::size_t i = 0; i < n; ++i) c += v[i] != 0;
  return c;
}

std::uint64_t count_both_nonzero_u8_scalar(const std::uint8_t* a,
                                           const std::uint8_t* b,
                                           std::size_t n) {
  std::uint64_t c = 0;
  for (std::size_t i = 0; i < n; ++i) c += (a[i] != 0) && (b[i] != 0);
  return c;
}

void threshold_ge_u8_scalar(std::uint8_t* dst, const std::uint8_t* src,
                            std::uint8_t t, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = src[i] >= t ? 1 : 0;
}

constexpr Ops kScalarOps = {
    "scalar",
    madd_f32_scalar,
    madd_f64_scalar,
    add_f32_scalar,
    scale_shift_f32_scalar,
    relu_f32_scalar,
    max_f32_scalar,
    sum2_f32_scalar,
    count_nonzero_u8_scalar,
    count_both_nonzero_u8_scalar,
    threshold_ge_u8_scalar,
};

std::atomic<const Ops*> g_active{nullptr};

const Ops* pick_default() {
  if (const Ops* avx2 = avx2_ops()) return avx2;
  return &kScalarOps;
}

}  // namespace

const Ops& scalar_ops() { return kScalarOps; }

const Ops& active() {
  const Ops* ops = g_active.load(std::memory_order_acquire);
  if (!ops) {
    ops = pick_default();
    g_active.store(ops, std::memory_order_release);
  }
  return *ops;
}

bool select(const std::string& name) {
  if (name == "scalar") {
    g_active.store(&kScalarOps, std::memory_order_release);
    return true;
  }
  if (name == "avx2") {
    if (const Ops* avx2 = avx2_ops()) {
      g_active.store(avx2, std::memory_order_release);
      return true;
    }
    return false;
  }
  return false;
}

std::vector<std::string> available() {
  std::vector<std::string> names{"scalar"};
  if (avx2_ops()) names.push_back("avx2");
  return names;
}

}  // namespace spine::kernels
