#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "spinemeasure/kernels.hpp"

using namespace spine;

namespace {

std::vector<float> random_f32(std::mt19937& rng, std::size_t n,
                              float lo = -4.0f, float hi = 4.0f) {
  std::uniform_real_distribution<float> dist(lo, hi);
  std::vector<float> v(n);
  for (float& x : v) x = dist(rng);
  return v;
}

std::vector<double> random_f64(std::mt19937& rng, std::size_t n) {
  std::uniform_real_distribution<double> dist(-4.0, 4.0);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

std::vector<std::uint8_t> random_u8(std::mt19937& rng, std::size_t n) {
  std::uniform_int_distribution<int> dist(0, 255);
  std::vector<std::uint8_t> v(n);
  for (auto& x : v) x = std::uint8_t(dist(rng));
  return v;
}

// odd lengths on purpose so the vector tails get exercised
const std::size_t kLengths[] = {1, 7, 8, 31, 32, 33, 100, 1037};

}  // namespace

TEST_CASE("kernel dispatch lists scalar and respects select()") {
  auto names = kernels::available();
  CHECK(std::find(names.begin(), names.end(), "scalar") != names.end());
  CHECK(kernels::select("scalar"));
  CHECK(std::string(kernels::active().name) == "scalar");
  CHECK_FALSE(kernels::select("no-such-backend"));
  CHECK(std::string(kernels::active().name) == "scalar");
  if (kernels::avx2_ops()) {
    CHECK(kernels::select("avx2"));
    CHECK(std::string(kernels::active().name) == "avx2");
  }
}

TEST_CASE("avx2 backend matches scalar reference") {
  const kernels::Ops* avx2 = kernels::avx2_ops();
  if (!avx2) {
    MESSAGE("AVX2 unavailable on this host; equivalence suite skipped");
    return;
  }
  const kernels::Ops& ref = kernels::scalar_ops();
  std::mt19937 rng(7);

  for (std::size_t n : kLengths) {
    CAPTURE(n);

    // madd_f32: bitwise (both sides fuse)
    {
      auto dst_a = random_f32(rng, n);
      auto dst_b = dst_a;
      const auto src = random_f32(rng, n);
      const float w = 1.37f;
      ref.madd_f32(dst_a.data(), src.data(), w, n);
      avx2->madd_f32(dst_b.data(), src.data(), w, n);
      CHECK(dst_a == dst_b);
    }
    // madd_f64: bitwise
    {
      auto dst_a = random_f64(rng, n);
      auto dst_b = dst_a;
      const auto src = random_f64(rng, n);
      ref.madd_f64(dst_a.data(), src.data(), -0.77, n);
      avx2->madd_f64(dst_b.data(), src.data(), -0.77, n);
      CHECK(dst_a == dst_b);
    }
    // add / scale_shift / relu / max: bitwise
    {
      const auto a = random_f32(rng, n);
      const auto b = random_f32(rng, n);
      std::vector<float> out_a(n), out_b(n);
      ref.add_f32(out_a.data(), a.data(), b.data(), n);
      avx2->add_f32(out_b.data(), a.data(), b.data(), n);
      CHECK(out_a == out_b);

      ref.scale_shift_f32(out_a.data(), a.data(), 0.31f, -2.0f, n);
      avx2->scale_shift_f32(out_b.data(), a.data(), 0.31f, -2.0f, n);
      CHECK(out_a == out_b);

      auto r_a = a, r_b = a;
      ref.relu_f32(r_a.data(), n);
      avx2->relu_f32(r_b.data(), n);
      CHECK(r_a == r_b);

      ref.max_f32(out_a.data(), a.data(), b.data(), n);
      avx2->max_f32(out_b.data(), a.data(), b.data(), n);
      CHECK(out_a == out_b);
    }
    // sum2: association differs, allow tiny relative error
    {
      const auto v = random_f32(rng, n);
      double s_a, q_a, s_b, q_b;
      ref.sum2_f32(v.data(), n, &s_a, &q_a);
      avx2->sum2_f32(v.data(), n, &s_b, &q_b);
      CHECK(s_a == doctest::Approx(s_b).epsilon(1e-12));
      CHECK(q_a == doctest::Approx(q_b).epsilon(1e-12));
    }
    // byte kernels: exact
    {
      auto a = random_u8(rng, n);
      auto b = random_u8(rng, n);
      for (std::size_t i = 0; i < n; i += 3) a[i] = 0;  // ensure zeros
      CHECK(ref.count_nonzero_u8(a.data(), n) ==
            avx2->count_nonzero_u8(a.data(), n));
      CHECK(ref.count_both_nonzero_u8(a.data(), b.data(), n) ==
            avx2->count_both_nonzero_u8(a.data(), b.data(), n));
      std::vector<std::uint8_t> t_a(n), t_b(n);
      for (std::uint8_t thr : {0, 1, 127, 128, 255}) {
        ref.threshold_ge_u8(t_a.data(), a.data(), thr, n);
        avx2->threshold_ge_u8(t_b.data(), a.data(), thr, n);
        CHECK(t_a == t_b);
      }
    }
  }
}

TEST_CASE("scalar kernels compute what they claim") {
  const kernels::Ops& ops = kernels::scalar_ops();

  std::vector<float> dst{1.0f, 2.0f, 3.0f};
  const std::vector<float> src{10.0f, 20.0f, 30.0f};
  ops.madd_f32(dst.data(), src.data(), 0.5f, 3);
  CHECK(dst == std::vector<float>{6.0f, 12.0f, 18.0f});

  std::vector<float> v{-1.0f, 0.0f, 2.5f};
  ops.relu_f32(v.data(), 3);
  CHECK(v == std::vector<float>{0.0f, 0.0f, 2.5f});

  double s, q;
  const std::vector<float> fv{1.0f, 2.0f, 3.0f, 4.0f, 5.0f};
  ops.sum2_f32(fv.data(), 5, &s, &q);
  CHECK(s == 15.0);
  CHECK(q == 55.0);

  const std::vector<std::uint8_t> bytes{0, 1, 2, 0, 255};
  CHECK(ops.count_nonzero_u8(bytes.data(), 5) == 3);
  const std::vector<std::uint8_t> other{1, 0, 9, 9, 9};
  CHECK(ops.count_both_nonzero_u8(bytes.data(), other.data(), 5) == 2);

  std::vector<std::uint8_t> t(5);
  ops.threshold_ge_u8(t.data(), bytes.data(), 2, 5);
  CHECK(t == std::vector<std::uint8_t>{0, 0, 1, 0, 1});
}
