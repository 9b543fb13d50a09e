#include "spinemeasure/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spinemeasure/kernels.hpp"

namespace spine {

namespace {

void require_same_shape(const BinaryMask& a, const BinaryMask& b) {
  if (a.width != b.width || a.height != b.height)
    raise(ErrorKind::Shape,
          "mask dimensions differ: " + std::to_string(a.width) + "x" +
              std::to_string(a.height) + " vs " + std::to_string(b.width) +
              "x" + std::to_string(b.height));
}

// ------------------------------------------------------------------ SSIM

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;

std::array<double, kWindow> gaussian_taps() {
  std::array<double, kWindow> taps{};
  double total = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - (kWindow - 1) / 2.0;
    taps[i] = std::exp(-(d * d) / (2.0 * kSigma * kSigma));
    total += taps[i];
  }
  for (double& t : taps) t /= total;
  return taps;
}

// Separable "valid" Gaussian filter: output is (h-10) x (w-10).
std::vector<double> gauss_valid(const std::vector<double>& img, int w, int h,
                                const std::array<double, kWindow>& taps) {
  const int vw = w - kWindow + 1;
  const int vh = h - kWindow + 1;
  const auto& ops = kernels::active();

  std::vector<double> tmp(static_cast<std::size_t>(h) * vw, 0.0);
  for (int y = 0; y < h; ++y) {
    double* dst = tmp.data() + static_cast<std::size_t>(y) * vw;
    const double* src = img.data() + static_cast<std::size_t>(y) * w;
    for (int k = 0; k < kWindow; ++k)
      ops.madd_f64(dst, src + k, taps[k], vw);
  }
  std::vector<double> out(static_cast<std::size_t>(vh) * vw, 0.0);
  for (int y = 0; y < vh; ++y) {
    double* dst = out.data() + static_cast<std::size_t>(y) * vw;
    for (int k = 0; k < kWindow; ++k)
      ops.madd_f64(dst, tmp.data() + static_cast<std::size_t>(y + k) * vw,
                   taps[k], vw);
  }
  return out;
}

// -------------------------------------------------- exact distance field

constexpr double kInf = 1e30;

// Felzenszwalb-Huttenlocher 1D squared distance transform.
void dt_1d(std::vector<double>& f, std::vector<double>& d,
           std::vector<int>& v, std::vector<double>& z, int n) {
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < n; ++q) {
    double s;
    while (true) {
      s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) /
          (2.0 * q - 2.0 * v[k]);
      if (s > z[k]) break;
      --k;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    d[q] = double(q - v[k]) * (q - v[k]) + f[v[k]];
  }
}

// Exact squared Euclidean distance to the nearest seed over the grid.
std::vector<double> squared_edt(const std::vector<Point>& seeds, int w,
                                int h) {
  std::vector<double> dist(static_cast<std::size_t>(w) * h, kInf);
  for (const Point& p : seeds)
    dist[static_cast<std::size_t>(p.y) * w + static_cast<std::size_t>(p.x)] =
        0.0;

  const int n = std::max(w, h);
  std::vector<double> f(n), d(n), z(n + 1);
  std::vector<int> v(n);

  for (int x = 0; x < w; ++x) {  // columns
    for (int y = 0; y < h; ++y) f[y] = dist[std::size_t(y) * w + x];
    dt_1d(f, d, v, z, h);
    for (int y = 0; y < h; ++y) dist[std::size_t(y) * w + x] = d[y];
  }
  for (int y = 0; y < h; ++y) {  // rows
    for (int x = 0; x < w; ++x) f[x] = dist[std::size_t(y) * w + x];
    dt_1d(f, d, v, z, w);
    for (int x = 0; x < w; ++x) dist[std::size_t(y) * w + x] = d[x];
  }
  return dist;
}

double directed_mean_distance(const std::vector<Point>& from,
                              const std::vector<double>& sq_dist_to_other,
                              int w) {
  double total = 0.0;
  for (const Point& p : from)
    total += std::sqrt(sq_dist_to_other[static_cast<std::size_t>(p.y) * w +
                                        static_cast<std::size_t>(p.x)]);
  return total / double(from.size());
}

}  // namespace

std::vector<Point> boundary_points(const BinaryMask& mask) {
  std::vector<Point> points;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.at(x, y)) continue;
      const bool edge = x == 0 || y == 0 || x == mask.width - 1 ||
                        y == mask.height - 1 || !mask.at(x - 1, y) ||
                        !mask.at(x + 1, y) || !mask.at(x, y - 1) ||
                        !mask.at(x, y + 1);
      if (edge) points.push_back(Point{double(x), double(y)});
    }
  }
  return points;
}

double dice(const BinaryMask& pred, const BinaryMask& ref) {
  require_same_shape(pred, ref);
  const auto& ops = kernels::active();
  const std::uint64_t p =
      ops.count_nonzero_u8(pred.pixels.data(), pred.pixels.size());
  const std::uint64_t r =
      ops.count_nonzero_u8(ref.pixels.data(), ref.pixels.size());
  if (p + r == 0) return 1.0;
  const std::uint64_t inter = ops.count_both_nonzero_u8(
      pred.pixels.data(), ref.pixels.data(), pred.pixels.size());
  return 2.0 * double(inter) / double(p + r);
}

double ssim(const BinaryMask& pred, const BinaryMask& ref) {
  require_same_shape(pred, ref);
  if (pred.width < kWindow || pred.height < kWindow)
    raise(ErrorKind::Size, "ssim needs images of at least " +
                               std::to_string(kWindow) + "x" +
                               std::to_string(kWindow));

  const int w = pred.width, h = pred.height;
  const std::size_t n = pred.pixels.size();
  std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = pred.pixels[i] ? 1.0 : 0.0;
    y[i] = ref.pixels[i] ? 1.0 : 0.0;
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }

  const auto taps = gaussian_taps();
  const auto mu_x = gauss_valid(x, w, h, taps);
  const auto mu_y = gauss_valid(y, w, h, taps);
  const auto e_xx = gauss_valid(xx, w, h, taps);
  const auto e_yy = gauss_valid(yy, w, h, taps);
  const auto e_xy = gauss_valid(xy, w, h, taps);

  constexpr double kC1 = 0.01 * 0.01;  // (K1 * L)^2 with L = 1
  constexpr double kC2 = 0.03 * 0.03;

  double total = 0.0;
  for (std::size_t i = 0; i < mu_x.size(); ++i) {
    const double mx = mu_x[i], my = mu_y[i];
    const double sx = e_xx[i] - mx * mx;
    const double sy = e_yy[i] - my * my;
    const double sxy = e_xy[i] - mx * my;
    total += ((2.0 * mx * my + kC1) * (2.0 * sxy + kC2)) /
             ((mx * mx + my * my + kC1) * (sx + sy + kC2));
  }
  return total / double(mu_x.size());
}

double avg_hausdorff(const BinaryMask& pred, const BinaryMask& ref) {
  require_same_shape(pred, ref);
  const std::vector<Point> a = boundary_points(pred);
  const std::vector<Point> b = boundary_points(ref);
  if (a.empty() || b.empty())
    raise(ErrorKind::EmptyBoundary,
          std::string("mask has no boundary pixels (") +
              (a.empty() ? "pred" : "ref") + ")");

  const auto dist_to_b = squared_edt(b, pred.width, pred.height);
  const auto dist_to_a = squared_edt(a, pred.width, pred.height);
  return 0.5 * (directed_mean_distance(a, dist_to_b, pred.width) +
                directed_mean_distance(b, dist_to_a, pred.width));
}

double object_f1(const BinaryMask& pred, const BinaryMask& ref,
                 double iou_threshold, std::uint64_t min_contour_pixels) {
  require_same_shape(pred, ref);
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0))
    raise(ErrorKind::Domain, "iou_threshold must be in (0, 1]");

  MeasureConfig scale_cfg;
  scale_cfg.min_contour_pixels = min_contour_pixels;
  const std::uint64_t floor =
      scaled_min_pixels(scale_cfg, pred.width, pred.height);
  const auto regions_p = filter_small(extract_regions(pred), floor);
  const auto regions_r = filter_small(extract_regions(ref), floor);
  const std::size_t np = regions_p.size(), nr = regions_r.size();
  if (np == 0 && nr == 0) return 1.0;
  if (np == 0 || nr == 0) return 0.0;

  // label maps -> joint histogram -> pairwise IoU
  std::vector<int> label_p(pred.pixels.size(), -1);
  std::vector<int> label_r(ref.pixels.size(), -1);
  for (std::size_t i = 0; i < np; ++i)
    for (const auto& [x, y] : regions_p[i].pixel_set)
      label_p[pred.index(x, y)] = static_cast<int>(i);
  for (std::size_t j = 0; j < nr; ++j)
    for (const auto& [x, y] : regions_r[j].pixel_set)
      label_r[ref.index(x, y)] = static_cast<int>(j);

  std::vector<std::uint64_t> inter(np * nr, 0);
  for (std::size_t i = 0; i < label_p.size(); ++i)
    if (label_p[i] >= 0 && label_r[i] >= 0)
      ++inter[static_cast<std::size_t>(label_p[i]) * nr + label_r[i]];

  struct Candidate {
    double iou;
    std::size_t p, r;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < np; ++i) {
    for (std::size_t j = 0; j < nr; ++j) {
      const std::uint64_t in = inter[i * nr + j];
      if (in == 0) continue;
      const double un = double(regions_p[i].pixel_count() +
                               regions_r[j].pixel_count() - in);
      candidates.push_back({double(in) / un, i, j});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.iou != b.iou) return a.iou > b.iou;
              if (a.p != b.p) return a.p < b.p;
              return a.r < b.r;
            });

  std::vector<bool> used_p(np, false), used_r(nr, false);
  std::uint64_t tp = 0;
  for (const Candidate& c : candidates) {
    if (c.iou < iou_threshold) break;
    if (used_p[c.p] || used_r[c.r]) continue;
    used_p[c.p] = used_r[c.r] = true;
    ++tp;
  }
  const std::uint64_t fp = np - tp, fn = nr - tp;
  return 2.0 * double(tp) / double(2 * tp + fp + fn);
}

SegMetrics evaluate(const BinaryMask& pred, const BinaryMask& ref,
                    const MeasureConfig& config) {
  config.validate();
  SegMetrics m;
  m.dice = dice(pred, ref);
  m.ssim = ssim(pred, ref);
  m.avg_hausdorff = avg_hausdorff(pred, ref);
  m.f1 = object_f1(pred, ref, config.iou_threshold,
                   config.min_contour_pixels);
  return m;
}

}  // namespace spine
