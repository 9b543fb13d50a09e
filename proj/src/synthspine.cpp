#include "spinemeasure/synthspine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace spine::synth {

namespace {

constexpr double kPi = 3.14159265358979323846;

double scale_at(const SynthSpec& spec, int i) {
  return spec.scales.empty() ? 1.0 : spec.scales[i];
}

// uniform in [0, 1) from the top 53 bits, stable across platforms
double next_unit(std::mt19937_64& rng) {
  return double(rng() >> 11) * 0x1.0p-53;
}

struct Layout {
  std::vector<double> center_y;  // bottom-to-top, image frame
  double span;                   // center_y.front() - center_y.back()
};

Layout layout_centers(const SynthSpec& spec) {
  const int n = spec.vertebra_count;
  double stack = spec.gap_px * (n - 1);
  for (int i = 0; i < n; ++i) stack += spec.base_height * scale_at(spec, i);
  const double margin = (spec.canvas_height - stack) / 2.0;

  Layout layout;
  layout.center_y.resize(n);
  double cursor = spec.canvas_height - margin;  // bottom edge of the stack
  for (int i = 0; i < n; ++i) {
    const double h = spec.base_height * scale_at(spec, i);
    layout.center_y[i] = cursor - h / 2.0;
    cursor -= h + spec.gap_px;
  }
  layout.span = layout.center_y.front() - layout.center_y.back();
  return layout;
}

// Lateral centerline offset and its derivative with respect to image y.
struct CenterlineSample {
  double offset;
  double slope;  // d offset / d y
};

CenterlineSample centerline_at(const SynthSpec& spec, const Layout& layout,
                               double y) {
  const double y0 = layout.center_y.front();
  if (spec.centerline == CenterlineKind::Sinusoid) {
    const double wavelength =
        spec.wavelength_px > 0.0 ? spec.wavelength_px : layout.span;
    const double arg = 2.0 * kPi * (y0 - y) / wavelength + spec.phase_rad;
    return {spec.amplitude_px * std::sin(arg),
            -spec.amplitude_px * std::cos(arg) * 2.0 * kPi / wavelength};
  }
  // offset = sum c_k t^k, derivative = sum k c_k t^(k-1)
  const double t = layout.span > 0.0 ? (y0 - y) / layout.span : 0.0;
  double offset = 0.0, doffset_dt = 0.0, tk = 1.0;
  for (std::size_t k = 0; k < spec.poly_coeffs.size(); ++k) {
    offset += spec.poly_coeffs[k] * tk;
    if (k + 1 < spec.poly_coeffs.size())
      doffset_dt += spec.poly_coeffs[k + 1] * double(k + 1) * tk;
    tk *= t;
  }
  const double dt_dy = layout.span > 0.0 ? -1.0 / layout.span : 0.0;
  return {offset, doffset_dt * dt_dy};
}

double seg_seg_distance(const Point& a0, const Point& a1, const Point& b0,
                        const Point& b1) {
  auto point_seg = [](const Point& p, const Point& s0, const Point& s1) {
    const double vx = s1.x - s0.x, vy = s1.y - s0.y;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0.0
                   ? ((p.x - s0.x) * vx + (p.y - s0.y) * vy) / len2
                   : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - (s0.x + t * vx), p.y - (s0.y + t * vy));
  };
  auto orient = [](const Point& p, const Point& q, const Point& r) {
    return (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
  };
  const double d1 = orient(a0, a1, b0), d2 = orient(a0, a1, b1);
  const double d3 = orient(b0, b1, a0), d4 = orient(b0, b1, a1);
  if (((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0))) return 0.0;
  return std::min(
      std::min(point_seg(b0, a0, a1), point_seg(b1, a0, a1)),
      std::min(point_seg(a0, b0, b1), point_seg(a1, b0, b1)));
}

std::array<Point, 4> cyclic_corners(const VertebraTruth& v) {
  return {v.corners[0], v.corners[1], v.corners[3], v.corners[2]};
}

bool point_in_quad(const Point& p, const std::array<Point, 4>& cyc) {
  for (int i = 0; i < 4; ++i) {
    const Point& a = cyc[i];
    const Point& b = cyc[(i + 1) % 4];
    const double cross =
        (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    if (cross < -1e-9) return false;
  }
  return true;
}

double quad_distance(const VertebraTruth& a, const VertebraTruth& b) {
  const auto ca = cyclic_corners(a), cb = cyclic_corners(b);
  if (point_in_quad(ca[0], cb) || point_in_quad(cb[0], ca)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      best = std::min(best, seg_seg_distance(ca[i], ca[(i + 1) % 4], cb[j],
                                             cb[(j + 1) % 4]));
  return best;
}

}  // namespace

void SynthSpec::validate() const {
  if (canvas_width <= 0 || canvas_height <= 0)
    raise(ErrorKind::InfeasibleSpec, "canvas dimensions must be positive");
  if (vertebra_count < 4)
    raise(ErrorKind::InfeasibleSpec, "vertebra_count must be >= 4");
  if (gap_px < 2.0)
    raise(ErrorKind::InfeasibleSpec,
          "gap must be >= 2 px to keep vertebrae well-separated");
  if (base_width <= 0.0 || base_height <= 0.0)
    raise(ErrorKind::InfeasibleSpec, "vertebra base size must be positive");
  if (jitter_px < 0.0)
    raise(ErrorKind::InfeasibleSpec, "jitter must be non-negative");
  if (!scales.empty() &&
      static_cast<int>(scales.size()) != vertebra_count)
    raise(ErrorKind::InfeasibleSpec,
          "scales must be empty or one factor per vertebra");
  for (double s : scales)
    if (!(s > 0.0))
      raise(ErrorKind::InfeasibleSpec, "scale factors must be positive");
  if (!std::isfinite(amplitude_px) || !std::isfinite(wavelength_px) ||
      !std::isfinite(phase_rad))
    raise(ErrorKind::InfeasibleSpec, "centerline parameters must be finite");
}

double amplitude_for_cobb(const SynthSpec& spec, double theta_deg) {
  if (!(theta_deg >= 0.0 && theta_deg < 90.0))
    raise(ErrorKind::Domain, "target Cobb angle must be in [0, 90)");
  const Layout layout = layout_centers(spec);
  const double wavelength =
      spec.wavelength_px > 0.0 ? spec.wavelength_px : layout.span;
  const double max_tilt_rad = theta_deg / 2.0 * kPi / 180.0;
  return std::tan(max_tilt_rad) * wavelength / (2.0 * kPi);
}

SynthResult generate(const SynthSpec& spec) {
  spec.validate();
  const int n = spec.vertebra_count;
  const Layout layout = layout_centers(spec);
  std::mt19937_64 rng(spec.seed);

  GroundTruth truth;
  truth.vertebrae.resize(n);

  const double cx0 = spec.canvas_width / 2.0;
  for (int i = 0; i < n; ++i) {
    const double cy = layout.center_y[i];
    const CenterlineSample cl = centerline_at(spec, layout, cy);
    const double cx = cx0 + cl.offset;
    const double tilt_rad = std::atan(cl.slope);

    const double w2 = spec.base_width * scale_at(spec, i) / 2.0;
    const double h2 = spec.base_height * scale_at(spec, i) / 2.0;
    // unit vectors in the image frame for a body rotated by tilt (math CCW)
    const double ex = std::cos(tilt_rad), ey = -std::sin(tilt_rad);
    const double dx = std::sin(tilt_rad), dy = std::cos(tilt_rad);

    VertebraTruth& v = truth.vertebrae[i];
    v.tilt_deg = tilt_rad * 180.0 / kPi;
    v.corners[0] = {cx - w2 * ex - h2 * dx, cy - w2 * ey - h2 * dy};  // UL
    v.corners[1] = {cx + w2 * ex - h2 * dx, cy + w2 * ey - h2 * dy};  // UR
    v.corners[2] = {cx - w2 * ex + h2 * dx, cy - w2 * ey + h2 * dy};  // LL
    v.corners[3] = {cx + w2 * ex + h2 * dx, cy + w2 * ey + h2 * dy};  // LR

    for (Point& corner : v.corners) {
      const double jx = (2.0 * next_unit(rng) - 1.0) * spec.jitter_px;
      const double jy = (2.0 * next_unit(rng) - 1.0) * spec.jitter_px;
      corner.x += jx;
      corner.y += jy;
    }
    v.centroid = {(v.corners[0].x + v.corners[1].x + v.corners[2].x +
                   v.corners[3].x) /
                      4.0,
                  (v.corners[0].y + v.corners[1].y + v.corners[2].y +
                   v.corners[3].y) /
                      4.0};
    v.upper_angle_deg = edge_angle_deg(v.corners[0], v.corners[1]);
    v.lower_angle_deg = edge_angle_deg(v.corners[2], v.corners[3]);
  }

  // feasibility: canvas fit with 2 px margin, pairwise clearance that
  // keeps rasterized regions 8-disconnected
  for (int i = 0; i < n; ++i) {
    for (const Point& c : truth.vertebrae[i].corners) {
      if (c.x < 2.0 || c.x > spec.canvas_width - 3.0 || c.y < 2.0 ||
          c.y > spec.canvas_height - 3.0)
        raise(ErrorKind::InfeasibleSpec,
              "vertebra " + std::to_string(i) +
                  " leaves the canvas margin (corner at " +
                  std::to_string(c.x) + "," + std::to_string(c.y) + ")");
    }
    for (int j = 0; j < i; ++j) {
      if (quad_distance(truth.vertebrae[i], truth.vertebrae[j]) < 1.5)
        raise(ErrorKind::InfeasibleSpec,
              "vertebra " + std::to_string(i) +
                  " overlaps or nearly touches vertebra " +
                  std::to_string(j));
    }
  }

  SynthResult result;
  result.mask = BinaryMask::filled(spec.canvas_width, spec.canvas_height, 0);
  for (const VertebraTruth& v : truth.vertebrae) {
    const auto cyc = cyclic_corners(v);
    double bx0 = cyc[0].x, bx1 = cyc[0].x, by0 = cyc[0].y, by1 = cyc[0].y;
    for (const Point& c : cyc) {
      bx0 = std::min(bx0, c.x);
      bx1 = std::max(bx1, c.x);
      by0 = std::min(by0, c.y);
      by1 = std::max(by1, c.y);
    }
    const int x0 = std::max(0, int(std::floor(bx0)));
    const int x1 = std::min(spec.canvas_width - 1, int(std::ceil(bx1)));
    const int y0 = std::max(0, int(std::floor(by0)));
    const int y1 = std::min(spec.canvas_height - 1, int(std::ceil(by1)));
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x)
        if (point_in_quad(Point{double(x), double(y)}, cyc))
          result.mask.set(x, y, 1);
  }

  truth.cobb = analytic_cobb(truth);
  result.truth = std::move(truth);
  return result;
}

LabeledSpine truth_to_spine(const GroundTruth& truth) {
  std::vector<VertebraQuad> quads;
  quads.reserve(truth.vertebrae.size());
  for (const VertebraTruth& v : truth.vertebrae) {
    VertebraQuad q;
    q.upper_left = v.corners[0];
    q.upper_right = v.corners[1];
    q.lower_left = v.corners[2];
    q.lower_right = v.corners[3];
    q.centroid = v.centroid;
    q.upper_angle_deg = v.upper_angle_deg;
    q.lower_angle_deg = v.lower_angle_deg;
    quads.push_back(q);
  }
  return order_and_label(std::move(quads));
}

CobbResult analytic_cobb(const GroundTruth& truth,
                         const MeasureConfig& config) {
  return select_tilted_pair(truth_to_spine(truth), config);
}

}  // namespace spine::synth
