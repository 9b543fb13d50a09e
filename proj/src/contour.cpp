#include "spinemeasure/contour.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

namespace spine {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Clockwise Moore neighborhood in the image frame (y downward),
// clock-face order starting at north.
constexpr int kDx[8] = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr int kDy[8] = {-1, -1, 0, 1, 1, 1, 0, -1};

int direction_index(int dx, int dy) {
  for (int i = 0; i < 8; ++i)
    if (kDx[i] == dx && kDy[i] == dy) return i;
  return -1;
}

std::string region_tag(const Region& r) {
  return "region bbox [" + std::to_string(r.min_x) + "," +
         std::to_string(r.min_y) + "]..[" + std::to_string(r.max_x) + "," +
         std::to_string(r.max_y) + "]";
}

// Occupancy bitmap over a region's bounding box for O(1) membership.
struct RegionGrid {
  int x0, y0, w, h;
  std::vector<std::uint8_t> cells;

  explicit RegionGrid(const Region& r)
      : x0(r.min_x),
        y0(r.min_y),
        w(r.max_x - r.min_x + 1),
        h(r.max_y - r.min_y + 1),
        cells(static_cast<std::size_t>(w) * h, 0) {
    for (const auto& [px, py] : r.pixel_set)
      cells[static_cast<std::size_t>(py - y0) * w + (px - x0)] = 1;
  }

  bool contains(int x, int y) const {
    const int lx = x - x0, ly = y - y0;
    return lx >= 0 && lx < w && ly >= 0 && ly < h &&
           cells[static_cast<std::size_t>(ly) * w + lx];
  }
};

}  // namespace

double fold_angle_deg(double deg) {
  while (deg > 90.0) deg -= 180.0;
  while (deg <= -90.0) deg += 180.0;
  return deg;
}

double edge_angle_deg(const Point& a, const Point& b) {
  // math frame: y upward, so the image-frame dy flips sign
  const double rad = std::atan2(-(b.y - a.y), b.x - a.x);
  return fold_angle_deg(rad * 180.0 / kPi);
}

double polygon_area(std::span<const Point> polygon) {
  const std::size_t n = polygon.size();
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& p = polygon[i];
    const Point& q = polygon[(i + 1) % n];
    twice += p.x * q.y - q.x * p.y;
  }
  return std::abs(twice) * 0.5;
}

std::vector<Region> extract_regions(const BinaryMask& mask) {
  std::vector<Region> regions;
  const int w = mask.width, h = mask.height;
  std::vector<std::uint8_t> visited(mask.pixels.size(), 0);
  std::vector<std::pair<int, int>> stack;

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t idx = mask.index(x, y);
      if (!mask.pixels[idx] || visited[idx]) continue;
      Region region;
      region.min_x = region.max_x = x;
      region.min_y = region.max_y = y;
      visited[idx] = 1;
      stack.assign(1, {x, y});
      while (!stack.empty()) {
        const auto [cx, cy] = stack.back();
        stack.pop_back();
        region.pixel_set.emplace_back(cx, cy);
        region.min_x = std::min(region.min_x, cx);
        region.max_x = std::max(region.max_x, cx);
        region.min_y = std::min(region.min_y, cy);
        region.max_y = std::max(region.max_y, cy);
        for (int d = 0; d < 8; ++d) {
          const int nx = cx + kDx[d], ny = cy + kDy[d];
          if (!mask.in_bounds(nx, ny)) continue;
          const std::size_t nidx = mask.index(nx, ny);
          if (mask.pixels[nidx] && !visited[nidx]) {
            visited[nidx] = 1;
            stack.emplace_back(nx, ny);
          }
        }
      }
      regions.push_back(std::move(region));
    }
  }
  return regions;
}

std::vector<Region> filter_small(std::vector<Region> regions,
                                 std::uint64_t a) {
  std::erase_if(regions,
                [a](const Region& r) { return r.pixel_count() < a; });
  return regions;
}

std::vector<Point> trace_boundary(const Region& region) {
  if (region.pixel_set.empty())
    raise(ErrorKind::Domain, "cannot trace an empty region");

  // topmost, then leftmost pixel; its west and north neighbors are outside
  auto start = region.pixel_set.front();
  for (const auto& p : region.pixel_set) {
    if (p.second < start.second ||
        (p.second == start.second && p.first < start.first))
      start = p;
  }

  if (region.pixel_set.size() == 1)
    return {Point{double(start.first), double(start.second)}};

  const RegionGrid grid(region);
  std::vector<std::pair<int, int>> sequence;
  std::unordered_set<std::uint64_t> seen;
  auto push_unique = [&](int x, int y) {
    const std::uint64_t key =
        (std::uint64_t(std::uint32_t(x)) << 32) | std::uint32_t(y);
    if (seen.insert(key).second) sequence.emplace_back(x, y);
  };

  std::pair<int, int> p = start;
  const int start_backtrack = direction_index(-1, 0);  // entered from west
  int backtrack = start_backtrack;
  push_unique(p.first, p.second);

  const std::size_t max_steps = 4 * region.pixel_set.size() + 8;
  for (std::size_t step = 0; step < max_steps; ++step) {
    int found = -1;
    int prev = backtrack;
    for (int k = 1; k <= 8; ++k) {
      const int d = (backtrack + k) % 8;
      const int nx = p.first + kDx[d], ny = p.second + kDy[d];
      if (grid.contains(nx, ny)) {
        found = d;
        break;
      }
      prev = d;
    }
    if (found < 0) break;  // isolated pixel, handled above
    const std::pair<int, int> next{p.first + kDx[found],
                                   p.second + kDy[found]};
    // backtrack direction as seen from the new pixel: the last background
    // cell examined before stepping
    const int bx = p.first + kDx[prev], by = p.second + kDy[prev];
    p = next;
    backtrack = direction_index(bx - p.first, by - p.second);
    if (p == start && backtrack == start_backtrack) break;  // Jacob's stop
    push_unique(p.first, p.second);
  }

  std::vector<Point> boundary;
  boundary.reserve(sequence.size());
  for (const auto& [x, y] : sequence)
    boundary.push_back(Point{double(x), double(y)});
  return boundary;
}

std::vector<Point> convex_hull(std::span<const Point> points) {
  if (points.empty()) raise(ErrorKind::Domain, "convex hull of no points");
  for (const Point& p : points)
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      raise(ErrorKind::Domain, "non-finite point in convex hull input");

  // work in the math frame so the CCW guarantee holds there
  std::vector<Point> pts(points.begin(), points.end());
  for (Point& p : pts) p.y = -p.y;
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  if (pts.size() < 3) {
    for (Point& p : pts) p.y = -p.y;
    return pts;
  }

  auto cross = [](const Point& o, const Point& a, const Point& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
  };

  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Point& p : pts) {  // lower hull
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  const std::size_t lower = k + 1;
  for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {  // upper hull
    while (k >= lower && cross(hull[k - 2], hull[k - 1], *it) <= 0) --k;
    hull[k++] = *it;
  }
  hull.resize(k - 1);
  for (Point& p : hull) p.y = -p.y;
  return hull;
}

std::array<Point, 4> min_area_rect(std::span<const Point> points) {
  std::vector<Point> hull = convex_hull(points);
  if (hull.size() < 3)
    raise(ErrorKind::Degenerate,
          "min-area rectangle needs at least 3 non-collinear points");

  // math frame throughout
  std::vector<Point> mh = hull;
  for (Point& p : mh) p.y = -p.y;

  double best_area = std::numeric_limits<double>::infinity();
  double best_abs_angle = std::numeric_limits<double>::infinity();
  std::array<Point, 4> best{};

  const std::size_t n = mh.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = mh[i];
    const Point& b = mh[(i + 1) % n];
    const double ex = b.x - a.x, ey = b.y - a.y;
    const double len = std::hypot(ex, ey);
    if (len == 0.0) continue;
    const double dx = ex / len, dy = ey / len;  // edge direction
    // project every hull vertex onto (d, n) with n = (-dy, dx)
    double umin = std::numeric_limits<double>::infinity(), umax = -umin;
    double vmin = umin, vmax = -umin;
    for (const Point& p : mh) {
      const double u = p.x * dx + p.y * dy;
      const double v = -p.x * dy + p.y * dx;
      umin = std::min(umin, u);
      umax = std::max(umax, u);
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
    const double area = (umax - umin) * (vmax - vmin);
    const double abs_angle =
        std::abs(fold_angle_deg(std::atan2(dy, dx) * 180.0 / kPi));
    const bool better =
        area < best_area - 1e-9 ||
        (area <= best_area + 1e-9 && abs_angle < best_abs_angle);
    if (better) {
      best_area = std::min(best_area, area);
      best_abs_angle = abs_angle;
      auto corner = [&](double u, double v) {
        // back to image frame (negate y)
        return Point{u * dx - v * dy, -(u * dy + v * dx)};
      };
      best = {corner(umin, vmin), corner(umax, vmin), corner(umax, vmax),
              corner(umin, vmax)};
    }
  }

  if (!std::isfinite(best_area) || best_area <= 0.0)
    raise(ErrorKind::Degenerate, "degenerate point set (zero-area hull)");
  return best;
}

VertebraQuad extract_quad(const Region& region) {
  const std::vector<Point> boundary = trace_boundary(region);
  std::array<Point, 4> rect{};
  try {
    rect = min_area_rect(boundary);
  } catch (const SpineError& e) {
    if (e.kind() == ErrorKind::Degenerate)
      raise(ErrorKind::Degenerate,
            std::string(e.what()) + " (" + region_tag(region) + ")");
    throw;
  }

  std::array<Point, 4> sorted = rect;
  std::sort(sorted.begin(), sorted.end(), [](const Point& a, const Point& b) {
    return a.y < b.y || (a.y == b.y && a.x < b.x);
  });

  VertebraQuad quad;
  quad.upper_left = sorted[0].x <= sorted[1].x ? sorted[0] : sorted[1];
  quad.upper_right = sorted[0].x <= sorted[1].x ? sorted[1] : sorted[0];
  quad.lower_left = sorted[2].x <= sorted[3].x ? sorted[2] : sorted[3];
  quad.lower_right = sorted[2].x <= sorted[3].x ? sorted[3] : sorted[2];
  quad.centroid = Point{(rect[0].x + rect[1].x + rect[2].x + rect[3].x) / 4.0,
                        (rect[0].y + rect[1].y + rect[2].y + rect[3].y) / 4.0};
  quad.upper_angle_deg = edge_angle_deg(quad.upper_left, quad.upper_right);
  quad.lower_angle_deg = edge_angle_deg(quad.lower_left, quad.lower_right);
  return quad;
}

LabeledSpine order_and_label(std::vector<VertebraQuad> quads) {
  std::sort(quads.begin(), quads.end(),
            [](const VertebraQuad& a, const VertebraQuad& b) {
              return a.centroid.y > b.centroid.y;  // bottom first
            });
  for (std::size_t i = 1; i < quads.size(); ++i) {
    const double gap = quads[i - 1].centroid.y - quads[i].centroid.y;
    if (gap < 0.5)
      raise(ErrorKind::AmbiguousOrdering,
            "vertebra centroids at image-y " +
                std::to_string(quads[i - 1].centroid.y) + " and " +
                std::to_string(quads[i].centroid.y) +
                " are closer than 0.5 px; ordering is ambiguous");
  }

  LabeledSpine spine;
  spine.complete = quads.size() == 18;
  spine.vertebrae.reserve(quads.size());
  if (spine.complete) {
    static const char* kLabels[18] = {"L5",  "L4",  "L3", "L2", "L1", "T12",
                                      "T11", "T10", "T9", "T8", "T7", "T6",
                                      "T5",  "T4",  "T3", "T2", "T1", "C7"};
    for (std::size_t i = 0; i < quads.size(); ++i)
      spine.vertebrae.push_back({kLabels[i], quads[i]});
  } else {
    for (std::size_t i = 0; i < quads.size(); ++i)
      spine.vertebrae.push_back({"V" + std::to_string(i + 1), quads[i]});
    spine.warnings.push_back(
        "expected 18 vertebrae, found " + std::to_string(quads.size()) +
        "; using generic labels V1..V" + std::to_string(quads.size()));
  }
  return spine;
}

}  // namespace spine
