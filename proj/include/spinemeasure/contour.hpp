#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spinemeasure/raster.hpp"

namespace spine {

// One 8-connected foreground component.
struct Region {
  std::vector<std::pair<int, int>> pixel_set;  // (x, y), scan order
  int min_x = 0, min_y = 0, max_x = 0, max_y = 0;

  std::uint64_t pixel_count() const { return pixel_set.size(); }
};

// Four ordered corner points of one vertebra. Corner order is
// upper-left, upper-right, lower-left, lower-right in the image frame.
// Edge angles are signed degrees to the horizontal in the math frame
// (y upward, counterclockwise positive), folded into (-90, 90].
struct VertebraQuad {
  Point upper_left, upper_right, lower_left, lower_right;
  Point centroid;
  double upper_angle_deg = 0.0;
  double lower_angle_deg = 0.0;

  std::array<Point, 4> corners() const {
    return {upper_left, upper_right, lower_left, lower_right};
  }
};

struct LabeledVertebra {
  std::string label;
  VertebraQuad quad;
};

// Vertebrae ordered bottom-to-top (index 0 = bottom-most). When exactly 18
// vertebrae are present the anatomical labels L5..C7 are assigned and
// complete is true; otherwise generic labels V1..Vk are used.
struct LabeledSpine {
  std::vector<LabeledVertebra> vertebrae;
  bool complete = false;
  std::vector<std::string> warnings;
};

// Maximal 8-connected foreground components, arbitrary order.
std::vector<Region> extract_regions(const BinaryMask& mask);

// Keeps regions with pixel_count >= a (strictly smaller ones are noise).
std::vector<Region> filter_small(std::vector<Region> regions,
                                 std::uint64_t a);

// Closed outer-boundary pixel sequence (Moore neighbor tracing, clockwise
// in the image frame). Every traced boundary pixel appears exactly once.
std::vector<Point> trace_boundary(const Region& region);

// Convex hull, vertices in counterclockwise order in the math frame
// (y upward). Collinear input degenerates to fewer than 3 vertices.
std::vector<Point> convex_hull(std::span<const Point> points);

// Corners of the minimum-area enclosing rectangle, one cyclic order.
// Throws Degenerate for collinear input. When two orientations give the
// same area within 1e-9, the one with smaller |angle to horizontal| wins.
std::array<Point, 4> min_area_rect(std::span<const Point> points);

// Min-area rectangle of the region's traced boundary, relabeled UL/UR/LL/LR
// by image-y then image-x, with edge angles derived from the result.
VertebraQuad extract_quad(const Region& region);

// Sorts by descending centroid image-y (bottom first) and labels.
LabeledSpine order_and_label(std::vector<VertebraQuad> quads);

// Helpers shared with tests and the synthetic generator.
double fold_angle_deg(double deg);                  // into (-90, 90]
double edge_angle_deg(const Point& a, const Point& b);  // math frame, folded
double polygon_area(std::span<const Point> polygon);    // absolute area

}  // namespace spine
