#pragma once

// Brute-force reference implementations used to check the library. These
// stay deliberately naive and independent of the code under test: plain
// loops, std containers, no shared helpers.

#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "spinemeasure/raster.hpp"

namespace oracle {

using PixelSet = std::set<std::pair<int, int>>;

// Connected components by repeated flood fill (8-connectivity).
std::vector<PixelSet> flood_regions(const spine::BinaryMask& mask);

// Pixels with at least one background 4-neighbor (border = background).
PixelSet boundary_pixels(const spine::BinaryMask& mask);

// Same predicate restricted to one component's pixel set.
PixelSet boundary_of_set(const PixelSet& pixels);

// Hull vertex set by edge testing over all ordered point pairs (O(n^3)).
std::vector<spine::Point> hull_vertices(
    const std::vector<spine::Point>& points);

// Minimum bounding-box area over hull-edge-aligned orientations.
double min_rect_area(const std::vector<spine::Point>& points);

// Mean of directed mean nearest-neighbor distances, all-pairs.
double avg_hausdorff(const spine::BinaryMask& a, const spine::BinaryMask& b);

// Per-window SSIM with an 11x11 sigma-1.5 Gaussian, windows fully inside.
double ssim(const spine::BinaryMask& a, const spine::BinaryMask& b);

double dice(const spine::BinaryMask& a, const spine::BinaryMask& b);

// Object detection F1 with greedy IoU matching; regions below min_pixels
// are dropped first.
double object_f1(const spine::BinaryMask& pred, const spine::BinaryMask& ref,
                 double iou_threshold, std::uint64_t min_pixels);

// Exhaustive tilted-pair search over (upper_angle, lower_angle) lists with
// the maximize-theta rule and the larger-gap / smaller-l tie-break.
struct PairChoice {
  int upper = -1;
  int lower = -1;
  double theta = -1.0;
};
PairChoice best_pair(const std::vector<double>& upper_angles,
                     const std::vector<double>& lower_angles, int gap);

// Direct zero-padded 3x3 convolution, six nested loops.
std::vector<float> conv3x3_direct(const std::vector<float>& input, int ci,
                                  int h, int w,
                                  const std::vector<float>& weight,
                                  const std::vector<float>& bias, int co);

// Point-in-convex-polygon (vertices in order), tolerant of either winding.
bool point_in_polygon(const spine::Point& p,
                      const std::vector<spine::Point>& poly, double eps);

}  // namespace oracle
