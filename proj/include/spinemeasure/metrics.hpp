#pragma once

#include "spinemeasure/cobb.hpp"
#include "spinemeasure/raster.hpp"

namespace spine {

struct SegMetrics {
  double dice = 0.0;           // [0, 1]
  double ssim = 0.0;           // [-1, 1]
  double avg_hausdorff = 0.0;  // pixels
  double f1 = 0.0;             // [0, 1]
};

// 2|P∩R| / (|P|+|R|); 1 when both masks are empty.
double dice(const BinaryMask& pred, const BinaryMask& ref);

// Mean local SSIM over all positions where the 11x11 Gaussian window
// (sigma 1.5) lies fully inside the image. Dynamic range L=1 with
// foreground=1.0/background=0.0, C1=(0.01L)^2, C2=(0.03L)^2.
double ssim(const BinaryMask& pred, const BinaryMask& ref);

// Symmetric average of directed mean nearest-neighbor distances between
// the two boundary point sets. Boundary pixel: foreground with at least
// one background 4-neighbor; the image border counts as background.
double avg_hausdorff(const BinaryMask& pred, const BinaryMask& ref);

// Object-level detection F1: regions extracted from both masks (size
// filter applied at the scaled MeasureConfig floor), greedy one-to-one
// matching by descending IoU, a pair matches iff IoU >= iou_threshold.
double object_f1(const BinaryMask& pred, const BinaryMask& ref,
                 double iou_threshold = 0.5,
                 std::uint64_t min_contour_pixels = 200);

SegMetrics evaluate(const BinaryMask& pred, const BinaryMask& ref,
                    const MeasureConfig& config = {});

// Exposed for tests and the Hausdorff oracle.
std::vector<Point> boundary_points(const BinaryMask& mask);

}  // namespace spine
