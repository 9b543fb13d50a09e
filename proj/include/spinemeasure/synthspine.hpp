#pragma once

#include <cstdint>
#include <vector>

#include "spinemeasure/cobb.hpp"
#include "spinemeasure/raster.hpp"

namespace spine::synth {

enum class CenterlineKind { Sinusoid, Polynomial };

// Parametric scoliotic spine with analytically known ground truth.
// Vertebrae are placed bottom-to-top along the centerline x(t), each
// rotated to the local tangent, then rasterized by a center-of-pixel
// point-in-quadrilateral test.
struct SynthSpec {
  int canvas_width = 512;
  int canvas_height = 1024;
  int vertebra_count = 18;

  CenterlineKind centerline = CenterlineKind::Sinusoid;
  double amplitude_px = 0.0;   // sinusoid lateral amplitude
  double wavelength_px = 0.0;  // 0 -> one full period over the stack
  double phase_rad = 0.0;
  // polynomial option: lateral offset as sum c_k * t^k, t in [0,1]
  // from the bottom vertebra center to the top one
  std::vector<double> poly_coeffs;

  double base_width = 96.0;   // vertebra body size in pixels
  double base_height = 30.0;
  std::vector<double> scales;  // per-index size factors; empty = all 1.0

  double gap_px = 14.0;  // clearance between consecutive vertebrae
  std::uint64_t seed = 0;
  double jitter_px = 0.0;  // max per-corner perturbation

  void validate() const;
};

struct VertebraTruth {
  std::array<Point, 4> corners;  // UL, UR, LL, LR, image frame, exact
  Point centroid;
  double tilt_deg = 0.0;         // nominal body rotation (math frame)
  double upper_angle_deg = 0.0;  // from the exact (jittered) corners
  double lower_angle_deg = 0.0;
};

struct GroundTruth {
  std::vector<VertebraTruth> vertebrae;  // bottom-to-top
  CobbResult cobb;                       // via analytic_cobb, default config
};

struct SynthResult {
  BinaryMask mask;
  GroundTruth truth;
};

// Deterministic for identical spec (the seed lives in the spec).
SynthResult generate(const SynthSpec& spec);

// Same pair selection and angle formula as the measurement path, applied
// to the exact corners instead of rasterized ones.
CobbResult analytic_cobb(const GroundTruth& truth,
                         const MeasureConfig& config = {});

// Ground truth as a LabeledSpine (bottom-to-top, labeled like any
// measured spine); used by analytic_cobb and handy in tests.
LabeledSpine truth_to_spine(const GroundTruth& truth);

// Sinusoid amplitude whose tilt extremes produce the requested analytic
// Cobb angle (before jitter) for the given spec.
double amplitude_for_cobb(const SynthSpec& spec, double theta_deg);

}  // namespace spine::synth
