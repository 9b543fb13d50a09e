#pragma once

#include <string>
#include <vector>

#include "spinemeasure/contour.hpp"

namespace spine {

enum class Severity { Normal, Mild, Moderate, Severe };

const char* to_string(Severity s);
Severity severity_from_string(const std::string& name);

struct SeverityBoundaries {
  double mild = 10.0;
  double moderate = 25.0;
  double severe = 45.0;
};

enum class PairRule { MaximizeTheta, ExtremeTilts };

struct MeasureConfig {
  // noise floor in pixels at the 1024x512 reference resolution,
  // scaled proportionally to mask area before use
  std::uint64_t min_contour_pixels = 200;
  int expected_vertebrae = 18;
  double iou_threshold = 0.5;
  int gap = 3;  // minimum index difference between the selected pair
  SeverityBoundaries severity_boundaries;
  PairRule pair_rule = PairRule::MaximizeTheta;

  void validate() const;
};

std::uint64_t scaled_min_pixels(const MeasureConfig& config, int width,
                                int height);

struct CobbResult {
  std::string upper_label;
  std::string lower_label;
  int upper_index = 0;  // position in LabeledSpine, bottom-to-top
  int lower_index = 0;
  double theta_deg = 0.0;
  Severity severity = Severity::Normal;
};

// theta = |atan((m_u - m_l) / (1 + m_u * m_l))| in degrees. Perpendicular
// tangents (|1 + m_u*m_l| < 1e-12) return exactly 90.
double cobb_angle(double m_u, double m_l);

// Vertical-safe form: |alpha_u - alpha_l| folded into [0, 90]. Agrees with
// cobb_angle wherever both slopes are finite.
double cobb_angle_from_angles(double alpha_u_deg, double alpha_l_deg);

// theta < mild -> normal; < moderate -> mild; < severe -> moderate;
// otherwise severe (each boundary belongs to the more severe class).
Severity classify_severity(double theta_deg,
                           const SeverityBoundaries& bounds = {});

// Over all pairs (u, l) with u - l >= gap, the pair maximizing the Cobb
// angle between vertebra u's upper edge and vertebra l's lower edge.
// Ties break toward the larger index gap, then the smaller l.
CobbResult select_tilted_pair(const LabeledSpine& spine,
                              const MeasureConfig& config = {});

struct MeasureOutcome {
  CobbResult result;
  LabeledSpine spine;
  std::vector<std::string> warnings;
};

// Full pipeline: regions -> size filter -> quads -> ordering/labels ->
// tilted pair -> severity. Deterministic for identical (mask, config).
MeasureOutcome measure(const BinaryMask& mask, const MeasureConfig& config = {});

}  // namespace spine
