#include "spinemeasure/cobb.hpp"

#include <cmath>

namespace spine {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

const char* to_string(Severity s) {
  switch (s) {
    case Severity::Normal: return "normal";
    case Severity::Mild: return "mild";
    case Severity::Moderate: return "moderate";
    case Severity::Severe: return "severe";
  }
  return "unknown";
}

Severity severity_from_string(const std::string& name) {
  if (name == "normal") return Severity::Normal;
  if (name == "mild") return Severity::Mild;
  if (name == "moderate") return Severity::Moderate;
  if (name == "severe") return Severity::Severe;
  raise(ErrorKind::Domain, "unknown severity name: " + name);
}

void MeasureConfig::validate() const {
  const auto& b = severity_boundaries;
  if (!(b.mild > 0.0 && b.mild < b.moderate && b.moderate < b.severe &&
        b.severe < 90.0))
    raise(ErrorKind::Domain,
          "severity boundaries must be strictly increasing within (0, 90)");
  if (gap < 1) raise(ErrorKind::Domain, "gap must be >= 1");
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0))
    raise(ErrorKind::Domain, "iou_threshold must be in (0, 1]");
  if (expected_vertebrae < 0)
    raise(ErrorKind::Domain, "expected_vertebrae must be >= 0");
}

std::uint64_t scaled_min_pixels(const MeasureConfig& config, int width,
                                int height) {
  const double reference_area = 1024.0 * 512.0;
  const double area = double(width) * double(height);
  const double scaled = double(config.min_contour_pixels) * area /
                        reference_area;
  return static_cast<std::uint64_t>(std::llround(scaled));
}

double cobb_angle(double m_u, double m_l) {
  if (!std::isfinite(m_u) || !std::isfinite(m_l))
    raise(ErrorKind::Domain, "vertebra slopes must be finite");
  const double denom = 1.0 + m_u * m_l;
  if (std::abs(denom) < 1e-12) return 90.0;  // perpendicular tangents
  return std::abs(std::atan((m_u - m_l) / denom)) * 180.0 / kPi;
}

double cobb_angle_from_angles(double alpha_u_deg, double alpha_l_deg) {
  double d = std::abs(alpha_u_deg - alpha_l_deg);
  d = std::fmod(d, 180.0);
  return std::min(d, 180.0 - d);
}

Severity classify_severity(double theta_deg,
                           const SeverityBoundaries& bounds) {
  if (!std::isfinite(theta_deg) || theta_deg < 0.0 || theta_deg > 90.0)
    raise(ErrorKind::Domain,
          "theta must be in [0, 90], got " + std::to_string(theta_deg));
  if (theta_deg < bounds.mild) return Severity::Normal;
  if (theta_deg < bounds.moderate) return Severity::Mild;
  if (theta_deg < bounds.severe) return Severity::Moderate;
  return Severity::Severe;
}

CobbResult select_tilted_pair(const LabeledSpine& spine,
                              const MeasureConfig& config) {
  config.validate();
  const int n = static_cast<int>(spine.vertebrae.size());
  if (n < config.gap + 1)
    raise(ErrorKind::InsufficientVertebrae,
          "need at least " + std::to_string(config.gap + 1) +
              " vertebrae for a pair with gap " + std::to_string(config.gap) +
              ", found " + std::to_string(n));

  int best_u = -1, best_l = -1;
  double best_theta = -1.0;
  double best_au = -1.0, best_al = -1.0;  // ExtremeTilts keys

  for (int l = 0; l + config.gap < n; ++l) {
    const double alpha_l = spine.vertebrae[l].quad.lower_angle_deg;
    for (int u = l + config.gap; u < n; ++u) {
      const double alpha_u = spine.vertebrae[u].quad.upper_angle_deg;
      const double theta = cobb_angle_from_angles(alpha_u, alpha_l);

      bool better = false;
      if (best_u < 0) {
        better = true;
      } else if (config.pair_rule == PairRule::MaximizeTheta) {
        if (theta > best_theta) {
          better = true;
        } else if (theta == best_theta) {
          const int gap_new = u - l, gap_old = best_u - best_l;
          better = gap_new > gap_old || (gap_new == gap_old && l < best_l);
        }
      } else {  // ExtremeTilts: most tilted upper, then most tilted lower
        const double au = std::abs(alpha_u), al = std::abs(alpha_l);
        if (au > best_au || (au == best_au && al > best_al)) {
          better = true;
        } else if (au == best_au && al == best_al) {
          const int gap_new = u - l, gap_old = best_u - best_l;
          better = gap_new > gap_old || (gap_new == gap_old && l < best_l);
        }
      }
      if (better) {
        best_u = u;
        best_l = l;
        best_theta = theta;
        best_au = std::abs(alpha_u);
        best_al = std::abs(alpha_l);
      }
    }
  }

  CobbResult result;
  result.upper_index = best_u;
  result.lower_index = best_l;
  result.upper_label = spine.vertebrae[best_u].label;
  result.lower_label = spine.vertebrae[best_l].label;
  result.theta_deg = best_theta;
  result.severity = classify_severity(best_theta, config.severity_boundaries);
  return result;
}

MeasureOutcome measure(const BinaryMask& mask, const MeasureConfig& config) {
  config.validate();
  const std::uint64_t min_pixels =
      scaled_min_pixels(config, mask.width, mask.height);
  std::vector<Region> regions =
      filter_small(extract_regions(mask), min_pixels);
  if (regions.empty())
    raise(ErrorKind::EmptySpine,
          "no regions survive the size filter (min " +
              std::to_string(min_pixels) + " px)");

  std::vector<VertebraQuad> quads;
  quads.reserve(regions.size());
  for (const Region& region : regions) quads.push_back(extract_quad(region));

  MeasureOutcome outcome;
  outcome.spine = order_and_label(std::move(quads));
  outcome.warnings = outcome.spine.warnings;
  if (config.expected_vertebrae != 18 &&
      static_cast<int>(outcome.spine.vertebrae.size()) !=
          config.expected_vertebrae) {
    outcome.warnings.push_back(
        "expected " + std::to_string(config.expected_vertebrae) +
        " vertebrae per config, found " +
        std::to_string(outcome.spine.vertebrae.size()));
  }
  outcome.result = select_tilted_pair(outcome.spine, config);
  return outcome;
}

}  // namespace spine
