#pragma once

#include <string>

#include "spinemeasure/cobb.hpp"

namespace spine::cli {

// Measurement overlay: vertebra outlines, corner dots, extended tangent
// lines through the selected pair's endplates, and the angle text.
std::string render_overlay_svg(int width, int height,
                               const MeasureOutcome& outcome);

}  // namespace spine::cli
