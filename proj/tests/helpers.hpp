#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "spinemeasure/raster.hpp"

namespace testutil {

inline spine::BinaryMask mask_from_rows(const std::vector<std::string>& rows) {
  spine::BinaryMask m;
  m.height = static_cast<int>(rows.size());
  m.width = static_cast<int>(rows.front().size());
  m.pixels.reserve(std::size_t(m.width) * m.height);
  for (const std::string& row : rows)
    for (char c : row) m.pixels.push_back(c == '#' ? 1 : 0);
  return m;
}

// Axis-aligned w x h rectangle centered at (cx, cy), rotated by angle_deg
// (math frame, CCW positive), rasterized into a canvas by pixel-center
// point-in-quad tests.
inline spine::BinaryMask rasterize_rect(int canvas_w, int canvas_h, double cx,
                                        double cy, double w, double h,
                                        double angle_deg) {
  const double rad = angle_deg * 3.14159265358979323846 / 180.0;
  const double ex = std::cos(rad), ey = -std::sin(rad);  // image frame
  const double dx = std::sin(rad), dy = std::cos(rad);
  const spine::Point corners[4] = {
      {cx - w / 2 * ex - h / 2 * dx, cy - w / 2 * ey - h / 2 * dy},
      {cx + w / 2 * ex - h / 2 * dx, cy + w / 2 * ey - h / 2 * dy},
      {cx + w / 2 * ex + h / 2 * dx, cy + w / 2 * ey + h / 2 * dy},
      {cx - w / 2 * ex + h / 2 * dx, cy - w / 2 * ey + h / 2 * dy}};

  spine::BinaryMask mask = spine::BinaryMask::filled(canvas_w, canvas_h, 0);
  for (int y = 0; y < canvas_h; ++y) {
    for (int x = 0; x < canvas_w; ++x) {
      bool pos = false, neg = false;
      for (int i = 0; i < 4; ++i) {
        const auto& a = corners[i];
        const auto& b = corners[(i + 1) % 4];
        const double cross =
            (b.x - a.x) * (y - a.y) - (b.y - a.y) * (x - a.x);
        if (cross > 1e-12) pos = true;
        if (cross < -1e-12) neg = true;
      }
      if (!(pos && neg)) mask.set(x, y, 1);
    }
  }
  return mask;
}

inline spine::BinaryMask translate(const spine::BinaryMask& m, int dx,
                                   int dy, int new_w, int new_h) {
  spine::BinaryMask out = spine::BinaryMask::filled(new_w, new_h, 0);
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x)
      if (m.at(x, y)) out.set(x + dx, y + dy, 1);
  return out;
}

inline spine::BinaryMask mirror_horizontal(const spine::BinaryMask& m) {
  spine::BinaryMask out = spine::BinaryMask::filled(m.width, m.height, 0);
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x)
      if (m.at(x, y)) out.set(m.width - 1 - x, y, 1);
  return out;
}

}  // namespace testutil
