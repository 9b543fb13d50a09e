#include "svg_overlay.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace spine::cli {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

// Intersections of the line through a-b with the canvas rectangle, widened
// so the tangent visibly extends past the spine.
std::pair<Point, Point> extend_line(const Point& a, const Point& b, int w,
                                    int h) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  if (std::abs(dx) >= std::abs(dy)) {
    const double slope = dx != 0.0 ? dy / dx : 0.0;
    return {Point{0.0, a.y + (0.0 - a.x) * slope},
            Point{double(w), a.y + (double(w) - a.x) * slope}};
  }
  const double inv = dy != 0.0 ? dx / dy : 0.0;
  return {Point{a.x + (0.0 - a.y) * inv, 0.0},
          Point{a.x + (double(h) - a.y) * inv, double(h)}};
}

void polygon(std::ostringstream& svg, const VertebraQuad& q,
             const char* stroke) {
  svg << "  <polygon points=\"" << fmt(q.upper_left.x) << ","
      << fmt(q.upper_left.y) << " " << fmt(q.upper_right.x) << ","
      << fmt(q.upper_right.y) << " " << fmt(q.lower_right.x) << ","
      << fmt(q.lower_right.y) << " " << fmt(q.lower_left.x) << ","
      << fmt(q.lower_left.y) << "\" fill=\"none\" stroke=\"" << stroke
      << "\" stroke-width=\"1.5\"/>\n";
}

void corner_dots(std::ostringstream& svg, const VertebraQuad& q) {
  for (const Point& p : q.corners()) {
    svg << "  <circle cx=\"" << fmt(p.x) << "\" cy=\"" << fmt(p.y)
        << "\" r=\"2\" fill=\"#d62728\"/>\n";
  }
}

}  // namespace

std::string render_overlay_svg(int width, int height,
                               const MeasureOutcome& outcome) {
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  svg << "  <rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"#101010\"/>\n";

  const CobbResult& r = outcome.result;
  for (std::size_t i = 0; i < outcome.spine.vertebrae.size(); ++i) {
    const auto& v = outcome.spine.vertebrae[i];
    const bool selected = static_cast<int>(i) == r.upper_index ||
                          static_cast<int>(i) == r.lower_index;
    polygon(svg, v.quad, selected ? "#ffcc00" : "#2ca02c");
    corner_dots(svg, v.quad);
    svg << "  <text x=\"" << fmt(v.quad.upper_right.x + 6.0) << "\" y=\""
        << fmt(v.quad.centroid.y + 4.0)
        << "\" font-size=\"12\" fill=\"#dddddd\">" << v.label << "</text>\n";
  }

  const auto& upper = outcome.spine.vertebrae[r.upper_index].quad;
  const auto& lower = outcome.spine.vertebrae[r.lower_index].quad;
  const auto [u0, u1] =
      extend_line(upper.upper_left, upper.upper_right, width, height);
  const auto [l0, l1] =
      extend_line(lower.lower_left, lower.lower_right, width, height);
  svg << "  <line x1=\"" << fmt(u0.x) << "\" y1=\"" << fmt(u0.y)
      << "\" x2=\"" << fmt(u1.x) << "\" y2=\"" << fmt(u1.y)
      << "\" stroke=\"#ff7f0e\" stroke-width=\"1.5\" "
         "stroke-dasharray=\"6,3\"/>\n";
  svg << "  <line x1=\"" << fmt(l0.x) << "\" y1=\"" << fmt(l0.y)
      << "\" x2=\"" << fmt(l1.x) << "\" y2=\"" << fmt(l1.y)
      << "\" stroke=\"#ff7f0e\" stroke-width=\"1.5\" "
         "stroke-dasharray=\"6,3\"/>\n";

  svg << "  <text x=\"8\" y=\"20\" font-size=\"16\" fill=\"#ffffff\">Cobb "
      << fmt(r.theta_deg) << "&#176; (" << to_string(r.severity) << ", "
      << r.upper_label << "/" << r.lower_label << ")</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace spine::cli
