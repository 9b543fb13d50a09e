#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "helpers.hpp"
#include "oracles.hpp"
#include "spinemeasure/contour.hpp"

using namespace spine;
using testutil::mask_from_rows;

namespace {

std::set<std::pair<int, int>> region_set(const Region& r) {
  return {r.pixel_set.begin(), r.pixel_set.end()};
}

Region region_from(std::vector<std::pair<int, int>> pixels) {
  Region r;
  r.pixel_set = std::move(pixels);
  r.min_x = r.max_x = r.pixel_set.front().first;
  r.min_y = r.max_y = r.pixel_set.front().second;
  for (const auto& [x, y] : r.pixel_set) {
    r.min_x = std::min(r.min_x, x);
    r.max_x = std::max(r.max_x, x);
    r.min_y = std::min(r.min_y, y);
    r.max_y = std::max(r.max_y, y);
  }
  return r;
}

BinaryMask random_blob_mask(std::mt19937& rng, int w, int h) {
  std::uniform_int_distribution<int> coin(0, 3);
  BinaryMask m = BinaryMask::filled(w, h, 0);
  for (auto& p : m.pixels) p = coin(rng) == 0 ? 1 : 0;
  return m;
}

}  // namespace

TEST_CASE("extract_regions basics") {
  CHECK(extract_regions(BinaryMask::filled(7, 5, 0)).empty());

  BinaryMask block = BinaryMask::filled(10, 10, 0);
  for (int y = 3; y < 6; ++y)
    for (int x = 4; x < 7; ++x) block.set(x, y, 1);
  const auto regions = extract_regions(block);
  REQUIRE(regions.size() == 1);
  CHECK(regions[0].pixel_count() == 9);
  CHECK(regions[0].min_x == 4);
  CHECK(regions[0].max_x == 6);
  CHECK(regions[0].min_y == 3);
  CHECK(regions[0].max_y == 5);
}

TEST_CASE("corner-touching blocks merge under 8-connectivity") {
  const BinaryMask m = mask_from_rows({
      "##....",
      "##....",
      "..##..",
      "..##..",
  });
  // oracle first: flood fill says one component of 8 pixels
  const auto expected = oracle::flood_regions(m);
  REQUIRE(expected.size() == 1);
  REQUIRE(expected[0].size() == 8);

  const auto regions = extract_regions(m);
  REQUIRE(regions.size() == 1);
  CHECK(region_set(regions[0]) == expected[0]);
}

TEST_CASE("extract_regions partitions the foreground (random masks)") {
  std::mt19937 rng(21);
  for (int trial = 0; trial < 25; ++trial) {
    const BinaryMask m = random_blob_mask(rng, 24 + trial, 17 + trial % 9);
    const auto regions = extract_regions(m);
    const auto expected = oracle::flood_regions(m);
    REQUIRE(regions.size() == expected.size());

    std::vector<oracle::PixelSet> got;
    for (const Region& r : regions) got.push_back(region_set(r));
    auto key = [](const oracle::PixelSet& s) { return *s.begin(); };
    std::sort(got.begin(), got.end(),
              [&](const auto& a, const auto& b) { return key(a) < key(b); });
    std::vector<oracle::PixelSet> want = expected;
    std::sort(want.begin(), want.end(),
              [&](const auto& a, const auto& b) { return key(a) < key(b); });
    CHECK(got == want);

    // disjoint union equals foreground
    std::size_t total = 0;
    for (const auto& s : got) total += s.size();
    CHECK(total == foreground_count(m));
  }
}

TEST_CASE("filter_small keeps pixel_count >= a, preserving order") {
  std::vector<Region> regions;
  auto square = [](int side, int offset) {
    std::vector<std::pair<int, int>> px;
    for (int y = 0; y < side; ++y)
      for (int x = 0; x < side; ++x) px.push_back({offset + x, offset + y});
    return px;
  };
  regions.push_back(region_from(square(71, 0)));    // 5041 px
  regions.push_back(region_from(square(3, 100)));   // 9 px
  regions.push_back(region_from(square(70, 200)));  // 4900 px

  const auto kept = filter_small(regions, 200);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].pixel_count() == 5041);
  CHECK(kept[1].pixel_count() == 4900);

  CHECK(filter_small(regions, 0).size() == 3);

  // boundary: pixel_count == a survives (strict < removal)
  std::vector<std::pair<int, int>> exact;
  for (int i = 0; i < 200; ++i) exact.push_back({i, 0});
  CHECK(filter_small({region_from(exact)}, 200).size() == 1);
}

TEST_CASE("trace_boundary on canonical shapes") {
  // single pixel
  const Region dot = region_from({{5, 7}});
  const auto one = trace_boundary(dot);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == Point{5.0, 7.0});

  // 3x3 block: 8 boundary pixels in cyclic order, interior excluded
  std::vector<std::pair<int, int>> block;
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 3; ++x) block.push_back({x, y});
  const auto cycle = trace_boundary(region_from(block));
  REQUIRE(cycle.size() == 8);
  for (const Point& p : cycle) CHECK((p.x != 1.0 || p.y != 1.0));
  // consecutive boundary pixels stay 8-adjacent, including the wrap
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    const Point& a = cycle[i];
    const Point& b = cycle[(i + 1) % cycle.size()];
    CHECK(std::max(std::abs(a.x - b.x), std::abs(a.y - b.y)) <= 1.0);
  }
}

TEST_CASE("trace_boundary matches the 4-neighbor predicate on an L") {
  const BinaryMask m = mask_from_rows({
      "#..",
      "#..",
      "###",
  });
  const auto regions = extract_regions(m);
  REQUIRE(regions.size() == 1);

  // oracle: boundary = pixels with a background 4-neighbor
  const auto expected = oracle::boundary_of_set(region_set(regions[0]));
  const auto traced = trace_boundary(regions[0]);
  std::set<std::pair<int, int>> traced_set;
  for (const Point& p : traced)
    traced_set.insert({int(p.x), int(p.y)});
  CHECK(traced_set == expected);
  CHECK(traced.size() == expected.size());  // each exactly once
}

TEST_CASE("convex_hull basics and CCW order in the math frame") {
  const std::vector<Point> tri{{0, 0}, {4, 1}, {1, 5}};
  auto hull = convex_hull(tri);
  CHECK(hull.size() == 3);

  const std::vector<Point> square_plus_center{
      {0, 0}, {4, 0}, {4, 4}, {0, 4}, {2, 2}};
  hull = convex_hull(square_plus_center);
  CHECK(hull.size() == 4);
  for (const Point& p : hull) CHECK((p.x != 2.0 || p.y != 2.0));

  // shoelace in math coords must be positive for CCW
  double twice_area = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point& a = hull[i];
    const Point& b = hull[(i + 1) % hull.size()];
    twice_area += a.x * (-b.y) - b.x * (-a.y);
  }
  CHECK(twice_area > 0.0);
}

TEST_CASE("convex_hull contains every input point (random clouds)") {
  std::mt19937 rng(33);
  std::uniform_real_distribution<double> coord(-50.0, 50.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Point> pts(50);
    for (Point& p : pts) p = {coord(rng), coord(rng)};
    const auto hull = convex_hull(pts);
    for (const Point& p : pts)
      CHECK(oracle::point_in_polygon(p, hull, 1e-9));

    // vertex set agrees with the O(n^3) oracle
    const auto expected = oracle::hull_vertices(pts);
    REQUIRE(hull.size() == expected.size());
    for (const Point& v : expected) {
      bool found = false;
      for (const Point& h : hull)
        if (std::abs(h.x - v.x) < 1e-12 && std::abs(h.y - v.y) < 1e-12)
          found = true;
      CHECK(found);
    }
  }
}

TEST_CASE("min_area_rect on an axis-aligned rectangle") {
  const std::vector<Point> corners{{0, 0}, {4, 0}, {4, 2}, {0, 2}};
  const auto rect = min_area_rect(corners);
  CHECK(polygon_area(rect) == doctest::Approx(8.0).epsilon(1e-12));
  for (const Point& c : corners) {
    bool found = false;
    for (const Point& r : rect)
      if (std::abs(r.x - c.x) < 1e-9 && std::abs(r.y - c.y) < 1e-9)
        found = true;
    CHECK(found);
  }
}

TEST_CASE("min_area_rect area is rotation invariant") {
  const std::vector<Point> base{{0, 0}, {4, 0}, {4, 2}, {0, 2}};
  for (double deg : {30.0, 10.0, -37.0, 85.0}) {
    const double rad = deg * 3.14159265358979323846 / 180.0;
    std::vector<Point> rotated;
    for (const Point& p : base)
      rotated.push_back({p.x * std::cos(rad) - p.y * std::sin(rad),
                         p.x * std::sin(rad) + p.y * std::cos(rad)});
    const auto rect = min_area_rect(rotated);
    CHECK(polygon_area(rect) == doctest::Approx(8.0).epsilon(1e-6));
  }
}

TEST_CASE("min_area_rect matches the exhaustive orientation sweep") {
  std::mt19937 rng(55);
  std::uniform_real_distribution<double> coord(-30.0, 30.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Point> pts(20);
    for (Point& p : pts) p = {coord(rng), coord(rng)};
    const auto rect = min_area_rect(pts);
    const double area = polygon_area(rect);
    const double expected = oracle::min_rect_area(pts);
    CHECK(area == doctest::Approx(expected).epsilon(1e-9));

    // all points inside within tolerance
    const std::vector<Point> poly(rect.begin(), rect.end());
    for (const Point& p : pts)
      CHECK(oracle::point_in_polygon(p, poly, 1e-9 * (1.0 + area)));
  }
}

TEST_CASE("min_area_rect rejects degenerate input") {
  const std::vector<Point> line{{0, 0}, {1, 1}, {2, 2}, {3, 3}};
  CHECK_THROWS_AS((void)min_area_rect(line), SpineError);
  try {
    (void)min_area_rect(line);
  } catch (const SpineError& e) {
    CHECK(e.kind() == ErrorKind::Degenerate);
  }
}

TEST_CASE("extract_quad recovers rectangle orientation") {
  // axis-aligned 40x20 block
  const BinaryMask flat =
      testutil::rasterize_rect(100, 60, 50.0, 30.0, 40.0, 20.0, 0.0);
  const auto flat_regions = extract_regions(flat);
  REQUIRE(flat_regions.size() == 1);
  const VertebraQuad q0 = extract_quad(flat_regions[0]);
  CHECK(q0.upper_angle_deg == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(q0.lower_angle_deg == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(q0.upper_left.y < q0.lower_left.y);

  for (double tilt : {10.0, -10.0}) {
    CAPTURE(tilt);
    const BinaryMask m =
        testutil::rasterize_rect(120, 80, 60.0, 40.0, 40.0, 20.0, tilt);
    const auto regions = extract_regions(m);
    REQUIRE(regions.size() == 1);
    const VertebraQuad q = extract_quad(regions[0]);
    CHECK(std::abs(q.upper_angle_deg - tilt) < 1.0);
    CHECK(std::abs(q.lower_angle_deg - tilt) < 1.0);
  }
}

TEST_CASE("order_and_label assigns anatomical labels to 18, generic else") {
  auto quad_at = [](double y) {
    VertebraQuad q;
    q.upper_left = {0, y - 5};
    q.upper_right = {30, y - 5};
    q.lower_left = {0, y + 5};
    q.lower_right = {30, y + 5};
    q.centroid = {15, y};
    return q;
  };

  std::vector<VertebraQuad> quads;
  for (int i = 0; i < 18; ++i) quads.push_back(quad_at(900.0 - 50.0 * i));
  const LabeledSpine spine18 = order_and_label(quads);
  CHECK(spine18.complete);
  CHECK(spine18.vertebrae.front().label == "L5");
  CHECK(spine18.vertebrae.back().label == "C7");
  CHECK(spine18.vertebrae[5].label == "T12");
  CHECK(spine18.vertebrae[16].label == "T1");
  CHECK(spine18.warnings.empty());

  // shuffled input gives the identical spine
  std::vector<VertebraQuad> shuffled = quads;
  std::mt19937 rng(4);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const LabeledSpine again = order_and_label(shuffled);
  REQUIRE(again.vertebrae.size() == 18);
  for (int i = 0; i < 18; ++i) {
    CHECK(again.vertebrae[i].label == spine18.vertebrae[i].label);
    CHECK(again.vertebrae[i].quad.centroid.y ==
          spine18.vertebrae[i].quad.centroid.y);
  }

  // 17 quads -> generic labels and a warning
  quads.pop_back();
  const LabeledSpine spine17 = order_and_label(quads);
  CHECK_FALSE(spine17.complete);
  CHECK(spine17.vertebrae.front().label == "V1");
  CHECK(spine17.vertebrae.back().label == "V17");
  REQUIRE(spine17.warnings.size() == 1);

  // near-identical centroid y is ambiguous
  std::vector<VertebraQuad> clash{quad_at(100.0), quad_at(100.3)};
  CHECK_THROWS_AS((void)order_and_label(clash), SpineError);
}

TEST_CASE("translation equivariance of regions, boundaries and quads") {
  const BinaryMask base =
      testutil::rasterize_rect(90, 70, 40.0, 30.0, 36.0, 18.0, 12.0);
  const int dx = 7, dy = 11;
  const BinaryMask moved = testutil::translate(base, dx, dy, 120, 100);

  const auto r0 = extract_regions(base);
  const auto r1 = extract_regions(moved);
  REQUIRE(r0.size() == 1);
  REQUIRE(r1.size() == 1);
  CHECK(r0[0].pixel_count() == r1[0].pixel_count());
  CHECK(r1[0].min_x == r0[0].min_x + dx);
  CHECK(r1[0].min_y == r0[0].min_y + dy);

  const auto b0 = trace_boundary(r0[0]);
  const auto b1 = trace_boundary(r1[0]);
  REQUIRE(b0.size() == b1.size());
  for (std::size_t i = 0; i < b0.size(); ++i) {
    CHECK(b1[i].x == b0[i].x + dx);
    CHECK(b1[i].y == b0[i].y + dy);
  }

  const VertebraQuad q0 = extract_quad(r0[0]);
  const VertebraQuad q1 = extract_quad(r1[0]);
  CHECK(q1.upper_angle_deg == doctest::Approx(q0.upper_angle_deg).epsilon(1e-12));
  CHECK(q1.lower_angle_deg == doctest::Approx(q0.lower_angle_deg).epsilon(1e-12));
  CHECK(q1.centroid.x == doctest::Approx(q0.centroid.x + dx).epsilon(1e-9));
  CHECK(q1.centroid.y == doctest::Approx(q0.centroid.y + dy).epsilon(1e-9));
}

TEST_CASE("horizontal mirroring negates edge angles") {
  const BinaryMask base =
      testutil::rasterize_rect(110, 90, 55.0, 45.0, 44.0, 20.0, 14.0);
  const BinaryMask mirrored = testutil::mirror_horizontal(base);

  const auto r0 = extract_regions(base);
  const auto r1 = extract_regions(mirrored);
  REQUIRE(r0.size() == 1);
  REQUIRE(r1.size() == 1);
  CHECK(r0[0].pixel_count() == r1[0].pixel_count());

  const VertebraQuad q0 = extract_quad(r0[0]);
  const VertebraQuad q1 = extract_quad(r1[0]);
  CHECK(std::abs(q1.upper_angle_deg + q0.upper_angle_deg) < 1.0);
  CHECK(std::abs(q1.lower_angle_deg + q0.lower_angle_deg) < 1.0);
}

TEST_CASE("fold_angle_deg folds into (-90, 90]") {
  CHECK(fold_angle_deg(90.0) == 90.0);
  CHECK(fold_angle_deg(91.0) == doctest::Approx(-89.0));
  CHECK(fold_angle_deg(-90.0) == doctest::Approx(90.0));
  CHECK(fold_angle_deg(180.0) == doctest::Approx(0.0));
  CHECK(fold_angle_deg(-270.0) == doctest::Approx(90.0));
}
