#include <doctest.h>

#include <array>
#include <cmath>

#include "oracles.hpp"
#include "roadfuse/errors.hpp"
#include "roadfuse/geometry.hpp"
#include "roadfuse/random.hpp"

using namespace roadfuse;

TEST_CASE("project: frame origin maps to (0,0) and round-trips") {
  const LocalFrame f(25.0, 51.0);
  const auto p = f.project({25.0, 51.0});
  CHECK(p.x == 0.0);
  CHECK(p.y == 0.0);
  const GeoPoint q{25.0123, 51.0456};
  const auto back = f.unproject(f.project(q));
  CHECK(back.lat == doctest::Approx(q.lat).epsilon(1e-12));
  CHECK(back.lon == doctest::Approx(q.lon).epsilon(1e-12));
}

TEST_CASE("project: short east-west and north-south distances against haversine") {
  const LocalFrame f(25.0, 51.0);
  const GeoPoint a{25.0, 51.0}, b{25.0, 51.001};
  const double planar = planar_distance(f.project(a), f.project(b));
  CHECK(std::abs(planar - oracle::haversine(a, b)) / oracle::haversine(a, b) < 1e-3);

  const GeoPoint c{25.001, 51.0};
  const double ns = planar_distance(f.project(a), f.project(c));
  CHECK(ns == doctest::Approx(kEarthRadiusM * 0.001 * std::acos(-1.0) / 180.0).epsilon(1e-9));
  CHECK(ns == doctest::Approx(111.19).epsilon(1e-4));
}

TEST_CASE("project: error below 0.5% inside a 10 km box up to 60 degrees") {
  Rng rng(7);
  for (int i = 0; i < 2000; ++i) {
    const double lat0 = rng.uniform(-60.0, 60.0);
    const double lon0 = rng.uniform(-179.0, 179.0);
    // 10 km box: about 0.09 degrees of latitude; longitude scaled by cos.
    const double dlat = 0.09 / 2, dlon = 0.09 / 2 / std::cos(lat0 * std::acos(-1.0) / 180.0);
    const GeoPoint a{lat0 + rng.uniform(-dlat, dlat), lon0 + rng.uniform(-dlon, dlon)};
    const GeoPoint b{lat0 + rng.uniform(-dlat, dlat), lon0 + rng.uniform(-dlon, dlon)};
    const LocalFrame f = LocalFrame::fit(std::array{a, b});
    const double h = oracle::haversine(a, b);
    if (h < 100.0) continue;
    CHECK(std::abs(planar_distance(f.project(a), f.project(b)) - h) / h < 0.005);
  }
}

TEST_CASE("LocalFrame rejects near-polar reference latitudes") {
  CHECK_THROWS_AS(LocalFrame(89.5), InvalidArgument);
  CHECK_NOTHROW(LocalFrame(88.9));
}

TEST_CASE("point_to_segment: endpoint, perpendicular and clamping cases") {
  const LocalFrame f(0.0, 0.0);
  const GeoPoint a{0.0, -0.001}, b{0.0, 0.001};
  CHECK(point_to_segment(a, a, b, f) == 0.0);
  CHECK(point_to_segment(GeoPoint{0.0001, 0.0}, a, b, f) == doctest::Approx(11.1195).epsilon(1e-4));
  const GeoPoint beyond{0.0, 0.003};
  CHECK(point_to_segment(beyond, a, b, f) ==
        doctest::Approx(planar_distance(f.project(beyond), f.project(b))).epsilon(1e-12));
  // Degenerate segment acts as a point.
  CHECK(point_to_segment(PlanarPoint{3, 4}, PlanarPoint{0, 0}, PlanarPoint{0, 0}) == doctest::Approx(5.0));
}

TEST_CASE("point_to_segment: bounded by endpoint distances; equals parametric search") {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const PlanarPoint u{rng.uniform(-100, 100), rng.uniform(-100, 100)};
    const PlanarPoint a{rng.uniform(-100, 100), rng.uniform(-100, 100)};
    const PlanarPoint b{rng.uniform(-100, 100), rng.uniform(-100, 100)};
    const double d = point_to_segment(u, a, b);
    CHECK(d >= 0.0);
    CHECK(d <= std::min(planar_distance(u, a), planar_distance(u, b)) + 1e-12);
    CHECK(d == doctest::Approx(oracle::segment_distance_search(u, a, b)).epsilon(1e-7));
  }
}

TEST_CASE("point_to_path: vertex, equidistant and brute-force cases") {
  const std::vector<PlanarPoint> path{{0, 0}, {100, 0}, {100, 100}};
  CHECK(point_to_path(PlanarPoint{100, 0}, path) == 0.0);
  // 10 m from the first segment and from the second: inside corner.
  CHECK(point_to_path(PlanarPoint{90, 10}, path) == doctest::Approx(10.0));
  CHECK_THROWS_AS(point_to_path(PlanarPoint{0, 0}, std::vector<PlanarPoint>{}), InvalidArgument);
  CHECK(point_to_path(PlanarPoint{3, 4}, std::vector<PlanarPoint>{{0, 0}}) == doctest::Approx(5.0));

  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    std::vector<PlanarPoint> p;
    for (int k = 0; k < 6; ++k) p.push_back({rng.uniform(0, 500), rng.uniform(0, 500)});
    const PlanarPoint u{rng.uniform(0, 500), rng.uniform(0, 500)};
    double best = oracle::kInf;
    for (std::size_t k = 1; k < p.size(); ++k) best = std::min(best, oracle::segment_distance_search(u, p[k - 1], p[k]));
    CHECK(point_to_path(u, p) == doctest::Approx(best).epsilon(1e-7));
  }
}

TEST_CASE("path_distance: identity, offset middle vertex and single point") {
  const LocalFrame f(0.0, 0.0);
  const std::vector<PlanarPoint> p0{{0, 0}, {100, 0}, {200, 0}};
  const std::vector<PlanarPoint> p1{{0, 0}, {100, 10}, {200, 0}};
  CHECK(path_distance(p0, p0) == 0.0);
  // p1's middle vertex is 10 m off p0, but p0's middle vertex is only
  // 10 * 100 / hypot(100, 10) m off p1's tilted segments; the min picks that.
  const double expected = 10.0 * 100.0 / std::hypot(100.0, 10.0);
  CHECK(directed_deviation(p1, p0) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(directed_deviation(p0, p1) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(path_distance(p0, p1) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(path_distance(p1, p0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(path_distance(p0, p1) <= 10.0);
  CHECK(path_distance(std::vector<PlanarPoint>{{50, 0}}, p0) == 0.0);

  // Same fixture through geographic coordinates: 200 m along the equator.
  Polyline g0, g1;
  for (const auto& p : p0) g0.push_back(f.unproject(p));
  for (const auto& p : p1) g1.push_back(f.unproject(p));
  CHECK(path_distance(g0, g1, f) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("path_distance: symmetric, non-negative, and the min of the two directed deviations") {
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    std::vector<PlanarPoint> a, b;
    for (int k = 0; k < 5; ++k) a.push_back({rng.uniform(0, 300), rng.uniform(0, 300)});
    for (int k = 0; k < 5; ++k) b.push_back({rng.uniform(0, 300), rng.uniform(0, 300)});
    // Brute force directly from the definition over vertices.
    auto directed = [](const std::vector<PlanarPoint>& from, const std::vector<PlanarPoint>& to) {
      double worst = 0.0;
      for (const auto& u : from) {
        double best = oracle::kInf;
        for (std::size_t k = 1; k < to.size(); ++k) best = std::min(best, oracle::segment_distance_search(u, to[k - 1], to[k]));
        worst = std::max(worst, best);
      }
      return worst;
    };
    const double d = path_distance(a, b);
    CHECK(d >= 0.0);
    CHECK(d == path_distance(b, a));
    CHECK(d == doctest::Approx(std::min(directed(a, b), directed(b, a))).epsilon(1e-7));
    CHECK(d <= directed(a, b) + 1e-12);
    CHECK(d <= directed(b, a) + 1e-12);
  }
}

TEST_CASE("polyline_length: single point, arc length and additivity") {
  const LocalFrame f(25.0, 51.0);
  CHECK(polyline_length(Polyline{{25.0, 51.0}}, f) == 0.0);
  CHECK(polyline_length(Polyline{{25.0, 51.0}, {25.001, 51.0}}, f) == doctest::Approx(111.19).epsilon(1e-4));
  const std::vector<PlanarPoint> a{{0, 0}, {3, 4}}, b{{3, 4}, {3, 10}};
  const std::vector<PlanarPoint> ab{{0, 0}, {3, 4}, {3, 10}};
  CHECK(polyline_length(ab) == doctest::Approx(polyline_length(a) + polyline_length(b)));
}

TEST_CASE("bearing: cardinal directions, antisymmetry and degenerate input") {
  CHECK(*bearing(PlanarPoint{0, 0}, PlanarPoint{0, 10}) == doctest::Approx(0.0));
  CHECK(*bearing(PlanarPoint{0, 0}, PlanarPoint{10, 0}) == doctest::Approx(90.0));
  CHECK(*bearing(PlanarPoint{0, 0}, PlanarPoint{0, -10}) == doctest::Approx(180.0));
  CHECK(*bearing(PlanarPoint{0, 0}, PlanarPoint{-10, 0}) == doctest::Approx(270.0));
  CHECK_FALSE(bearing(PlanarPoint{1, 1}, PlanarPoint{1, 1}).has_value());
  const LocalFrame f(25.0, 51.0);
  CHECK(*bearing(GeoPoint{25.0, 51.0}, GeoPoint{25.01, 51.0}, f) == doctest::Approx(0.0));
  Rng rng(9);
  for (int i = 0; i < 200; ++i) {
    const PlanarPoint a{rng.uniform(-50, 50), rng.uniform(-50, 50)}, b{rng.uniform(-50, 50), rng.uniform(-50, 50)};
    const double ab = *bearing(a, b), ba = *bearing(b, a);
    CHECK(ab >= 0.0);
    CHECK(ab < 360.0);
    CHECK(heading_difference(ab, ba) == doctest::Approx(180.0).epsilon(1e-9));
  }
  CHECK(heading_difference(350.0, 10.0) == doctest::Approx(20.0));
}
