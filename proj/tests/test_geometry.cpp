/// @file test_geometry.cpp
/// Obstacle shapes, motion programs, porosity and interface velocity.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pulshom/motion.hpp"

using namespace pulshom;

TEST_CASE("empty program gives the full cell") {
  MotionProgram p;
  const CellGeometry g = obstacle_at(p, 0.0, {0.5, 0.5}, 0.3);
  CHECK(g.empty());
  CHECK(g.porosity == 1.0);
}

TEST_CASE("rectangle porosity is the exact area formula") {
  auto p = MotionProgram::static_obstacle(ObstacleShape::rectangle(0.05, 0.1), {0.25, 0.5});
  const CellGeometry g = obstacle_at(p, 0.0, {0.5, 0.5}, 0.0);
  CHECK(g.porosity == doctest::Approx(0.98).epsilon(1e-14));
  CHECK(g.obstacle.size() == 4);
  CHECK(polygon_area_signed(g.obstacle) < 0.0);  // clockwise hole
}

TEST_CASE("paper motion placement at the quarter period") {
  auto p = MotionProgram::paper_example(0.05, 0.1);
  p.validate();
  const CellGeometry g = obstacle_at(p, 0.0, {0.5, 0.5}, 0.25);
  CHECK(g.placement.center.x == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(g.placement.center.y == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(g.placement.angle == doctest::Approx(0.0));
}

TEST_CASE("pore-outward normal points into the obstacle") {
  auto p = MotionProgram::static_obstacle(ObstacleShape::rectangle(0.1, 0.1), {0.5, 0.5});
  const CellGeometry g = obstacle_at(p, 0.0, {0.5, 0.5}, 0.0);
  // find the edge on the right side of the box (x = 0.6) and check nu = -e1
  bool found = false;
  for (size_t i = 0; i < g.obstacle.size(); ++i) {
    const Vec2& a = g.obstacle[i];
    const Vec2& b = g.obstacle[(i + 1) % g.obstacle.size()];
    if (std::abs(a.x - 0.6) < 1e-13 && std::abs(b.x - 0.6) < 1e-13) {
      const Vec2 nu = CellGeometry::interface_normal(a, b);
      CHECK(nu.x == doctest::Approx(-1.0));
      CHECK(nu.y == doctest::Approx(0.0));
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("clearance violation and invalid slice are rejected") {
  auto p = MotionProgram::static_obstacle(ObstacleShape::rectangle(0.3, 0.3), {0.85, 0.5});
  CHECK_THROWS_AS(obstacle_at(p, 0.0, {0.5, 0.5}, 0.0), ClearanceViolation);
  auto ok = MotionProgram::static_obstacle(ObstacleShape::rectangle(0.1, 0.1), {0.5, 0.5});
  CHECK_THROWS_AS(obstacle_at(ok, 0.0, {0.5, 0.5}, 1.5), InvalidSlice);
}

TEST_CASE("obstacle_at is pure: identical inputs give identical polygons") {
  auto p = MotionProgram::paper_example(0.05, 0.1);
  const CellGeometry a = obstacle_at(p, 0.0, {0.5, 0.5}, 0.35);
  const CellGeometry b = obstacle_at(p, 0.0, {0.5, 0.5}, 0.35);
  REQUIRE(a.obstacle.size() == b.obstacle.size());
  for (size_t i = 0; i < a.obstacle.size(); ++i) {
    CHECK(a.obstacle[i].x == b.obstacle[i].x);
    CHECK(a.obstacle[i].y == b.obstacle[i].y);
  }
}

TEST_CASE("boundary velocity of the translating phase is 2 e1") {
  auto p = MotionProgram::paper_example(0.05, 0.1);
  const CellGeometry g = obstacle_at(p, 0.0, {0.5, 0.5}, 0.125);
  const Vec2 v = boundary_velocity(p, 0.0, {0.5, 0.5}, 0.125, g.obstacle[0], 1e-9);
  CHECK(v.x == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(v.y == doctest::Approx(0.0));
}

TEST_CASE("static obstacle has zero boundary velocity") {
  auto p = MotionProgram::static_obstacle(ObstacleShape::rectangle(0.1, 0.1), {0.5, 0.5});
  const Vec2 v = boundary_velocity(p, 0.0, {0.5, 0.5}, 0.4, {0.6, 0.5});
  CHECK(v.x == 0.0);
  CHECK(v.y == 0.0);
}

TEST_CASE("rotation at rate pi/2 per quarter gives omega cross r") {
  // rotate by pi/2 during [0, 1/4) and back during [3/4, 1): omega = 2 pi
  MotionProgram p;
  p.shape = ObstacleShape::rectangle(0.05, 0.1);
  p.keyframes = {{0.0, {0.5, 0.5}, 0.0},
                 {0.25, {0.5, 0.5}, kPi / 2},
                 {0.75, {0.5, 0.5}, kPi / 2},
                 {1.0, {0.5, 0.5}, 0.0}};
  p.validate();
  const double b = 0.1;
  // at s=0 the point (0.5, 0.5 + b) sits on the top edge of the rectangle
  const Vec2 v = boundary_velocity(p, 0.0, {0.5, 0.5}, 0.0, {0.5, 0.5 + b}, 1e-9);
  CHECK(v.x == doctest::Approx(-2.0 * kPi * b).epsilon(1e-12));
  CHECK(v.y == doctest::Approx(0.0));
}

TEST_CASE("off-interface points are rejected") {
  auto p = MotionProgram::static_obstacle(ObstacleShape::rectangle(0.1, 0.1), {0.5, 0.5});
  CHECK_THROWS_AS(boundary_velocity(p, 0.0, {0.5, 0.5}, 0.0, {0.9, 0.9}, 1e-6),
                  PointNotOnInterface);
}

TEST_CASE("porosity rate: rigid motions preserve the area exactly") {
  auto p = MotionProgram::paper_example(0.05, 0.1);
  for (double s : {0.1, 0.3, 0.6, 0.9})
    CHECK(porosity_rate(p, 0.0, {0.5, 0.5}, s) == 0.0);
}

TEST_CASE("porosity rate of the breathing disk") {
  MotionProgram p = MotionProgram::static_obstacle(ObstacleShape::disk(0.2), {0.5, 0.5});
  p.radius_pulse = 0.05;
  p.validate();

  // d/ds Theta = -2 pi r(0) rdot(0) in the continuum; the polygon family
  // value converges to it as the chord tolerance shrinks
  const double continuum = -2.0 * kPi * 0.2 * (0.05 * 2.0 * kPi);
  const double rate = porosity_rate(p, 0.0, {0.5, 0.5}, 0.0, 1e-5);
  CHECK(rate == doctest::Approx(continuum).epsilon(2e-4));

  // the polygon value itself is the exact n-gon derivative
  const CellGeometry g = obstacle_at(p, 0.0, {0.5, 0.5}, 0.0, 1e-5);
  const int n = int(g.obstacle.size());
  const double ngon = -double(n) * std::sin(2.0 * kPi / n) * 0.2 * (0.05 * 2.0 * kPi);
  CHECK(rate == doctest::Approx(ngon).epsilon(1e-12));

  // extremum of r(s) at s = 1/4
  CHECK(porosity_rate(p, 0.0, {0.5, 0.5}, 0.25, 1e-5) == doctest::Approx(0.0).epsilon(1e-12));

  // central finite difference of the polygon area agrees
  const double hs = 1e-6;
  const double fd = (obstacle_at(p, 0, {0.5, 0.5}, hs, 1e-5).porosity -
                     obstacle_at(p, 0, {0.5, 0.5}, 0.0, 1e-5).porosity) /
                    hs;  // one-sided at s=0 is fine: rate is smooth
  CHECK(rate == doctest::Approx(fd).epsilon(1e-4));
}

TEST_CASE("porosity is S-periodic for valid programs") {
  auto p = MotionProgram::paper_example(0.05, 0.1);
  const double t0 = obstacle_at(p, 0, {0.5, 0.5}, 0.0).porosity;
  const double t1 = obstacle_at(p, 0, {0.5, 0.5}, 1.0).porosity;
  CHECK(t0 == t1);
}

TEST_CASE("non-periodic programs are rejected") {
  MotionProgram p;
  p.shape = ObstacleShape::rectangle(0.05, 0.1);
  p.keyframes = {{0.0, {0.25, 0.5}, 0.0}, {1.0, {0.75, 0.5}, 0.0}};
  CHECK_THROWS_AS(p.validate(), ValidationError);
}

TEST_CASE("macro modulation scales the rectangle half width") {
  MotionProgram p = MotionProgram::static_obstacle(ObstacleShape::rectangle(0.05, 0.1), {0.5, 0.5});
  p.macro_modulation = [](double, const Vec2& x) { return 1.0 + 0.5 * x.x; };
  const CellGeometry g = obstacle_at(p, 0.0, {0.8, 0.5}, 0.0);
  CHECK(g.porosity == doctest::Approx(1.0 - 4.0 * 0.05 * 1.4 * 0.1).epsilon(1e-12));
}
