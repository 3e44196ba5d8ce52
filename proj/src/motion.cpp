#include "pulshom/motion.hpp"

#include <algorithm>
#include <cmath>

namespace pulshom {

namespace {

double wrap_angle_difference(double a, double b) {
  double d = std::fmod(a - b, 2.0 * kPi);
  if (d > kPi) d -= 2.0 * kPi;
  if (d < -kPi) d += 2.0 * kPi;
  return d;
}

}  // namespace

void MotionProgram::validate() const {
  if (shape.empty()) {
    if (radius_pulse != 0.0) throw ValidationError("radius_pulse requires a disk obstacle");
    return;
  }
  if (radius_pulse != 0.0) {
    if (shape.kind != ObstacleShape::Kind::disk)
      throw ValidationError("radius_pulse requires a disk obstacle");
    if (std::abs(radius_pulse) >= shape.r)
      throw ValidationError("radius_pulse must be smaller than the disk radius");
  }
  if (macro_modulation && shape.kind != ObstacleShape::Kind::rectangle)
    throw ValidationError("macro_modulation scales the rectangle half width; shape must be a rectangle");
  if (keyframes.empty()) throw ValidationError("motion program needs keyframes (or an empty shape)");
  if (keyframes.front().s != 0.0 || keyframes.back().s != 1.0)
    throw ValidationError("keyframes must start at s=0 and end at s=1");
  for (size_t i = 1; i < keyframes.size(); ++i)
    if (!(keyframes[i].s > keyframes[i - 1].s))
      throw ValidationError("keyframe fast times must be strictly increasing");
  const Keyframe& k0 = keyframes.front();
  const Keyframe& k1 = keyframes.back();
  if ((k1.center - k0.center).norm() > 1e-12 ||
      std::abs(wrap_angle_difference(k1.angle, k0.angle)) > 1e-12)
    throw ValidationError("motion program is not S-periodic: placement(0) != placement(1)");

  // invariant sweep: the closed obstacle keeps its clearance for all s
  const int per_leg = 64;
  for (size_t i = 0; i + 1 < keyframes.size(); ++i) {
    for (int j = 0; j <= per_leg; ++j) {
      const double s = keyframes[i].s +
                       (keyframes[i + 1].s - keyframes[i].s) * (double(j) / per_leg);
      obstacle_at(*this, 0.0, Vec2{0.5, 0.5}, s);
    }
  }
}

Placement MotionProgram::placement(double t, const Vec2& x, double s) const {
  Placement pl;
  if (keyframes.empty()) return pl;
  auto it = std::upper_bound(keyframes.begin(), keyframes.end(), s,
                             [](double v, const Keyframe& k) { return v < k.s; });
  if (it == keyframes.begin()) {
    pl.center = keyframes.front().center;
    pl.angle = keyframes.front().angle;
  } else if (it == keyframes.end()) {
    pl.center = keyframes.back().center;
    pl.angle = keyframes.back().angle;
  } else {
    const Keyframe& lo = *(it - 1);
    const Keyframe& hi = *it;
    const double w = (s - lo.s) / (hi.s - lo.s);
    pl.center = lo.center + w * (hi.center - lo.center);
    pl.angle = lo.angle + w * (hi.angle - lo.angle);
  }
  if (radius_pulse != 0.0)
    pl.radius_scale = 1.0 + (radius_pulse / shape.r) * std::sin(2.0 * kPi * s);
  if (macro_modulation) pl.width_scale = macro_modulation(t, x);
  return pl;
}

void MotionProgram::placement_rate(double s, Vec2& center_dot, double& angle_dot,
                                   double& radius_scale_dot) const {
  center_dot = {0.0, 0.0};
  angle_dot = 0.0;
  radius_scale_dot = 0.0;
  if (!keyframes.empty()) {
    // right derivative; the final leg's slope is used at s=1
    size_t leg = keyframes.size() - 2;
    for (size_t i = 0; i + 1 < keyframes.size(); ++i) {
      if (s < keyframes[i + 1].s) {
        leg = i;
        break;
      }
    }
    const Keyframe& lo = keyframes[leg];
    const Keyframe& hi = keyframes[leg + 1];
    const double ds = hi.s - lo.s;
    center_dot = (hi.center - lo.center) * (1.0 / ds);
    angle_dot = (hi.angle - lo.angle) / ds;
  }
  if (radius_pulse != 0.0)
    radius_scale_dot = (radius_pulse / shape.r) * 2.0 * kPi * std::cos(2.0 * kPi * s);
}

MotionProgram MotionProgram::paper_example(double a, double b) {
  MotionProgram p;
  p.shape = ObstacleShape::rectangle(a, b);
  p.keyframes = {
      {0.00, {0.25, 0.5}, 0.0},
      {0.25, {0.75, 0.5}, 0.0},
      {0.50, {0.75, 0.5}, kPi / 2.0},
      {0.75, {0.25, 0.5}, kPi / 2.0},
      {1.00, {0.25, 0.5}, 0.0},
  };
  return p;
}

MotionProgram MotionProgram::back_and_forth(double a, double b, double dist) {
  MotionProgram p;
  p.shape = ObstacleShape::rectangle(a, b);
  const Vec2 c0{0.5 - dist / 2.0, 0.5};
  const Vec2 c1{0.5 + dist / 2.0, 0.5};
  p.keyframes = {{0.0, c0, 0.0}, {0.5, c1, 0.0}, {1.0, c0, 0.0}};
  return p;
}

MotionProgram MotionProgram::static_obstacle(ObstacleShape shape, Vec2 center, double angle) {
  MotionProgram p;
  p.shape = shape;
  p.keyframes = {{0.0, center, angle}, {1.0, center, angle}};
  return p;
}

CellGeometry obstacle_at(const MotionProgram& program, double t, const Vec2& x, double s,
                         double chord_tol) {
  if (!(s >= 0.0 && s <= 1.0)) throw InvalidSlice("fast time s must lie in [0,1]");
  CellGeometry geom;
  geom.shape = program.shape;
  geom.t = t;
  geom.x = x;
  geom.s = s;
  if (program.empty()) return geom;

  geom.placement = program.placement(t, x, s);
  geom.obstacle = polygonize(program.shape, geom.placement, chord_tol);
  geom.porosity = 1.0 + polygon_area_signed(geom.obstacle);  // clockwise polygon: negative area

  const double delta = program.clearance;
  for (const Vec2& v : geom.obstacle) {
    if (v.x < delta || v.x > 1.0 - delta || v.y < delta || v.y > 1.0 - delta)
      throw ClearanceViolation("obstacle within clearance distance of the cell boundary");
  }
  if (!(geom.porosity > 0.0 && geom.porosity < 1.0))
    throw ClearanceViolation("degenerate porosity");
  return geom;
}

Vec2 boundary_velocity(const MotionProgram& program, double t, const Vec2& x, double s,
                       const Vec2& y, double tol) {
  if (!(s >= 0.0 && s <= 1.0)) throw InvalidSlice("fast time s must lie in [0,1]");
  if (program.empty()) throw PointNotOnInterface("empty program has no interface");
  const Placement pl = program.placement(t, x, s);

  // distance to the exact shape boundary
  double dist = 0.0;
  if (program.shape.kind == ObstacleShape::Kind::rectangle) {
    const Mat2 rot = Mat2::rotation(-pl.angle);
    const Vec2 local = rot.apply(y - pl.center);
    const double a = program.shape.a * pl.width_scale;
    const double b = program.shape.b;
    const double dx = std::abs(local.x) - a;
    const double dy = std::abs(local.y) - b;
    if (dx <= 0.0 && dy <= 0.0)
      dist = -std::max(dx, dy);  // inside: distance to the nearest side
    else
      dist = Vec2{std::max(dx, 0.0), std::max(dy, 0.0)}.norm();
  } else {
    dist = std::abs((y - pl.center).norm() - program.shape.r * pl.radius_scale);
  }
  if (dist > tol) throw PointNotOnInterface("point is not on the interface at this slice");

  Vec2 center_dot;
  double angle_dot = 0.0, radius_scale_dot = 0.0;
  program.placement_rate(s, center_dot, angle_dot, radius_scale_dot);
  const Vec2 rel = y - pl.center;
  Vec2 v = center_dot + angle_dot * rel.perp();
  if (radius_scale_dot != 0.0) v += (radius_scale_dot / pl.radius_scale) * rel;
  return v;
}

double porosity_rate(const MotionProgram& program, double t, const Vec2& x, double s,
                     double chord_tol) {
  if (program.empty()) return 0.0;
  if (program.radius_pulse == 0.0) return 0.0;  // rigid motions preserve area
  // breathing disk: area of the regular n-gon scales with radius^2
  const Placement pl = program.placement(t, x, s);
  Vec2 cd;
  double ad = 0.0, rd = 0.0;
  program.placement_rate(s, cd, ad, rd);
  const int n = disk_segment_count(program.shape.r,
                                   program.shape.boundary_hint > 0.0
                                       ? std::min(chord_tol, program.shape.boundary_hint)
                                       : chord_tol);
  const double r = program.shape.r;
  const double area = 0.5 * n * std::sin(2.0 * kPi / n) * (r * pl.radius_scale) * (r * pl.radius_scale);
  return -2.0 * area * rd / pl.radius_scale;
}

}  // namespace pulshom
