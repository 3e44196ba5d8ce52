#include "pulshom/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace pulshom {

double polygon_area_signed(const Polygon& p) {
  double twice = 0.0;
  const size_t n = p.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& a = p[i];
    const Vec2& b = p[(i + 1) % n];
    twice += a.cross(b);
  }
  return 0.5 * twice;
}

double polygon_perimeter(const Polygon& p) {
  double len = 0.0;
  const size_t n = p.size();
  for (size_t i = 0; i < n; ++i) len += (p[(i + 1) % n] - p[i]).norm();
  return len;
}

bool point_in_polygon(const Polygon& p, const Vec2& q) {
  bool inside = false;
  const size_t n = p.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& vi = p[i];
    const Vec2& vj = p[j];
    if ((vi.y > q.y) != (vj.y > q.y)) {
      const double xc = vj.x + (q.y - vj.y) / (vi.y - vj.y) * (vi.x - vj.x);
      if (q.x < xc) inside = !inside;
    }
  }
  return inside;
}

static Vec2 closest_point_on_segment(const Vec2& a, const Vec2& b, const Vec2& q) {
  const Vec2 d = b - a;
  const double len2 = d.squared_norm();
  if (len2 == 0.0) return a;
  const double t = std::clamp((q - a).dot(d) / len2, 0.0, 1.0);
  return a + t * d;
}

Vec2 polygon_closest_point(const Polygon& p, const Vec2& q) {
  Vec2 best = p[0];
  double best_d2 = (q - best).squared_norm();
  const size_t n = p.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2 c = closest_point_on_segment(p[i], p[(i + 1) % n], q);
    const double d2 = (q - c).squared_norm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = c;
    }
  }
  return best;
}

double polygon_distance(const Polygon& p, const Vec2& q) {
  if (point_in_polygon(p, q)) return 0.0;
  return (q - polygon_closest_point(p, q)).norm();
}

ObstacleShape ObstacleShape::rectangle(double a, double b) {
  if (!(a > 0.0 && a < 0.5 && b > 0.0 && b < 0.5))
    throw ValidationError("rectangle obstacle requires 0 < a,b < 0.5");
  ObstacleShape s;
  s.kind = Kind::rectangle;
  s.a = a;
  s.b = b;
  return s;
}

ObstacleShape ObstacleShape::disk(double r) {
  if (!(r > 0.0 && r < 0.5)) throw ValidationError("disk obstacle requires 0 < r < 0.5");
  ObstacleShape s;
  s.kind = Kind::disk;
  s.r = r;
  return s;
}

double ObstacleShape::area(double width_scale) const {
  switch (kind) {
    case Kind::none: return 0.0;
    case Kind::rectangle: return 4.0 * (a * width_scale) * b;
    case Kind::disk: return kPi * r * r;
  }
  return 0.0;
}

Vec2 CellGeometry::interface_normal(const Vec2& a, const Vec2& b) {
  // Obstacle polygons are stored clockwise, so the obstacle interior lies on
  // the right of each directed edge: the pore-outward normal is the right
  // normal of the edge direction.
  const Vec2 t = b - a;
  const double len = t.norm();
  return {t.y / len, -t.x / len};
}

int disk_segment_count(double radius, double chord_tol) {
  // sagitta of a chord spanning angle 2*pi/n is r*(1 - cos(pi/n))
  int n = 16;
  while (radius * (1.0 - std::cos(kPi / n)) > chord_tol && n < 4096) n += 8;
  return n;
}

Polygon polygonize(const ObstacleShape& shape, const Placement& pl, double chord_tol) {
  Polygon poly;
  if (shape.kind == ObstacleShape::Kind::none) return poly;
  if (shape.kind == ObstacleShape::Kind::rectangle) {
    const double a = shape.a * pl.width_scale;
    const double b = shape.b;
    // clockwise in the shape frame
    const Vec2 local[4] = {{-a, -b}, {-a, b}, {a, b}, {a, -b}};
    const Mat2 rot = Mat2::rotation(pl.angle);
    for (const Vec2& v : local) poly.push_back(pl.center + rot.apply(v));
    return poly;
  }
  // disk: regular n-gon, clockwise; the segment count is derived from the
  // base radius so a breathing disk keeps one polygon family across s
  double tol = chord_tol;
  if (shape.boundary_hint > 0.0) tol = std::min(tol, shape.boundary_hint);
  const double r = shape.r * pl.radius_scale;
  const int n = disk_segment_count(shape.r, tol);
  poly.reserve(n);
  for (int k = 0; k < n; ++k) {
    // a disk is rotation invariant, so the placement angle is ignored and
    // every slice of a rotating disk uses the same polygon family
    const double phi = -2.0 * kPi * k / n;
    poly.push_back(pl.center + Vec2{r * std::cos(phi), r * std::sin(phi)});
  }
  return poly;
}

}  // namespace pulshom
