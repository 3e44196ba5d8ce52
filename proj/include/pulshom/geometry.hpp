#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "pulshom/common.hpp"

namespace pulshom {

// Closed polygon, vertices in traversal order, no repeated end vertex.
using Polygon = std::vector<Vec2>;

double polygon_area_signed(const Polygon& p);
double polygon_perimeter(const Polygon& p);
bool point_in_polygon(const Polygon& p, const Vec2& q);
// Distance from q to the polygon boundary; 0 if q lies inside.
double polygon_distance(const Polygon& p, const Vec2& q);
// Closest boundary point and outward-from-boundary direction helper.
Vec2 polygon_closest_point(const Polygon& p, const Vec2& q);

// Obstacle shape in its own frame, centred at the origin.
struct ObstacleShape {
  enum class Kind { none, rectangle, disk };
  Kind kind = Kind::none;
  double a = 0.0;  // rectangle half width
  double b = 0.0;  // rectangle half height
  double r = 0.0;  // disk radius
  // target arc length per interface segment used when polygonising disks;
  // <= 0 means "derive from the mesh size at meshing time"
  double boundary_hint = 0.0;

  static ObstacleShape none() { return {}; }
  static ObstacleShape rectangle(double a, double b);
  static ObstacleShape disk(double r);

  bool empty() const { return kind == Kind::none; }
  double area(double width_scale = 1.0) const;
};

// Rigid placement of the obstacle inside the cell: centre, angle and the
// shape scale factors used by macro modulation and the breathing disk.
struct Placement {
  Vec2 center{0.5, 0.5};
  double angle = 0.0;
  double width_scale = 1.0;   // scales the rectangle half width a
  double radius_scale = 1.0;  // scales the disk radius r
};

// One fast-time slice of the cell: pore region Y minus the obstacle polygon.
struct CellGeometry {
  ObstacleShape shape;
  Placement placement;
  double t = 0.0;
  Vec2 x{0.0, 0.0};
  double s = 0.0;
  // Obstacle polygon ordered clockwise, so the pore is traversed
  // counterclockwise around the hole.  Empty when there is no obstacle.
  Polygon obstacle;
  double porosity = 1.0;  // exact polygon complement area

  bool empty() const { return obstacle.empty(); }
  // Pore-outward unit normal on a directed interface edge (points into the
  // obstacle).
  static Vec2 interface_normal(const Vec2& a, const Vec2& b);
};

// Polygonise a shape under a placement.  Disks become regular n-gons with
// chord error <= chord_tol (resolution also respects shape.boundary_hint).
Polygon polygonize(const ObstacleShape& shape, const Placement& pl, double chord_tol);
int disk_segment_count(double radius, double chord_tol);

}  // namespace pulshom
