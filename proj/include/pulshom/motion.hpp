#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "pulshom/geometry.hpp"

namespace pulshom {

struct Keyframe {
  double s = 0.0;    // fast time in [0,1]
  Vec2 center{0.5, 0.5};
  double angle = 0.0;  // radians
};

// Keyframed rigid motion of one obstacle over the fast-time interval
// S = (0,1), with piecewise-linear interpolation of centre and angle.
// Optional extras: a breathing-disk radius pulse and a macroscopic
// modulation of the rectangle half width (both preserve S-periodicity).
struct MotionProgram {
  ObstacleShape shape;
  std::vector<Keyframe> keyframes;  // must start at s=0 and end at s=1
  double radius_pulse = 0.0;        // disks: r(s) = r + radius_pulse*sin(2*pi*s)
  std::function<double(double, const Vec2&)> macro_modulation;  // width scale lambda(t,x)
  double clearance = 0.02;          // minimal distance of the obstacle to the cell boundary

  bool empty() const { return shape.empty(); }
  void validate() const;

  // Rigid placement at fast time s, modulated at macro point (t,x).
  Placement placement(double t, const Vec2& x, double s) const;
  // Right derivative of centre/angle/radius-scale at fast time s.
  void placement_rate(double s, Vec2& center_dot, double& angle_dot, double& radius_scale_dot) const;

  // The rotating/translating rectangle example: half widths (a,b), centre
  // starting at (1/4,1/2), move right by 1/2, rotate by pi/2, move back,
  // rotate back, each over a quarter period.
  static MotionProgram paper_example(double a, double b);
  // Forward translation along e1 by `dist` on [0,1/2] undone on [1/2,1].
  static MotionProgram back_and_forth(double a, double b, double dist);
  static MotionProgram static_obstacle(ObstacleShape shape, Vec2 center, double angle = 0.0);
};

// Geometry slice Y*(t,x,s).  chord_tol controls disk polygonisation.
CellGeometry obstacle_at(const MotionProgram& program, double t, const Vec2& x, double s,
                         double chord_tol = 1e-3);

// Velocity of the interface point y_on_interface at slice (t,x,s).
Vec2 boundary_velocity(const MotionProgram& program, double t, const Vec2& x, double s,
                       const Vec2& y_on_interface, double tol = 1e-6);

// d/ds of the polygonised pore area (exact for the polygon family; rigid
// motions give exactly zero).
double porosity_rate(const MotionProgram& program, double t, const Vec2& x, double s,
                     double chord_tol = 1e-3);

}  // namespace pulshom
