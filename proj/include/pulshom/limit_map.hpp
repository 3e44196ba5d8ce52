#pragma once

#include <memory>

#include "pulshom/motion.hpp"

namespace pulshom {

// Pointwise data of the limit diffeomorphism at one (s,y).
struct MapPoint {
  Vec2 psi;        // psi_0(s,y)
  Mat2 jacobian;   // Psi_0 = d psi_0 / dy
  double det;      // J_0
  Mat2 adjugate;   // A_0
  Vec2 s_velocity; // d psi_0 / ds (right derivative at keyframe corners)
};

enum class BlendKind {
  // displacement d(s,y) = chi(dist(y, obstacle(0))) * (rigid_s(y) - y) with a
  // C^2 cutoff chi; covers every program but degenerates for large motions
  radial,
  // composition of an angular twist about the initial centre with coordinate
  // shears for the translation part; det(Psi_0) == 1 exactly, valid for any
  // amplitude, but the displacement is only Y-periodic (a torus map), so it
  // serves the cell-problem path only, never the epsilon-domain construction
  volume_preserving,
};

struct LimitMapOptions {
  BlendKind blend = BlendKind::radial;
  double rho_blend = 0.15;  // cutoff reach beyond the obstacle (radial)
  double c_jacobian = 0.1;  // lower bound enforced on sampled J_0
  int check_samples = 96;   // sample grid resolution for the J_0 >= c_J check
};

// The limit diffeomorphism psi_0(t,x,s,.) for one macro point, built from a
// motion program.  Construction verifies J_0 >= c_J on a sample grid and
// throws DegenerateMap otherwise.
class LimitMap {
 public:
  LimitMap(const MotionProgram& program, double t, const Vec2& x, LimitMapOptions opt = {});

  MapPoint evaluate(double s, const Vec2& y) const;
  Vec2 displacement(double s, const Vec2& y) const { return evaluate(s, y).psi - y; }
  bool is_identity() const { return identity_; }
  const LimitMapOptions& options() const { return opt_; }
  double min_sampled_jacobian() const { return min_jacobian_; }

  // max over sample points of |div(row_i(A_0))| estimated with central
  // differences at step h (Piola identity check)
  double piola_defect(double s, double h) const;

 private:
  MapPoint evaluate_radial(double s, const Vec2& y) const;
  MapPoint evaluate_volume_preserving(double s, const Vec2& y) const;

  MotionProgram program_;
  double t_ = 0.0;
  Vec2 x_{0.5, 0.5};
  LimitMapOptions opt_;
  bool identity_ = false;
  double min_jacobian_ = 1.0;

  Polygon reference_obstacle_;  // placement at s=0
  Vec2 center0_{0.5, 0.5};
  double angle0_ = 0.0;
  double blend_r0_ = 0.0;  // circumscribed radius carrying the radial cutoff

  // volume-preserving blend geometry
  double twist_r_in_ = 0.0, twist_r_out_ = 0.0;
  double band_x_lo_ = 0.0, band_x_hi_ = 0.0, band_x_ramp_ = 0.0;  // shear in e1: band in y2
  double band_y_lo_ = 0.0, band_y_hi_ = 0.0, band_y_ramp_ = 0.0;  // shear in e2: band in y1
};

}  // namespace pulshom
