#include "pulshom/limit_map.hpp"

#include <algorithm>
#include <cmath>

namespace pulshom {

namespace {

// C^2 quintic step: 0 at u<=0, 1 at u>=1, zero first/second derivative at the ends.
double smoothstep5(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}
double smoothstep5_d(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  return u * u * (30.0 + u * (-60.0 + 30.0 * u));
}

// plateau profile: 1 on [lo,hi], quintic ramps of width w on both sides
double band_profile(double v, double lo, double hi, double w) {
  if (v < lo) return smoothstep5((v - (lo - w)) / w);
  if (v > hi) return smoothstep5(((hi + w) - v) / w);
  return 1.0;
}
double band_profile_d(double v, double lo, double hi, double w) {
  if (v < lo) return smoothstep5_d((v - (lo - w)) / w) / w;
  if (v > hi) return -smoothstep5_d(((hi + w) - v) / w) / w;
  return 0.0;
}

bool placements_equal(const Keyframe& a, const Keyframe& b) {
  return (a.center - b.center).norm() < 1e-14 && std::abs(a.angle - b.angle) < 1e-14;
}

}  // namespace

LimitMap::LimitMap(const MotionProgram& program, double t, const Vec2& x, LimitMapOptions opt)
    : program_(program), t_(t), x_(x), opt_(opt) {
  if (program_.empty()) {
    identity_ = true;
    return;
  }
  program_.validate();
  bool still = program_.radius_pulse == 0.0;
  for (const Keyframe& k : program_.keyframes)
    still = still && placements_equal(k, program_.keyframes.front());
  if (still) {
    identity_ = true;
    return;
  }

  center0_ = program_.keyframes.front().center;
  angle0_ = program_.keyframes.front().angle;
  reference_obstacle_ = obstacle_at(program_, t_, x_, 0.0).obstacle;

  if (opt_.blend == BlendKind::radial) {
    // blend radius: the cutoff rides on the distance to the circumscribed
    // disk of the reference obstacle, which keeps the map C^2 everywhere
    for (const Vec2& v : reference_obstacle_)
      blend_r0_ = std::max(blend_r0_, (v - center0_).norm());
    // the displacement must vanish before the cell boundary so that the
    // periodic extension is trivial and the epsilon-map stays continuous
    const double margin = std::min({center0_.x, 1.0 - center0_.x, center0_.y, 1.0 - center0_.y});
    if (margin < blend_r0_ + opt_.rho_blend)
      throw DegenerateMap("radial blend reaches the cell boundary; reduce rho_blend or move the obstacle");
  } else {
    if (program_.radius_pulse != 0.0)
      throw DegenerateMap("volume-preserving blend cannot represent a breathing disk");
    double r_obs = 0.0;
    for (const Vec2& v : reference_obstacle_)
      r_obs = std::max(r_obs, (v - center0_).norm());

    bool has_rotation = false;
    double d1_min = 0.0, d1_max = 0.0, d2_min = 0.0, d2_max = 0.0;
    for (const Keyframe& k : program_.keyframes) {
      has_rotation = has_rotation || std::abs(k.angle - angle0_) > 1e-14;
      d1_min = std::min(d1_min, k.center.x - center0_.x);
      d1_max = std::max(d1_max, k.center.x - center0_.x);
      d2_min = std::min(d2_min, k.center.y - center0_.y);
      d2_max = std::max(d2_max, k.center.y - center0_.y);
    }
    const double pad = 0.01;
    if (has_rotation) {
      twist_r_in_ = r_obs + pad;
      const double room = std::min({center0_.x, 1.0 - center0_.x, center0_.y, 1.0 - center0_.y});
      twist_r_out_ = room - pad;
      if (twist_r_out_ <= twist_r_in_ + pad)
        throw DegenerateMap("no room for the twist annulus around the obstacle");
    }
    band_x_lo_ = center0_.y - r_obs - pad;
    band_x_hi_ = center0_.y + r_obs + pad;
    band_x_ramp_ = std::min(band_x_lo_, 1.0 - band_x_hi_) - pad;
    band_y_lo_ = center0_.x + d1_min - r_obs - pad;
    band_y_hi_ = center0_.x + d1_max + r_obs + pad;
    band_y_ramp_ = std::min(band_y_lo_, 1.0 - band_y_hi_) - pad;
    const bool needs_x = d1_min != 0.0 || d1_max != 0.0;
    const bool needs_y = d2_min != 0.0 || d2_max != 0.0;
    if ((needs_x && band_x_ramp_ <= 0.0) || (needs_y && band_y_ramp_ <= 0.0))
      throw DegenerateMap("no room for the shear ramps beside the obstacle path");
  }

  // J_0 >= c_J on a sample grid over Y and over the fast period
  const int n = opt_.check_samples;
  std::vector<double> s_samples;
  for (const Keyframe& k : program_.keyframes) s_samples.push_back(k.s);
  for (int i = 0; i < 16; ++i) s_samples.push_back((i + 0.5) / 16.0);
  for (double s : s_samples) {
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        const MapPoint mp = evaluate(s, {double(i) / n, double(j) / n});
        min_jacobian_ = std::min(min_jacobian_, mp.det);
      }
    }
  }
  if (min_jacobian_ < opt_.c_jacobian)
    throw DegenerateMap("sampled Jacobian determinant fell below c_J; shrink the motion amplitude or raise rho_blend");
}

MapPoint LimitMap::evaluate(double s, const Vec2& y) const {
  if (!(s >= 0.0 && s <= 1.0)) throw InvalidSlice("fast time s must lie in [0,1]");
  if (identity_) {
    MapPoint mp;
    mp.psi = y;
    mp.jacobian = Mat2::identity();
    mp.det = 1.0;
    mp.adjugate = Mat2::identity();
    mp.s_velocity = {0.0, 0.0};
    return mp;
  }
  MapPoint mp = opt_.blend == BlendKind::radial ? evaluate_radial(s, y)
                                                : evaluate_volume_preserving(s, y);
  mp.det = mp.jacobian.det();
  mp.adjugate = mp.jacobian.adjugate();
  return mp;
}

MapPoint LimitMap::evaluate_radial(double s, const Vec2& y) const {
  const Placement pl = program_.placement(t_, x_, s);
  const double scale = pl.radius_scale;
  const Mat2 rot = Mat2::rotation(pl.angle - angle0_);

  Vec2 cd;
  double ad = 0.0, rd = 0.0;
  program_.placement_rate(s, cd, ad, rd);

  const Vec2 rel = y - center0_;
  const Vec2 rigid = pl.center + scale * rot.apply(rel);
  const Vec2 rigid_rate = cd + ad * scale * Mat2::rotation_rate(pl.angle - angle0_).apply(rel) +
                          rd * rot.apply(rel);

  const double radius = rel.norm();
  const double dist = std::max(0.0, radius - blend_r0_);
  const double u = dist / opt_.rho_blend;
  const double chi = 1.0 - smoothstep5(u);

  MapPoint mp;
  mp.psi = y + chi * (rigid - y);
  mp.s_velocity = chi * rigid_rate;

  Mat2 jac = Mat2::identity() + (rot * scale - Mat2::identity()) * chi;
  if (dist > 0.0 && u < 1.0) {
    const double chi_d = -smoothstep5_d(u) / opt_.rho_blend;
    jac = jac + Mat2::outer(rigid - y, (chi_d / radius) * rel);
  }
  mp.jacobian = jac;
  return mp;
}

MapPoint LimitMap::evaluate_volume_preserving(double s, const Vec2& y) const {
  const Placement pl = program_.placement(t_, x_, s);
  Vec2 cd;
  double ad = 0.0, rd = 0.0;
  program_.placement_rate(s, cd, ad, rd);
  const double dtheta = pl.angle - angle0_;
  const Vec2 delta = pl.center - center0_;

  // twist about center0
  Vec2 z = y;
  Mat2 jac = Mat2::identity();
  Vec2 vel{0.0, 0.0};
  if (twist_r_out_ > 0.0) {
    const Vec2 rel = y - center0_;
    const double rho = rel.norm();
    double w = 1.0, w_d = 0.0;
    if (rho >= twist_r_in_) {
      const double u = (rho - twist_r_in_) / (twist_r_out_ - twist_r_in_);
      w = 1.0 - smoothstep5(u);
      w_d = -smoothstep5_d(u) / (twist_r_out_ - twist_r_in_);
    }
    const double alpha = dtheta * w;
    const Mat2 rot = Mat2::rotation(alpha);
    const Mat2 rot_rate = Mat2::rotation_rate(alpha);
    z = center0_ + rot.apply(rel);
    jac = rot;
    if (rho > 0.0 && w_d != 0.0)
      jac = jac + Mat2::outer(rot_rate.apply(rel), (dtheta * w_d / rho) * rel);
    vel = (ad * w) * rot_rate.apply(rel);
  }

  // shear along e1, amplitude delta.x, rigid on the y2-band of the obstacle
  if (band_x_ramp_ > 0.0) {
    const double g = band_profile(z.y, band_x_lo_, band_x_hi_, band_x_ramp_);
    const double g_d = band_profile_d(z.y, band_x_lo_, band_x_hi_, band_x_ramp_);
    const Mat2 shear{1.0, delta.x * g_d, 0.0, 1.0};
    vel = shear.apply(vel) + Vec2{cd.x * g, 0.0};
    jac = shear * jac;
    z.x += delta.x * g;
  }

  // shear along e2, rigid on the y1-band swept by the translated obstacle
  if (band_y_ramp_ > 0.0) {
    const double g = band_profile(z.x, band_y_lo_, band_y_hi_, band_y_ramp_);
    const double g_d = band_profile_d(z.x, band_y_lo_, band_y_hi_, band_y_ramp_);
    const Mat2 shear{1.0, 0.0, delta.y * g_d, 1.0};
    vel = shear.apply(vel) + Vec2{0.0, cd.y * g};
    jac = shear * jac;
    z.y += delta.y * g;
  }

  MapPoint mp;
  mp.psi = z;
  mp.jacobian = jac;
  mp.s_velocity = vel;
  return mp;
}

double LimitMap::piola_defect(double s, double h) const {
  const int n = 48;
  double worst = 0.0;
  for (int i = 1; i < n; ++i) {
    for (int j = 1; j < n; ++j) {
      const Vec2 y{double(i) / n, double(j) / n};
      if (y.x < h || y.x > 1.0 - h || y.y < h || y.y > 1.0 - h) continue;
      const Mat2 xp = evaluate(s, {y.x + h, y.y}).adjugate;
      const Mat2 xm = evaluate(s, {y.x - h, y.y}).adjugate;
      const Mat2 yp = evaluate(s, {y.x, y.y + h}).adjugate;
      const Mat2 ym = evaluate(s, {y.x, y.y - h}).adjugate;
      // the identity holds column-wise: A_0 e_j are divergence-free fields
      const double div1 = (xp.a11 - xm.a11) / (2.0 * h) + (yp.a21 - ym.a21) / (2.0 * h);
      const double div2 = (xp.a12 - xm.a12) / (2.0 * h) + (yp.a22 - ym.a22) / (2.0 * h);
      worst = std::max({worst, std::abs(div1), std::abs(div2)});
    }
  }
  return worst;
}

}  // namespace pulshom
