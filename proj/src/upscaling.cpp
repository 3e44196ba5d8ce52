#include "pulshom/upscaling.hpp"

#include <cmath>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pulshom {

double EffectiveCoefficients::theta_average() const {
  if (theta_trace.empty()) return 1.0;
  double s = 0.0;
  for (double v : theta_trace) s += v;
  return s / double(theta_trace.size());
}

namespace {

Mat2 dstar_from_corrector_gradients(double D, double theta, const Vec2& g1, const Vec2& g2) {
  Mat2 d;
  d.a11 = D * (theta + g1.x);
  d.a21 = D * g1.y;
  d.a12 = D * g2.x;
  d.a22 = D * (theta + g2.y);
  return d;
}

}  // namespace

SliceCoefficients compute_slice(const MotionProgram& program, double t, const Vec2& x, double s,
                                const UpscaleOptions& opt) {
  const CellGeometry geom = obstacle_at(program, t, x, s, opt.chord_tol());
  SliceCoefficients out;
  out.t = t;
  out.x = x;
  out.s = s;
  out.theta = geom.porosity;
  out.formulation = Formulation::moving_domain;
  if (geom.empty()) {
    out.dstar = Mat2::identity() * opt.diffusivity;
    return out;
  }

  const CellSlice slice = CellSlice::build(geom, opt.h, opt.diffusivity, opt.mesh);
  const Field z1 = solve_corrector_dir(slice, 1, opt.cell);
  const Field z2 = solve_corrector_dir(slice, 2, opt.cell);
  out.dstar = dstar_from_corrector_gradients(opt.diffusivity, geom.porosity,
                                             gradient_integral(z1), gradient_integral(z2));

  const double ds_theta = porosity_rate(program, t, x, s, opt.chord_tol());
  auto v_gamma = [&](const Vec2& p) { return boundary_velocity(program, t, x, s, p, opt.h); };
  const Field z0 = solve_corrector_pulse(slice, v_gamma, ds_theta, opt.cell);
  out.vstar = -opt.diffusivity * gradient_integral(z0);
  return out;
}

SliceCoefficients compute_slice_transformed(const CellSlice& reference, const LimitMap& map,
                                            double t, const Vec2& x, double s,
                                            const UpscaleOptions& opt) {
  SliceCoefficients out;
  out.t = t;
  out.x = x;
  out.s = s;
  out.formulation = Formulation::transformed;
  const double D = reference.diffusivity;

  auto coeff = [&](int, const Vec2& y) {
    const MapPoint mp = map.evaluate(s, y);
    return (mp.adjugate * mp.adjugate.transposed()) * (D / mp.det);
  };

  // Theta = int J_0 dy over the reference pore
  const PerforatedMesh& mesh = *reference.mesh;
  double theta = 0.0;
  Mat2 coeff_integral{0, 0, 0, 0};
  for (int tr = 0; tr < mesh.triangle_count(); ++tr) {
    const auto& tri = mesh.triangles[tr];
    const Vec2& a = mesh.vertices[tri[0]];
    const Vec2& b = mesh.vertices[tri[1]];
    const Vec2& c = mesh.vertices[tri[2]];
    const double area = 0.5 * (b - a).cross(c - a);
    const Vec2 quads[3] = {0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a)};
    for (const Vec2& q : quads) {
      theta += area / 3.0 * map.evaluate(s, q).det;
      coeff_integral = coeff_integral + coeff(0, q) * (area / 3.0);
    }
  }
  out.theta = theta;

  const Field z1 = solve_corrector_dir_transformed(reference, map, s, 1, opt.cell);
  const Field z2 = solve_corrector_dir_transformed(reference, map, s, 2, opt.cell);
  const Vec2 g1 = gradient_integral_weighted(z1, coeff);
  const Vec2 g2 = gradient_integral_weighted(z2, coeff);
  out.dstar.a11 = coeff_integral.a11 + g1.x;
  out.dstar.a21 = coeff_integral.a21 + g1.y;
  out.dstar.a12 = coeff_integral.a12 + g2.x;
  out.dstar.a22 = coeff_integral.a22 + g2.y;

  const Field z0 = solve_corrector_pulse_transformed(reference, map, s, opt.cell);
  // V* = -int J_0 D Psi_0^{-T} grad zeta_0 = -D int A_0^T grad zeta_0
  out.vstar = -D * gradient_integral_weighted(z0, [&](int, const Vec2& y) {
    return map.evaluate(s, y).adjugate.transposed();
  });
  return out;
}

std::vector<SliceCoefficients> compute_slices(const MotionProgram& program, double t,
                                              const Vec2& x, const UpscaleOptions& opt) {
  if (opt.ns < 8) throw InsufficientSlices("fast-time quadrature needs at least 8 slices");
  std::vector<SliceCoefficients> out(opt.ns);
  std::vector<std::exception_ptr> errors(opt.ns);

  UpscaleOptions slice_opt = opt;
  if (opt.parallel_slices) slice_opt.cell.assembly = AssemblyMode::serial;

  if (opt.formulation == Formulation::transformed) {
    const CellGeometry ref_geom = obstacle_at(program, t, x, 0.0, opt.chord_tol());
    const CellSlice reference = ref_geom.empty()
                                    ? CellSlice::wrap(ref_geom, mesh_cell(ref_geom, opt.h), opt.diffusivity)
                                    : CellSlice::build(ref_geom, opt.h, opt.diffusivity, opt.mesh);
    const LimitMap map(program, t, x, opt.map);
#pragma omp parallel for schedule(dynamic) if (opt.parallel_slices)
    for (int k = 0; k < opt.ns; ++k) {
      try {
        out[k] = compute_slice_transformed(reference, map, t, x,
                                           UpscaleOptions::midpoint(k, opt.ns), slice_opt);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  } else {
#pragma omp parallel for schedule(dynamic) if (opt.parallel_slices)
    for (int k = 0; k < opt.ns; ++k) {
      try {
        out[k] = compute_slice(program, t, x, UpscaleOptions::midpoint(k, opt.ns), slice_opt);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

EffectiveCoefficients average_coefficients(const MotionProgram& program, double t, const Vec2& x,
                                           const std::vector<SliceCoefficients>& slices,
                                           const UpscaleOptions& opt) {
  if (int(slices.size()) < 8) throw InsufficientSlices("need at least 8 slices to average");
  EffectiveCoefficients eff;
  eff.t = t;
  eff.x = x;
  eff.ns = int(slices.size());
  const double ds = 1.0 / double(slices.size());

  Mat2 dhom{0, 0, 0, 0};
  Vec2 vhom{0, 0}, whom{0, 0};
  for (const SliceCoefficients& c : slices) {
    eff.theta_trace.push_back(c.theta);
    dhom = dhom + c.dstar * (ds / c.theta);
    vhom += (ds / c.theta) * c.vstar;
    if (program.macro_modulation) {
      const double dx = opt.dx_modulation;
      auto inv_theta = [&](const Vec2& xp) {
        return 1.0 / obstacle_at(program, t, xp, c.s, opt.chord_tol()).porosity;
      };
      const Vec2 grad_inv{(inv_theta({x.x + dx, x.y}) - inv_theta({x.x - dx, x.y})) / (2.0 * dx),
                          (inv_theta({x.x, x.y + dx}) - inv_theta({x.x, x.y - dx})) / (2.0 * dx)};
      whom -= ds * c.dstar.apply(grad_inv);
    }
  }
  eff.dhom = dhom;
  eff.vhom = vhom;
  eff.whom = whom;
  return eff;
}

void source_averages(const MotionProgram& program, double t, const Vec2& x, const Expression& f0,
                     const Expression& g0, const UpscaleOptions& opt, double& F, double& G) {
  F = 0.0;
  G = 0.0;
  const double ds = 1.0 / opt.ns;
  for (int k = 0; k < opt.ns; ++k) {
    const double s = UpscaleOptions::midpoint(k, opt.ns);
    const CellGeometry geom = obstacle_at(program, t, x, s, opt.chord_tol());
    Expression::Vars vars;
    vars.t = t;
    vars.s = s;
    vars.x = x;

    if (geom.empty()) {
      // full cell: bulk quadrature on a fixed lattice
      const int n = 24;
      double sum = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          vars.y = {(i + 0.5) / n, (j + 0.5) / n};
          sum += f0(vars) / (n * n);
        }
      F += ds * sum;
      continue;
    }

    // bulk term: midpoint quadrature over the slice mesh
    const PerforatedMesh mesh = mesh_cell(geom, opt.h, opt.mesh);
    double bulk = 0.0;
    for (int tr = 0; tr < mesh.triangle_count(); ++tr) {
      const auto& tri = mesh.triangles[tr];
      const Vec2 c = (mesh.vertices[tri[0]] + mesh.vertices[tri[1]] + mesh.vertices[tri[2]]) *
                     (1.0 / 3.0);
      vars.y = c;
      bulk += mesh.triangle_area(tr) * f0(vars);
    }
    F += ds * bulk;

    // interface term: line quadrature over the polygon
    double line = 0.0;
    const Polygon& poly = geom.obstacle;
    for (size_t i = 0; i < poly.size(); ++i) {
      const Vec2& a = poly[i];
      const Vec2& b = poly[(i + 1) % poly.size()];
      const double len = (b - a).norm();
      const double off = 0.5 / std::sqrt(3.0);
      vars.y = a + (0.5 - off) * (b - a);
      line += 0.5 * len * g0(vars);
      vars.y = a + (0.5 + off) * (b - a);
      line += 0.5 * len * g0(vars);
    }
    G += ds * line;
  }
}

LambdaPair lambda_comparison(const MotionProgram& program, double t, const Vec2& x,
                             const UpscaleOptions& opt) {
  if (program.shape.kind != ObstacleShape::Kind::rectangle)
    throw ValidationError("lambda comparison expects the rotating-rectangle program");
  const int per_leg = opt.ns / 4;
  if (per_leg < 1) throw InsufficientSlices("need ns >= 4 for the leg comparison");
  const bool square = std::abs(program.shape.a - program.shape.b) < 1e-14;

  LambdaPair lam;
  for (int k = 0; k < per_leg; ++k) {
    const double s1 = UpscaleOptions::midpoint(k, opt.ns);
    const double s3 = s1 + 0.5;

    const CellGeometry g1 = obstacle_at(program, t, x, s1, opt.chord_tol());
    const CellSlice slice1 = CellSlice::build(g1, opt.h, opt.diffusivity, opt.mesh);
    auto v1 = [&](const Vec2& p) { return boundary_velocity(program, t, x, s1, p, opt.h); };
    const Field z1 = solve_corrector_pulse(slice1, v1, 0.0, opt.cell);
    lam.lambda1 += (-opt.diffusivity * gradient_integral(z1)).x / per_leg;

    const CellGeometry g3 = obstacle_at(program, t, x, s3, opt.chord_tol());
    // for the square control the third leg is the exact mirror image of the
    // first; reusing the mirrored mesh cancels the discretisation error
    const CellSlice slice3 = square ? CellSlice::wrap(g3, slice1.mesh->mirrored_x(), opt.diffusivity)
                                    : CellSlice::build(g3, opt.h, opt.diffusivity, opt.mesh);
    auto v3 = [&](const Vec2& p) { return boundary_velocity(program, t, x, s3, p, opt.h); };
    const Field z3 = solve_corrector_pulse(slice3, v3, 0.0, opt.cell);
    lam.lambda2 -= (-opt.diffusivity * gradient_integral(z3)).x / per_leg;
  }
  return lam;
}

bool voigt_bound_holds(const SliceCoefficients& c, double D, const Vec2& probe) {
  const double lhs = probe.dot(c.dstar.apply(probe));
  const double rhs = c.theta * D * probe.squared_norm();
  return lhs <= rhs * (1.0 + 1e-10) + 1e-14;
}

}  // namespace pulshom
