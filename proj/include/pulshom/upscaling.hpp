#pragma once

#include "pulshom/cell_problems.hpp"
#include "pulshom/expression.hpp"

namespace pulshom {

// Per-slice effective quantities at one (t,x,s).
struct SliceCoefficients {
  double t = 0.0;
  Vec2 x{0.5, 0.5};
  double s = 0.0;
  double theta = 1.0;
  Mat2 dstar = Mat2::identity();
  Vec2 vstar{0.0, 0.0};
  Formulation formulation = Formulation::moving_domain;
};

// Fast-time averages used by the macroscopic equation.
struct EffectiveCoefficients {
  double t = 0.0;
  Vec2 x{0.5, 0.5};
  Mat2 dhom = Mat2::identity();
  Vec2 whom{0.0, 0.0};
  Vec2 vhom{0.0, 0.0};
  double source_bulk = 0.0;       // F
  double source_interface = 0.0;  // G
  int ns = 0;
  std::vector<double> theta_trace;

  double theta_average() const;
};

struct UpscaleOptions {
  double h = 1.0 / 32;
  int ns = 16;
  double diffusivity = 1.0;
  Formulation formulation = Formulation::moving_domain;
  LimitMapOptions map;          // transformed path
  double dx_modulation = 1e-3;  // step of the grad_x(1/Theta) central difference
  MeshOptions mesh;
  CellSolveOptions cell;
  bool parallel_slices = true;

  double chord_tol() const { return h / 4.0; }
  static double midpoint(int k, int ns) { return (k + 0.5) / ns; }
};

// One moving-domain slice: mesh, correctors, coefficients.
SliceCoefficients compute_slice(const MotionProgram& program, double t, const Vec2& x, double s,
                                const UpscaleOptions& opt);
// One transformed slice on a shared reference mesh.
SliceCoefficients compute_slice_transformed(const CellSlice& reference, const LimitMap& map,
                                            double t, const Vec2& x, double s,
                                            const UpscaleOptions& opt);

// All ns midpoint slices, solved concurrently, collected by slice index.
std::vector<SliceCoefficients> compute_slices(const MotionProgram& program, double t,
                                              const Vec2& x, const UpscaleOptions& opt);

// Fast-time midpoint averages; W_hom from central differences of 1/Theta
// over the macro modulation (exactly zero without modulation).
EffectiveCoefficients average_coefficients(const MotionProgram& program, double t, const Vec2& x,
                                           const std::vector<SliceCoefficients>& slices,
                                           const UpscaleOptions& opt);

// F and G from config-supplied samplers f0(t,x,s,y), g0(t,x,s,y).
void source_averages(const MotionProgram& program, double t, const Vec2& x, const Expression& f0,
                     const Expression& g0, const UpscaleOptions& opt, double& F, double& G);

// The rotating-rectangle diagnostics: mean normal-flux magnitudes of the two
// translation legs (lambda1: first leg, long side transverse; lambda2: third
// leg after the quarter rotation).
struct LambdaPair {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};
LambdaPair lambda_comparison(const MotionProgram& program, double t, const Vec2& x,
                             const UpscaleOptions& opt);

// per-slice sanity bound x^T D* x <= Theta * D * |x|^2
bool voigt_bound_holds(const SliceCoefficients& c, double D, const Vec2& probe);

}  // namespace pulshom
