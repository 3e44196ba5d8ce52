#pragma once

#include <memory>

#include "pulshom/fem.hpp"
#include "pulshom/limit_map.hpp"

namespace pulshom {

// Geometry + mesh + dof bundle for one fast-time slice.
struct CellSlice {
  CellGeometry geom;
  std::shared_ptr<const PerforatedMesh> mesh;
  std::shared_ptr<const DofMap> dofs;
  double diffusivity = 1.0;

  static CellSlice build(const CellGeometry& geom, double h, double D,
                         const MeshOptions& mesh_opt = {});
  // wrap an externally built mesh (mirrored slices, shared reference meshes)
  static CellSlice wrap(const CellGeometry& geom, PerforatedMesh mesh, double D);
};

struct CellSolveOptions {
  SolveOptions solve;
  AssemblyMode assembly = AssemblyMode::parallel;
  double tol_compat = 1e-8;
};

enum class Formulation { moving_domain, transformed };

// Directional corrector on the moved pore: div(D (e_j + grad zeta_j)) = 0
// with no-flux on Gamma and periodic sides; mean-zero.
Field solve_corrector_dir(const CellSlice& slice, int j, const CellSolveOptions& opt = {});

// Pulsation corrector on the moved pore:
//   -div(D grad zeta_0) = dsTheta/Theta,  (D grad zeta_0 + v_Gamma).nu = 0 on Gamma.
Field solve_corrector_pulse(const CellSlice& slice,
                            const std::function<Vec2(const Vec2&)>& v_gamma, double ds_theta,
                            const CellSolveOptions& opt = {});

// Transformed correctors on the fixed reference pore, coefficients from the
// limit map at fast time s.
Field solve_corrector_dir_transformed(const CellSlice& reference, const LimitMap& map, double s,
                                      int j, const CellSolveOptions& opt = {});
Field solve_corrector_pulse_transformed(const CellSlice& reference, const LimitMap& map, double s,
                                        const CellSolveOptions& opt = {});

// All correctors of one slice with slice stamps; formulation tag records
// which path produced them.
struct CellSolution {
  Field zeta1, zeta2, zeta0;
  Formulation formulation = Formulation::moving_domain;
  double t = 0.0, s = 0.0;
  Vec2 x{0.5, 0.5};
};

// interface flux integral of a velocity sampler over the mesh interface
double interface_flux(const PerforatedMesh& mesh, const std::function<Vec2(const Vec2&)>& v);

// energy product int D grad(f) . grad(g) (moving-domain metric)
double stiffness_energy(const CellSlice& slice, const Field& f, const Field& g);

}  // namespace pulshom
