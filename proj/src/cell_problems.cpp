#include "pulshom/cell_problems.hpp"

#include <cmath>

namespace pulshom {

CellSlice CellSlice::build(const CellGeometry& geom, double h, double D,
                           const MeshOptions& mesh_opt) {
  CellSlice s;
  s.geom = geom;
  s.mesh = std::make_shared<PerforatedMesh>(mesh_cell(geom, h, mesh_opt));
  s.dofs = std::make_shared<DofMap>(*s.mesh, /*periodic=*/true, /*mean_zero=*/true);
  s.diffusivity = D;
  return s;
}

CellSlice CellSlice::wrap(const CellGeometry& geom, PerforatedMesh mesh, double D) {
  CellSlice s;
  s.geom = geom;
  s.mesh = std::make_shared<PerforatedMesh>(std::move(mesh));
  s.dofs = std::make_shared<DofMap>(*s.mesh, true, true);
  s.diffusivity = D;
  return s;
}

Field solve_corrector_dir(const CellSlice& slice, int j, const CellSolveOptions& opt) {
  const double D = slice.diffusivity;
  const Mat2 coeff = Mat2::identity() * D;
  const auto K = assemble_stiffness(*slice.dofs, [&](int, const Vec2&) { return coeff; },
                                    opt.assembly);
  const Vec2 ej = j == 1 ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
  Eigen::VectorXd rhs =
      -assemble_load_flux(*slice.dofs, [&](int, const Vec2&) { return D * ej; });
  Field zeta = solve_neumann_meanzero(*slice.dofs, K, std::move(rhs), opt.solve);
  zeta.t = slice.geom.t;
  zeta.s = slice.geom.s;
  return zeta;
}

double interface_flux(const PerforatedMesh& mesh, const std::function<Vec2(const Vec2&)>& v) {
  double flux = 0.0;
  const double off = 0.5 / std::sqrt(3.0);
  for (const BoundaryEdge& e : mesh.boundary_edges) {
    if (e.marker != BoundaryMarker::interface) continue;
    const Vec2& a = mesh.vertices[e.v0];
    const Vec2& b = mesh.vertices[e.v1];
    const Vec2 nu = CellGeometry::interface_normal(a, b);
    const double w = 0.5 * (b - a).norm();
    flux += w * v(a + (0.5 - off) * (b - a)).dot(nu);
    flux += w * v(a + (0.5 + off) * (b - a)).dot(nu);
  }
  return flux;
}

Field solve_corrector_pulse(const CellSlice& slice,
                            const std::function<Vec2(const Vec2&)>& v_gamma, double ds_theta,
                            const CellSolveOptions& opt) {
  const double flux = interface_flux(*slice.mesh, v_gamma);
  if (std::abs(ds_theta - flux) > opt.tol_compat * (1.0 + std::abs(ds_theta)))
    throw IncompatibleData("interface velocity flux does not match the porosity rate");

  const double D = slice.diffusivity;
  const Mat2 coeff = Mat2::identity() * D;
  const auto K = assemble_stiffness(*slice.dofs, [&](int, const Vec2&) { return coeff; },
                                    opt.assembly);
  const double theta = slice.geom.porosity;
  Eigen::VectorXd rhs = assemble_load_bulk(
      *slice.dofs, [&](int, const Vec2&) { return ds_theta / theta; });
  rhs += assemble_load_interface(*slice.dofs, [&](int, const Vec2& p) { return v_gamma(p); });
  Field zeta = solve_neumann_meanzero(*slice.dofs, K, std::move(rhs), opt.solve);
  zeta.t = slice.geom.t;
  zeta.s = slice.geom.s;
  return zeta;
}

namespace {

// A_0 D Psi_0^{-T} = D/J_0 * A_0 A_0^T, symmetric positive definite
Mat2 transformed_coeff(const MapPoint& mp, double D) {
  const Mat2& a = mp.adjugate;
  return (a * a.transposed()) * (D / mp.det);
}

}  // namespace

Field solve_corrector_dir_transformed(const CellSlice& reference, const LimitMap& map, double s,
                                      int j, const CellSolveOptions& opt) {
  const double D = reference.diffusivity;
  auto coeff = [&](int, const Vec2& y) { return transformed_coeff(map.evaluate(s, y), D); };
  const auto K = assemble_stiffness(*reference.dofs, coeff, opt.assembly);
  const Vec2 ej = j == 1 ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
  Eigen::VectorXd rhs = -assemble_load_flux(
      *reference.dofs, [&](int, const Vec2& y) { return coeff(0, y).apply(ej); });
  Field zeta = solve_neumann_meanzero(*reference.dofs, K, std::move(rhs), opt.solve);
  zeta.t = reference.geom.t;
  zeta.s = s;
  return zeta;
}

Field solve_corrector_pulse_transformed(const CellSlice& reference, const LimitMap& map, double s,
                                        const CellSolveOptions& opt) {
  const double D = reference.diffusivity;
  auto coeff = [&](int, const Vec2& y) { return transformed_coeff(map.evaluate(s, y), D); };
  const auto K = assemble_stiffness(*reference.dofs, coeff, opt.assembly);
  // weak form pairs A_0 ds_psi against the test gradient; no boundary term
  Eigen::VectorXd rhs = -assemble_load_flux(*reference.dofs, [&](int, const Vec2& y) {
    const MapPoint mp = map.evaluate(s, y);
    return mp.adjugate.apply(mp.s_velocity);
  });
  Field zeta = solve_neumann_meanzero(*reference.dofs, K, std::move(rhs), opt.solve);
  zeta.t = reference.geom.t;
  zeta.s = s;
  return zeta;
}

double stiffness_energy(const CellSlice& slice, const Field& f, const Field& g) {
  const PerforatedMesh& mesh = *slice.mesh;
  double sum = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tr = mesh.triangles[t];
    const Vec2& p0 = mesh.vertices[tr[0]];
    const Vec2& p1 = mesh.vertices[tr[1]];
    const Vec2& p2 = mesh.vertices[tr[2]];
    const double area = 0.5 * (p1 - p0).cross(p2 - p0);
    Vec2 gf{0, 0}, gg{0, 0};
    for (int i = 0; i < 3; ++i) {
      const Vec2& a = mesh.vertices[tr[(i + 1) % 3]];
      const Vec2& b = mesh.vertices[tr[(i + 2) % 3]];
      const Vec2 n = (b - a).perp();
      const Vec2 grad = n * (1.0 / n.dot(mesh.vertices[tr[i]] - a));
      gf += f.at_vertex(tr[i]) * grad;
      gg += g.at_vertex(tr[i]) * grad;
    }
    sum += slice.diffusivity * area * gf.dot(gg);
  }
  return sum;
}

}  // namespace pulshom
