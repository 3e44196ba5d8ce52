#include <cmath>
#include <map>

#include "pulshom/mesh.hpp"

namespace pulshom {

EpsilonMesh mesh_epsilon_domain(const CellGeometry& reference_geom, double eps, double h_cell,
                                const MeshOptions& opt) {
  const double n_real = 1.0 / eps;
  const int n = int(std::llround(n_real));
  if (std::abs(n_real - n) > 1e-12 || n < 1)
    throw ValidationError("epsilon must be 1/n so the domain consists of entire cells");

  EpsilonMesh out;
  out.eps = eps;
  out.cells_per_side = n;
  out.cell_mesh = mesh_cell(reference_geom, h_cell, opt);
  const PerforatedMesh& cm = out.cell_mesh;

  // partner lookup across cell faces, from the periodic pairing
  std::map<int, int> slave_x, slave_y;  // master (x=0 / y=0) -> slave (x=1 / y=1)
  for (const auto& [slave, master] : cm.periodic_pairs) {
    const Vec2 d = cm.vertices[slave] - cm.vertices[master];
    if (std::abs(d.x - 1.0) < 1e-12)
      slave_x[master] = slave;
    else
      slave_y[master] = slave;
  }
  auto on_left = [&](int v) { return std::abs(cm.vertices[v].x) < 1e-12; };
  auto on_bottom = [&](int v) { return std::abs(cm.vertices[v].y) < 1e-12; };

  PerforatedMesh& m = out.mesh;
  m.h = h_cell * eps;
  std::vector<std::vector<int>> l2g(size_t(n) * n, std::vector<int>(cm.vertex_count(), -1));
  auto cell_index = [&](int i, int j) { return j * n + i; };

  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      auto& map = l2g[cell_index(i, j)];
      for (int v = 0; v < cm.vertex_count(); ++v) {
        if (i > 0 && on_left(v)) {
          map[v] = l2g[cell_index(i - 1, j)][slave_x.at(v)];
        } else if (j > 0 && on_bottom(v)) {
          map[v] = l2g[cell_index(i, j - 1)][slave_y.at(v)];
        } else {
          map[v] = int(m.vertices.size());
          m.vertices.push_back({eps * (i + cm.vertices[v].x), eps * (j + cm.vertices[v].y)});
        }
      }
      for (const auto& tr : cm.triangles)
        m.triangles.push_back({map[tr[0]], map[tr[1]], map[tr[2]]});
      for (const BoundaryEdge& e : cm.boundary_edges) {
        if (e.marker == BoundaryMarker::interface) {
          m.boundary_edges.push_back({map[e.v0], map[e.v1], BoundaryMarker::interface});
          continue;
        }
        // outer faces survive only on the hull of the tiling
        const Vec2& a = cm.vertices[e.v0];
        const Vec2& b = cm.vertices[e.v1];
        const bool left = a.x == 0.0 && b.x == 0.0 && i == 0;
        const bool right = a.x == 1.0 && b.x == 1.0 && i == n - 1;
        const bool bottom = a.y == 0.0 && b.y == 0.0 && j == 0;
        const bool top = a.y == 1.0 && b.y == 1.0 && j == n - 1;
        if (left || right || bottom || top)
          m.boundary_edges.push_back({map[e.v0], map[e.v1], BoundaryMarker::outer_neumann});
      }
    }
  }
  m.validate(0.0);  // pairing-free audit; quality was checked on the cell mesh
  return out;
}

}  // namespace pulshom
