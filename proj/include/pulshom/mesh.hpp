#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pulshom/geometry.hpp"

namespace pulshom {

enum class BoundaryMarker : uint8_t {
  outer_periodic_x,  // edges on the faces x1 = 0 / x1 = 1 of the unit cell
  outer_periodic_y,  // edges on the faces x2 = 0 / x2 = 1
  interface,         // edges on the obstacle boundary Gamma
  outer_neumann,     // outer boundary of the macroscopic / epsilon domain
};

struct BoundaryEdge {
  int v0 = -1;  // directed: interface edges follow the clockwise obstacle
  int v1 = -1;  // polygon, so the pore-outward normal is the right normal
  BoundaryMarker marker = BoundaryMarker::interface;
};

// Conforming triangulation of the unit cell minus the obstacle (or of the
// macro / epsilon-scaled domain).  Triangles are counterclockwise.  Vertices
// on opposite periodic faces are listed in `periodic_pairs` (slave on the
// x1=1 / x2=1 face, master on the opposite face, differing by exactly the
// unit translation).
struct PerforatedMesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> boundary_edges;
  std::vector<std::pair<int, int>> periodic_pairs;
  double h = 0.0;

  int vertex_count() const { return int(vertices.size()); }
  int triangle_count() const { return int(triangles.size()); }
  double triangle_area(int t) const;
  double area() const;
  double min_angle_deg() const;
  double interface_length() const;

  // Conformity, orientation, quality and pairing audit; throws MeshFailure.
  void validate(double min_angle = 20.0) const;

  // Mirror image under x1 -> 1 - x1 (valid for unit-cell meshes only).
  PerforatedMesh mirrored_x() const;

  // Jacobi smoothing of interior vertices (boundary and interface pinned).
  void smooth_interior(int sweeps, double relax = 0.6);
};

struct MeshOptions {
  double min_angle_deg = 20.0;
  int max_refine_insertions = 20000;
  // polygon chord tolerance used when meshing disks; <=0 derives h/4
  double chord_tol = 0.0;
};

// Triangulation of Y* = Y minus the obstacle with periodically matching
// boundary vertices.  Picks a structured grid for the empty cell, a ring
// blend ("O-grid") for centred disks, a mirrored half mesh for geometries
// symmetric about x2 = 1/2, and constrained Delaunay refinement otherwise.
PerforatedMesh mesh_cell(const CellGeometry& geom, double h, const MeshOptions& opt = {});

// Structured mesh of the macroscopic domain (0,1)^2, outer_neumann markers.
PerforatedMesh mesh_macro(double h);

// The epsilon-scaled perforated domain: the s=0 cell mesh tiled (1/eps)^2
// times with merged duplicate vertices.  Requires 1/eps integer.  Global
// triangle t maps to cell t / T and cell-mesh triangle t % T, where T is the
// cell mesh triangle count; that recovers exact cell-local coordinates.
struct EpsilonMesh {
  PerforatedMesh mesh;
  double eps = 1.0;
  int cells_per_side = 1;
  PerforatedMesh cell_mesh;  // the unscaled generator

  int local_triangle(int t) const { return t % cell_mesh.triangle_count(); }
  int cell_of_triangle(int t) const { return t / cell_mesh.triangle_count(); }
};
EpsilonMesh mesh_epsilon_domain(const CellGeometry& reference_geom, double eps, double h_cell,
                                const MeshOptions& opt = {});

// Plain text export: vertex list, triangle list, marker list.
void write_mesh_text(const PerforatedMesh& mesh, const std::string& path);
// Legacy VTK unstructured grid with optional point data fields.
void write_vtk(const PerforatedMesh& mesh, const std::string& path,
               const std::vector<std::pair<std::string, std::vector<double>>>& point_data = {});

}  // namespace pulshom
