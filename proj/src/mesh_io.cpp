#include <fstream>
#include <iomanip>

#include "pulshom/mesh.hpp"

namespace pulshom {

namespace {

const char* marker_name(BoundaryMarker m) {
  switch (m) {
    case BoundaryMarker::outer_periodic_x: return "outer_periodic_x";
    case BoundaryMarker::outer_periodic_y: return "outer_periodic_y";
    case BoundaryMarker::interface: return "interface";
    case BoundaryMarker::outer_neumann: return "outer_neumann";
  }
  return "?";
}

}  // namespace

void write_mesh_text(const PerforatedMesh& mesh, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot open mesh output file: " + path);
  f << std::setprecision(17);
  f << "vertices " << mesh.vertex_count() << "\n";
  for (const Vec2& v : mesh.vertices) f << v.x << " " << v.y << "\n";
  f << "triangles " << mesh.triangle_count() << "\n";
  for (const auto& t : mesh.triangles) f << t[0] << " " << t[1] << " " << t[2] << "\n";
  f << "boundary_edges " << mesh.boundary_edges.size() << "\n";
  for (const BoundaryEdge& e : mesh.boundary_edges)
    f << e.v0 << " " << e.v1 << " " << marker_name(e.marker) << "\n";
  f << "periodic_pairs " << mesh.periodic_pairs.size() << "\n";
  for (const auto& [s, m] : mesh.periodic_pairs) f << s << " " << m << "\n";
}

void write_vtk(const PerforatedMesh& mesh, const std::string& path,
               const std::vector<std::pair<std::string, std::vector<double>>>& point_data) {
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot open VTK output file: " + path);
  f << std::setprecision(12);
  f << "# vtk DataFile Version 3.0\n";
  f << "pulshom field\n";
  f << "ASCII\n";
  f << "DATASET UNSTRUCTURED_GRID\n";
  f << "POINTS " << mesh.vertex_count() << " double\n";
  for (const Vec2& v : mesh.vertices) f << v.x << " " << v.y << " 0\n";
  f << "CELLS " << mesh.triangle_count() << " " << 4 * mesh.triangle_count() << "\n";
  for (const auto& t : mesh.triangles) f << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
  f << "CELL_TYPES " << mesh.triangle_count() << "\n";
  for (int i = 0; i < mesh.triangle_count(); ++i) f << "5\n";
  if (!point_data.empty()) {
    f << "POINT_DATA " << mesh.vertex_count() << "\n";
    for (const auto& [name, values] : point_data) {
      f << "SCALARS " << name << " double 1\n";
      f << "LOOKUP_TABLE default\n";
      for (double v : values) f << v << "\n";
    }
  }
}

}  // namespace pulshom
