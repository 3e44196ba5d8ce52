#include "pulshom/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace pulshom {

double PerforatedMesh::triangle_area(int t) const {
  const auto& tr = triangles[t];
  const Vec2& a = vertices[tr[0]];
  const Vec2& b = vertices[tr[1]];
  const Vec2& c = vertices[tr[2]];
  return 0.5 * (b - a).cross(c - a);
}

double PerforatedMesh::area() const {
  double sum = 0.0;
  for (int t = 0; t < triangle_count(); ++t) sum += triangle_area(t);
  return sum;
}

double PerforatedMesh::min_angle_deg() const {
  double worst = 180.0;
  for (const auto& tr : triangles) {
    for (int i = 0; i < 3; ++i) {
      const Vec2 u = vertices[tr[(i + 1) % 3]] - vertices[tr[i]];
      const Vec2 v = vertices[tr[(i + 2) % 3]] - vertices[tr[i]];
      const double ang = std::atan2(std::abs(u.cross(v)), u.dot(v)) * 180.0 / kPi;
      worst = std::min(worst, ang);
    }
  }
  return worst;
}

double PerforatedMesh::interface_length() const {
  double len = 0.0;
  for (const BoundaryEdge& e : boundary_edges)
    if (e.marker == BoundaryMarker::interface) len += (vertices[e.v1] - vertices[e.v0]).norm();
  return len;
}

void PerforatedMesh::validate(double min_angle) const {
  std::map<std::pair<int, int>, int> edge_count;
  auto bump = [&](int a, int b) { edge_count[{std::min(a, b), std::max(a, b)}]++; };
  for (int t = 0; t < triangle_count(); ++t) {
    if (!(triangle_area(t) > 0.0)) throw MeshFailure("non-positive triangle area");
    const auto& tr = triangles[t];
    bump(tr[0], tr[1]);
    bump(tr[1], tr[2]);
    bump(tr[2], tr[0]);
  }
  for (const auto& [e, n] : edge_count)
    if (n > 2) throw MeshFailure("non-conforming edge shared by more than two triangles");
  for (const BoundaryEdge& e : boundary_edges) {
    auto it = edge_count.find({std::min(e.v0, e.v1), std::max(e.v0, e.v1)});
    if (it == edge_count.end()) throw MeshFailure("boundary edge missing from the triangulation");
    if (it->second != 1) throw MeshFailure("boundary edge shared by two triangles");
  }
  for (const auto& [slave, master] : periodic_pairs) {
    const Vec2 d = vertices[slave] - vertices[master];
    const bool unit_x = std::abs(d.x - 1.0) < 1e-12 && std::abs(d.y) < 1e-12;
    const bool unit_y = std::abs(d.y - 1.0) < 1e-12 && std::abs(d.x) < 1e-12;
    if (!unit_x && !unit_y) throw MeshFailure("periodic pair does not differ by a unit translation");
  }
  if (min_angle > 0.0 && min_angle_deg() < min_angle - 1e-9)
    throw MeshFailure("mesh quality below the minimum angle threshold");
}

void PerforatedMesh::smooth_interior(int sweeps, double relax) {
  std::vector<char> fixed(vertices.size(), 0);
  for (const BoundaryEdge& e : boundary_edges) fixed[e.v0] = fixed[e.v1] = 1;
  for (const auto& [s, m] : periodic_pairs) fixed[s] = fixed[m] = 1;
  std::vector<Vec2> sum(vertices.size());
  std::vector<int> count(vertices.size());
  const std::vector<Vec2> backup = vertices;
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    std::fill(sum.begin(), sum.end(), Vec2{0, 0});
    std::fill(count.begin(), count.end(), 0);
    for (const auto& tr : triangles) {
      for (int i = 0; i < 3; ++i) {
        sum[tr[i]] += vertices[tr[(i + 1) % 3]] + vertices[tr[(i + 2) % 3]];
        count[tr[i]] += 2;
      }
    }
    for (size_t v = 0; v < vertices.size(); ++v) {
      if (fixed[v] || count[v] == 0) continue;
      const Vec2 target = sum[v] * (1.0 / count[v]);
      vertices[v] += relax * (target - vertices[v]);
    }
  }
  for (int t = 0; t < triangle_count(); ++t) {
    if (triangle_area(t) <= 0.0) {
      vertices = backup;  // smoothing folded an element; keep the original
      return;
    }
  }
}

PerforatedMesh PerforatedMesh::mirrored_x() const {
  PerforatedMesh m;
  m.h = h;
  m.vertices.reserve(vertices.size());
  for (const Vec2& v : vertices) m.vertices.push_back({1.0 - v.x, v.y});
  m.triangles.reserve(triangles.size());
  for (const auto& tr : triangles) m.triangles.push_back({tr[0], tr[2], tr[1]});
  m.boundary_edges.reserve(boundary_edges.size());
  for (const BoundaryEdge& e : boundary_edges) m.boundary_edges.push_back({e.v1, e.v0, e.marker});
  m.periodic_pairs.reserve(periodic_pairs.size());
  for (const auto& [slave, master] : periodic_pairs) {
    const Vec2 d = vertices[slave] - vertices[master];
    if (std::abs(d.x - 1.0) < 1e-12)
      m.periodic_pairs.push_back({master, slave});  // x roles swap under mirroring
    else
      m.periodic_pairs.push_back({slave, master});
  }
  return m;
}

}  // namespace pulshom
