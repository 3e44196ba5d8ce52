#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include "pulshom/delaunay.hpp"
#include "pulshom/mesh.hpp"

namespace pulshom {

namespace {

// ---------------------------------------------------------------------------
// structured criss-cross mesh of the unit square (no obstacle)

PerforatedMesh structured_square(double h, bool periodic) {
  PerforatedMesh m;
  m.h = h;
  const int n = std::max(2, int(std::ceil(1.0 / h)));
  auto grid_id = [&](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) m.vertices.push_back({double(i) / n, double(j) / n});
  const int centers0 = int(m.vertices.size());
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      m.vertices.push_back({(i + 0.5) / n, (j + 0.5) / n});
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int c = centers0 + j * n + i;
      const int v00 = grid_id(i, j), v10 = grid_id(i + 1, j);
      const int v11 = grid_id(i + 1, j + 1), v01 = grid_id(i, j + 1);
      m.triangles.push_back({v00, v10, c});
      m.triangles.push_back({v10, v11, c});
      m.triangles.push_back({v11, v01, c});
      m.triangles.push_back({v01, v00, c});
    }
  }
  const BoundaryMarker mx = periodic ? BoundaryMarker::outer_periodic_x : BoundaryMarker::outer_neumann;
  const BoundaryMarker my = periodic ? BoundaryMarker::outer_periodic_y : BoundaryMarker::outer_neumann;
  for (int k = 0; k < n; ++k) {
    m.boundary_edges.push_back({grid_id(k, 0), grid_id(k + 1, 0), my});
    m.boundary_edges.push_back({grid_id(k, n), grid_id(k + 1, n), my});
    m.boundary_edges.push_back({grid_id(0, k), grid_id(0, k + 1), mx});
    m.boundary_edges.push_back({grid_id(n, k), grid_id(n, k + 1), mx});
  }
  if (periodic) {
    for (int k = 0; k <= n; ++k) {
      m.periodic_pairs.push_back({grid_id(n, k), grid_id(0, k)});
      m.periodic_pairs.push_back({grid_id(k, n), grid_id(k, 0)});
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// ring-blend ("O-grid") mesh for a centred disk: exact polygon interface,
// graded rings blending to the square boundary, D4-symmetric connectivity

constexpr double kOgridWalkWeight = 0.5;  // 0: radial exits, 1: uniform walk

PerforatedMesh ogrid_disk(const CellGeometry& geom, double h) {
  const Vec2 c = geom.placement.center;
  const double r_poly = geom.shape.r * geom.placement.radius_scale;
  const int n_poly = int(geom.obstacle.size());

  // rays: one per polygon vertex plus enough subdivision for the faces
  int mult = std::max(1, int(std::ceil(4.0 / h / n_poly)));
  while ((n_poly * mult) % 8 != 0) ++mult;  // corner rays must exist
  const int m_rays = n_poly * mult;
  const double dtheta = 2.0 * kPi / m_rays;

  // interface ring: the obstacle polygon sampled at the ray angles
  std::vector<Vec2> ring0(m_rays), ring_sq(m_rays);
  for (int j = 0; j < m_rays; ++j) {
    if (j % mult == 0) {
      ring0[j] = geom.obstacle[j / mult];
    } else {
      const double phi = -dtheta * j;  // clockwise, polygon order
      const double mid = -(2.0 * kPi / n_poly) * (j / mult + 0.5);
      const double rho0 = r_poly * std::cos(kPi / n_poly) / std::cos(phi - mid);
      ring0[j] = c + rho0 * Vec2{std::cos(phi), std::sin(phi)};
    }
    // outer ring: blend of the ray exit point (keeps chords radial near the
    // disk) and the uniform square-perimeter walk, clockwise from (1, 1/2)
    const double phi = -dtheta * j;
    const Vec2 dir{std::cos(phi), std::sin(phi)};
    const Vec2 exit = c + (0.5 / std::max(std::abs(dir.x), std::abs(dir.y))) * dir;
    const double ell = 4.0 * j / m_rays;
    Vec2 walk;
    if (ell < 0.5)
      walk = {1.0, 0.5 - ell};
    else if (ell < 1.5)
      walk = {1.0 - (ell - 0.5), 0.0};
    else if (ell < 2.5)
      walk = {0.0, ell - 1.5};
    else if (ell < 3.5)
      walk = {ell - 2.5, 1.0};
    else
      walk = {1.0, 4.5 - ell};
    const double beta = kOgridWalkWeight;
    ring_sq[j] = (1.0 - beta) * exit + beta * walk;
    if (std::abs(ring_sq[j].x) < 1e-12) ring_sq[j].x = 0.0;
    if (std::abs(ring_sq[j].x - 1.0) < 1e-12) ring_sq[j].x = 1.0;
    if (std::abs(ring_sq[j].y) < 1e-12) ring_sq[j].y = 0.0;
    if (std::abs(ring_sq[j].y - 1.0) < 1e-12) ring_sq[j].y = 1.0;
  }

  // radial stations, graded so cells stay near-square close to the disk;
  // the diagonal rays reach farthest and set the step
  std::vector<double> u{0.0};
  const double reach = 0.5 * std::sqrt(2.0) - r_poly;
  while (u.back() < 1.0) {
    const double rho = r_poly + u.back() * reach;
    u.push_back(u.back() + std::min(h, 1.55 * rho * dtheta) / reach);
  }
  for (double& v : u) v /= u.back();
  const int n_rings = int(u.size());

  PerforatedMesh m;
  m.h = h;
  auto vid = [&](int ring, int ray) { return ring * m_rays + (ray % m_rays); };
  for (int k = 0; k < n_rings; ++k)
    for (int j = 0; j < m_rays; ++j)
      m.vertices.push_back(ring0[j] + u[k] * (ring_sq[j] - ring0[j]));
  const int centers0 = int(m.vertices.size());
  for (int k = 0; k + 1 < n_rings; ++k) {
    for (int j = 0; j < m_rays; ++j) {
      const Vec2 q = 0.25 * (m.vertices[vid(k, j)] + m.vertices[vid(k, j + 1)] +
                             m.vertices[vid(k + 1, j)] + m.vertices[vid(k + 1, j + 1)]);
      m.vertices.push_back(q);
      const int cc = centers0 + k * m_rays + j;
      m.triangles.push_back({vid(k, j), vid(k, j + 1), cc});
      m.triangles.push_back({vid(k, j + 1), vid(k + 1, j + 1), cc});
      m.triangles.push_back({vid(k + 1, j + 1), vid(k + 1, j), cc});
      m.triangles.push_back({vid(k + 1, j), vid(k, j), cc});
    }
  }

  for (int j = 0; j < m_rays; ++j)
    m.boundary_edges.push_back({vid(0, j), vid(0, j + 1), BoundaryMarker::interface});

  // outer ring: markers and periodic pairing by matching face coordinates
  std::map<double, int> face_lo_x, face_hi_x, face_lo_y, face_hi_y;
  const int last = n_rings - 1;
  for (int j = 0; j < m_rays; ++j) {
    const Vec2& p = m.vertices[vid(last, j)];
    const Vec2& q = m.vertices[vid(last, j + 1)];
    const bool on_y = (p.y == q.y) && (p.y == 0.0 || p.y == 1.0);
    m.boundary_edges.push_back({vid(last, j), vid(last, j + 1),
                                on_y ? BoundaryMarker::outer_periodic_y
                                     : BoundaryMarker::outer_periodic_x});
    if (p.x == 0.0) face_lo_x[p.y] = vid(last, j);
    if (p.x == 1.0) face_hi_x[p.y] = vid(last, j);
    if (p.y == 0.0) face_lo_y[p.x] = vid(last, j);
    if (p.y == 1.0) face_hi_y[p.x] = vid(last, j);
  }
  auto pair_faces = [&](std::map<double, int>& lo, std::map<double, int>& hi, bool along_y) {
    if (lo.size() != hi.size()) throw MeshFailure("O-grid faces do not match");
    auto itl = lo.begin();
    auto ith = hi.begin();
    for (; itl != lo.end(); ++itl, ++ith) {
      if (std::abs(itl->first - ith->first) > 1e-9)
        throw MeshFailure("O-grid face coordinates do not match");
      // snap the slave onto the master so pairs differ by an exact unit shift
      Vec2& slave = m.vertices[ith->second];
      const Vec2& master = m.vertices[itl->second];
      if (along_y)
        slave.x = master.x;
      else
        slave.y = master.y;
      m.periodic_pairs.push_back({ith->second, itl->second});
    }
  };
  pair_faces(face_lo_x, face_hi_x, false);
  pair_faces(face_lo_y, face_hi_y, true);
  return m;
}

// ---------------------------------------------------------------------------
// constrained Delaunay pipeline

struct Chain {
  std::vector<Vec2> pts;  // polyline, already subdivided
  BoundaryMarker marker = BoundaryMarker::interface;
  bool emit = true;   // seam chains of the half mesh are not boundary edges
  int face = -1;      // 0:y=0  1:x=1  2:y=1  3:x=0 (periodic splitting partners)
};

void subdivide_into(std::vector<Vec2>& out, const Vec2& a, const Vec2& b, double h) {
  const int n = std::max(1, int(std::ceil((b - a).norm() / h - 1e-12)));
  for (int k = 0; k < n; ++k) out.push_back(a + (double(k) / n) * (b - a));
}

struct CdtResult {
  PerforatedMesh mesh;
  std::vector<uint8_t> vertex_face;  // bitmask of faces 0..3 per final vertex
};

CdtResult cdt_mesh(const std::vector<Chain>& chains,
                   const std::function<bool(const Vec2&)>& keep, double h,
                   const MeshOptions& opt) {
  Delaunay dt;

  // deduplicate shared chain endpoints
  std::map<std::pair<double, double>, int> seen;
  auto add_point = [&](const Vec2& p) {
    auto it = seen.find({p.x, p.y});
    if (it != seen.end()) return it->second;
    const int id = dt.insert(p);
    seen[{p.x, p.y}] = id;
    return id;
  };

  struct Seg {
    int a, b;
    BoundaryMarker marker;
    bool emit;
    int face;
  };
  std::vector<Seg> segs;
  std::vector<std::vector<Vec2>> chain_polylines;
  for (const Chain& ch : chains) {
    std::vector<int> ids;
    ids.reserve(ch.pts.size());
    for (const Vec2& p : ch.pts) ids.push_back(add_point(p));
    for (size_t i = 0; i + 1 < ids.size(); ++i) {
      dt.add_constraint(ids[i], ids[i + 1]);
      segs.push_back({ids[i], ids[i + 1], ch.marker, ch.emit, ch.face});
    }
    chain_polylines.push_back(ch.pts);
  }
  // conforming recovery (rarely needed for our inputs)
  for (size_t i = 0; i < segs.size(); ++i) {
    if (dt.edge_exists(segs[i].a, segs[i].b)) continue;
    const Seg s = segs[i];
    const std::vector<int> path = dt.recover_constraint(s.a, s.b);
    segs[i] = {path[0], path[1], s.marker, s.emit, s.face};
    for (size_t k = 1; k + 1 < path.size(); ++k)
      segs.push_back({path[k], path[k + 1], s.marker, s.emit, s.face});
  }

  // interior lattice: staggered rows, kept away from all chains
  auto chain_distance = [&](const Vec2& p) {
    double best = 1e9;
    for (const auto& poly : chain_polylines) {
      for (size_t i = 0; i + 1 < poly.size(); ++i) {
        const Vec2 d = poly[i + 1] - poly[i];
        const double len2 = d.squared_norm();
        const double t = len2 > 0.0 ? std::clamp((p - poly[i]).dot(d) / len2, 0.0, 1.0) : 0.0;
        best = std::min(best, (p - (poly[i] + t * d)).norm());
      }
    }
    return best;
  };
  const double row = h * std::sqrt(3.0) / 2.0;
  const int jmax = int(std::floor(1.0 / row));
  for (int j = 1; j <= jmax; ++j) {
    const double y = j * row;
    if (y > 1.0 - 0.55 * h) continue;
    const double off = (j % 2 == 0) ? 0.0 : 0.5 * h;
    for (int i = 0;; ++i) {
      const double x = off + i * h;
      if (x > 1.0 - 1e-12) break;
      const Vec2 p{x, y};
      if (x < 1e-12) continue;
      if (!keep(p)) continue;
      if (chain_distance(p) < 0.62 * h) continue;
      dt.insert(p);
    }
  }

  // Ruppert-style refinement on the kept region
  auto tri_ok = [&](const Delaunay::Tri& tr) {
    for (int i = 0; i < 3; ++i)
      if (Delaunay::is_super_vertex(tr.v[i])) return true;  // ignored
    const Vec2& a = dt.points()[tr.v[0]];
    const Vec2& b = dt.points()[tr.v[1]];
    const Vec2& c = dt.points()[tr.v[2]];
    if (!keep((a + b + c) * (1.0 / 3.0))) return true;
    double min_ang = 180.0;
    const Vec2 v[3] = {a, b, c};
    for (int i = 0; i < 3; ++i) {
      const Vec2 u1 = v[(i + 1) % 3] - v[i];
      const Vec2 u2 = v[(i + 2) % 3] - v[i];
      min_ang = std::min(min_ang, std::atan2(std::abs(u1.cross(u2)), u1.dot(u2)) * 180.0 / kPi);
    }
    const double circ = (v[1] - v[0]).norm() * (v[2] - v[1]).norm() * (v[0] - v[2]).norm() /
                        (2.0 * std::abs((v[1] - v[0]).cross(v[2] - v[0])));
    return min_ang >= opt.min_angle_deg && circ <= 1.35 * h;
  };

  auto split_segment = [&](size_t seg_idx) {
    const Seg s = segs[seg_idx];
    const Vec2 mid = 0.5 * (dt.points()[s.a] + dt.points()[s.b]);
    const int pid = dt.insert_on_segment(s.a, s.b, mid);
    segs[seg_idx] = {s.a, pid, s.marker, s.emit, s.face};
    segs.push_back({pid, s.b, s.marker, s.emit, s.face});
    // keep the opposite periodic face in lockstep so pairing stays exact
    if (s.face >= 0 && s.marker != BoundaryMarker::outer_neumann) {
      const bool vertical = (s.face == 1 || s.face == 3);
      auto param = [&](int v) { return vertical ? dt.points()[v].y : dt.points()[v].x; };
      const double lo = std::min(param(s.a), param(s.b));
      const double hi = std::max(param(s.a), param(s.b));
      const int partner_face = (s.face + 2) % 4;
      for (size_t k = 0; k < segs.size(); ++k) {
        if (segs[k].face != partner_face) continue;
        const double plo = std::min(param(segs[k].a), param(segs[k].b));
        const double phi = std::abs(lo - plo) < 1e-12 ? std::max(param(segs[k].a), param(segs[k].b)) : -1.0;
        if (phi < 0.0 || std::abs(phi - hi) > 1e-12) continue;
        const Seg t = segs[k];
        const Vec2 pmid = 0.5 * (dt.points()[t.a] + dt.points()[t.b]);
        const int qid = dt.insert_on_segment(t.a, t.b, pmid);
        segs[k] = {t.a, qid, t.marker, t.emit, t.face};
        segs.push_back({qid, t.b, t.marker, t.emit, t.face});
        break;
      }
    }
  };

  int budget = opt.max_refine_insertions;
  bool dirty = true;
  while (dirty && budget > 0) {
    dirty = false;
    const int tri_count = int(dt.tris().size());
    for (int t = 0; t < tri_count && budget > 0; ++t) {
      if (!dt.tris()[t].alive || tri_ok(dt.tris()[t])) continue;
      const auto tr = dt.tris()[t];
      const Vec2 cc = circumcenter(dt.points()[tr.v[0]], dt.points()[tr.v[1]], dt.points()[tr.v[2]]);
      // encroachment: split the offended segment instead of inserting cc
      int enc = -1;
      double enc_d = 1e9;
      for (size_t k = 0; k < segs.size(); ++k) {
        const Vec2& a = dt.points()[segs[k].a];
        const Vec2& b = dt.points()[segs[k].b];
        const Vec2 mid = 0.5 * (a + b);
        const double rad = 0.5 * (b - a).norm();
        const double d = (cc - mid).norm();
        if (d < rad - 1e-12 && d < enc_d) {
          enc = int(k);
          enc_d = d;
        }
      }
      if (enc >= 0) {
        split_segment(size_t(enc));
      } else if (keep(cc)) {
        dt.insert(cc);
      } else {
        // circumcenter escaped the domain: split the longest constrained
        // edge of this triangle, if any
        int seg_of_tri = -1;
        double longest = 0.0;
        for (size_t k = 0; k < segs.size(); ++k) {
          for (int i = 0; i < 3; ++i) {
            const int a = tr.v[i], b = tr.v[(i + 1) % 3];
            if ((segs[k].a == a && segs[k].b == b) || (segs[k].a == b && segs[k].b == a)) {
              const double len = (dt.points()[a] - dt.points()[b]).norm();
              if (len > longest) {
                longest = len;
                seg_of_tri = int(k);
              }
            }
          }
        }
        if (seg_of_tri < 0) continue;  // leave it; final validate decides
        split_segment(size_t(seg_of_tri));
      }
      --budget;
      dirty = true;
    }
  }

  // emit
  CdtResult out;
  PerforatedMesh& m = out.mesh;
  m.h = h;
  std::vector<int> remap(dt.points().size(), -1);
  auto emit_vertex = [&](int v) {
    if (remap[v] < 0) {
      remap[v] = int(m.vertices.size());
      m.vertices.push_back(dt.points()[v]);
    }
    return remap[v];
  };
  for (const auto& tr : dt.tris()) {
    if (!tr.alive) continue;
    bool super = false;
    for (int i = 0; i < 3; ++i) super = super || Delaunay::is_super_vertex(tr.v[i]);
    if (super) continue;
    const Vec2 centroid = (dt.points()[tr.v[0]] + dt.points()[tr.v[1]] + dt.points()[tr.v[2]]) *
                          (1.0 / 3.0);
    if (!keep(centroid)) continue;
    m.triangles.push_back({emit_vertex(tr.v[0]), emit_vertex(tr.v[1]), emit_vertex(tr.v[2])});
  }
  out.vertex_face.assign(m.vertices.size(), 0);
  for (const Seg& s : segs) {
    if (remap[s.a] < 0 || remap[s.b] < 0) continue;
    if (s.emit) m.boundary_edges.push_back({remap[s.a], remap[s.b], s.marker});
    if (s.face >= 0) {
      out.vertex_face[remap[s.a]] |= uint8_t(1 << s.face);
      out.vertex_face[remap[s.b]] |= uint8_t(1 << s.face);
    }
  }
  return out;
}

// pair opposite faces by sorted parameter (exact equality by construction)
void build_pairs_from_faces(PerforatedMesh& m, const std::vector<uint8_t>& vertex_face) {
  auto face_list = [&](int face, bool vertical) {
    std::vector<std::pair<double, int>> lst;
    for (int v = 0; v < m.vertex_count(); ++v)
      if (vertex_face[v] & (1 << face))
        lst.push_back({vertical ? m.vertices[v].y : m.vertices[v].x, v});
    std::sort(lst.begin(), lst.end());
    return lst;
  };
  const auto bottom = face_list(0, false), top = face_list(2, false);
  const auto right = face_list(1, true), left = face_list(3, true);
  if (bottom.size() != top.size() || left.size() != right.size())
    throw MeshFailure("periodic faces have mismatched vertex counts");
  for (size_t k = 0; k < top.size(); ++k) {
    if (std::abs(top[k].first - bottom[k].first) > 1e-12)
      throw MeshFailure("periodic face parameters do not match");
    m.vertices[top[k].second].x = m.vertices[bottom[k].second].x;
    m.periodic_pairs.push_back({top[k].second, bottom[k].second});
  }
  for (size_t k = 0; k < right.size(); ++k) {
    if (std::abs(right[k].first - left[k].first) > 1e-12)
      throw MeshFailure("periodic face parameters do not match");
    m.vertices[right[k].second].y = m.vertices[left[k].second].y;
    m.periodic_pairs.push_back({right[k].second, left[k].second});
  }
}

std::vector<Chain> unit_square_chains(double h, bool periodic) {
  const BoundaryMarker mx = periodic ? BoundaryMarker::outer_periodic_x : BoundaryMarker::outer_neumann;
  const BoundaryMarker my = periodic ? BoundaryMarker::outer_periodic_y : BoundaryMarker::outer_neumann;
  const Vec2 c00{0, 0}, c10{1, 0}, c11{1, 1}, c01{0, 1};
  std::vector<Chain> chains(4);
  subdivide_into(chains[0].pts, c00, c10, h);
  chains[0].pts.push_back(c10);
  chains[0].marker = my;
  chains[0].face = 0;
  subdivide_into(chains[1].pts, c10, c11, h);
  chains[1].pts.push_back(c11);
  chains[1].marker = mx;
  chains[1].face = 1;
  subdivide_into(chains[2].pts, c11, c01, h);
  chains[2].pts.push_back(c01);
  chains[2].marker = my;
  chains[2].face = 2;
  subdivide_into(chains[3].pts, c01, c00, h);
  chains[3].pts.push_back(c00);
  chains[3].marker = mx;
  chains[3].face = 3;
  return chains;
}

Chain interface_chain(const Polygon& poly, double h) {
  Chain ch;
  ch.marker = BoundaryMarker::interface;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) subdivide_into(ch.pts, poly[i], poly[(i + 1) % n], h);
  ch.pts.push_back(poly[0]);  // close
  return ch;
}

PerforatedMesh cdt_full_cell(const CellGeometry& geom, double h, const MeshOptions& opt) {
  std::vector<Chain> chains = unit_square_chains(h, true);
  chains.push_back(interface_chain(geom.obstacle, h));
  const Polygon obstacle = geom.obstacle;
  auto keep = [obstacle](const Vec2& p) {
    if (p.x < 0.0 || p.x > 1.0 || p.y < 0.0 || p.y > 1.0) return false;
    return !point_in_polygon(obstacle, p);
  };
  CdtResult res = cdt_mesh(chains, keep, h, opt);
  build_pairs_from_faces(res.mesh, res.vertex_face);
  return res.mesh;
}

// clip the clockwise obstacle polygon to y <= 0.5 (Sutherland-Hodgman)
Polygon clip_lower_half(const Polygon& poly) {
  Polygon out;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    const bool ina = a.y <= 0.5 + 1e-15;
    const bool inb = b.y <= 0.5 + 1e-15;
    if (ina) out.push_back(a);
    if (ina != inb) {
      const double t = (0.5 - a.y) / (b.y - a.y);
      out.push_back({a.x + t * (b.x - a.x), 0.5});
    }
  }
  for (Vec2& v : out)
    if (std::abs(v.y - 0.5) < 1e-13) v.y = 0.5;
  return out;
}

PerforatedMesh cdt_half_mirrored(const CellGeometry& geom, double h, const MeshOptions& opt) {
  Polygon lower = clip_lower_half(geom.obstacle);
  // rotate so the lid edge (both ends on the seam) sits between back() and front()
  const size_t n = lower.size();
  size_t lid = n;
  for (size_t i = 0; i < n; ++i) {
    if (lower[i].y == 0.5 && lower[(i + 1) % n].y == 0.5) {
      lid = i;
      break;
    }
  }
  if (lid == n) throw MeshFailure("symmetric obstacle does not reach the symmetry line");
  std::rotate(lower.begin(), lower.begin() + (lid + 1) % n, lower.end());
  // now lower.front() and lower.back() are the seam intersections,
  // traversed from the larger x to the smaller x around the notch
  const double x_hi = lower.front().x;
  const double x_lo = lower.back().x;

  std::vector<Chain> chains;
  {
    Chain ch;  // bottom face
    subdivide_into(ch.pts, {0, 0}, {1, 0}, h);
    ch.pts.push_back({1, 0});
    ch.marker = BoundaryMarker::outer_periodic_y;
    ch.face = 0;
    chains.push_back(ch);
  }
  {
    Chain ch;  // right face, lower half
    subdivide_into(ch.pts, {1, 0}, {1, 0.5}, h);
    ch.pts.push_back({1, 0.5});
    ch.marker = BoundaryMarker::outer_periodic_x;
    ch.face = 1;
    chains.push_back(ch);
  }
  {
    Chain ch;  // seam, right piece
    subdivide_into(ch.pts, {1, 0.5}, {x_hi, 0.5}, h);
    ch.pts.push_back({x_hi, 0.5});
    ch.emit = false;
    chains.push_back(ch);
  }
  {
    Chain ch;  // notch: obstacle boundary inside the lower half
    for (size_t i = 0; i + 1 < lower.size(); ++i)
      subdivide_into(ch.pts, lower[i], lower[i + 1], h);
    ch.pts.push_back(lower.back());
    ch.marker = BoundaryMarker::interface;
    chains.push_back(ch);
  }
  {
    Chain ch;  // seam, left piece
    subdivide_into(ch.pts, {x_lo, 0.5}, {0, 0.5}, h);
    ch.pts.push_back({0, 0.5});
    ch.emit = false;
    chains.push_back(ch);
  }
  {
    Chain ch;  // left face, lower half
    subdivide_into(ch.pts, {0, 0.5}, {0, 0}, h);
    ch.pts.push_back({0, 0});
    ch.marker = BoundaryMarker::outer_periodic_x;
    ch.face = 3;
    chains.push_back(ch);
  }

  Polygon loop;
  for (const Chain& ch : chains)
    for (size_t i = 0; i + 1 < ch.pts.size(); ++i) loop.push_back(ch.pts[i]);
  auto keep = [loop](const Vec2& p) { return point_in_polygon(loop, p); };
  CdtResult res = cdt_mesh(chains, keep, h, opt);
  const PerforatedMesh& half = res.mesh;

  // mirror about y = 1/2 and merge along the seam
  PerforatedMesh m;
  m.h = h;
  m.vertices = half.vertices;
  std::vector<int> mirror(half.vertex_count());
  for (int v = 0; v < half.vertex_count(); ++v) {
    if (half.vertices[v].y == 0.5) {
      mirror[v] = v;
    } else {
      mirror[v] = int(m.vertices.size());
      m.vertices.push_back({half.vertices[v].x, 1.0 - half.vertices[v].y});
    }
  }
  m.triangles = half.triangles;
  for (const auto& tr : half.triangles)
    m.triangles.push_back({mirror[tr[0]], mirror[tr[2]], mirror[tr[1]]});
  m.boundary_edges = half.boundary_edges;
  for (const BoundaryEdge& e : half.boundary_edges)
    m.boundary_edges.push_back({mirror[e.v1], mirror[e.v0], e.marker});

  std::vector<uint8_t> face(m.vertex_count(), 0);
  for (int v = 0; v < half.vertex_count(); ++v) {
    const uint8_t bits = res.vertex_face[v];
    uint8_t mirrored_bits = bits & uint8_t(~1);  // bottom becomes top
    if (bits & 1) mirrored_bits |= uint8_t(1 << 2);
    face[v] |= bits;
    face[mirror[v]] |= mirrored_bits;
  }
  build_pairs_from_faces(m, face);
  return m;
}

bool symmetric_about_midline(const Polygon& poly) {
  for (const Vec2& v : poly) {
    bool found = false;
    for (const Vec2& w : poly)
      found = found || (std::abs(w.x - v.x) < 1e-12 && std::abs(w.y - (1.0 - v.y)) < 1e-12);
    if (!found) return false;
  }
  return true;
}

}  // namespace

PerforatedMesh mesh_cell(const CellGeometry& geom, double h, const MeshOptions& opt) {
  const double h_max = geom.empty() ? 0.5 : 0.25;
  if (!(h > 0.0 && h <= h_max)) throw ValidationError("mesh size out of range for mesh_cell");
  PerforatedMesh m;
  if (geom.empty()) {
    m = structured_square(h, true);
  } else if (geom.shape.kind == ObstacleShape::Kind::disk &&
             std::abs(geom.placement.center.x - 0.5) < 1e-12 &&
             std::abs(geom.placement.center.y - 0.5) < 1e-12) {
    m = ogrid_disk(geom, h);
  } else if (symmetric_about_midline(geom.obstacle)) {
    m = cdt_half_mirrored(geom, h, opt);
  } else {
    m = cdt_full_cell(geom, h, opt);
  }
  m.smooth_interior(4);
  m.validate(opt.min_angle_deg > 0 ? std::min(opt.min_angle_deg, 20.0) : 0.0);
  return m;
}

PerforatedMesh mesh_macro(double h) {
  PerforatedMesh m = structured_square(h, false);
  m.validate(20.0);
  return m;
}

}  // namespace pulshom
