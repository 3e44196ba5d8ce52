#include "pulshom/delaunay.hpp"

#include <algorithm>
#include <cmath>

namespace pulshom {

namespace {

std::pair<int, int> key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

}  // namespace

double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  const long double det = (long double)(b.x - a.x) * (long double)(c.y - a.y) -
                          (long double)(b.y - a.y) * (long double)(c.x - a.x);
  return double(det);
}

bool in_circumcircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& p) {
  const long double ax = a.x - p.x, ay = a.y - p.y;
  const long double bx = b.x - p.x, by = b.y - p.y;
  const long double cx = c.x - p.x, cy = c.y - p.y;
  const long double a2 = ax * ax + ay * ay;
  const long double b2 = bx * bx + by * by;
  const long double c2 = cx * cx + cy * cy;
  const long double det = ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx);
  // ties (cocircular points) count as outside, which keeps the current
  // diagonal and leaves a valid triangulation
  return det > 1e-24L;
}

Vec2 circumcenter(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double d = 2.0 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
  const double b2 = (b - a).squared_norm();
  const double c2 = (c - a).squared_norm();
  return {a.x + ((c.y - a.y) * b2 - (b.y - a.y) * c2) / d,
          a.y + ((b.x - a.x) * c2 - (c.x - a.x) * b2) / d};
}

Delaunay::Delaunay() {
  pts_ = {{-24.0, -24.0}, {48.0, -24.0}, {0.5, 48.0}};
  Tri t;
  t.v[0] = 0;
  t.v[1] = 1;
  t.v[2] = 2;
  t.nb[0] = t.nb[1] = t.nb[2] = -1;
  tris_.push_back(t);
}

int Delaunay::make_tri(int a, int b, int c, int na, int nb, int nc) {
  Tri t;
  t.v[0] = a;
  t.v[1] = b;
  t.v[2] = c;
  t.nb[0] = na;
  t.nb[1] = nb;
  t.nb[2] = nc;
  tris_.push_back(t);
  return int(tris_.size()) - 1;
}

void Delaunay::wire(int t, int side, int neighbour) {
  if (neighbour < 0) return;
  Tri& n = tris_[neighbour];
  const Tri& me = tris_[t];
  const int a = me.v[(side + 1) % 3];
  const int b = me.v[(side + 2) % 3];
  for (int i = 0; i < 3; ++i) {
    const int na = n.v[(i + 1) % 3];
    const int nbv = n.v[(i + 2) % 3];
    if ((na == a && nbv == b) || (na == b && nbv == a)) {
      n.nb[i] = t;
      return;
    }
  }
}

int Delaunay::locate(const Vec2& p) const {
  int t = last_tri_;
  if (t >= int(tris_.size()) || !tris_[t].alive) {
    t = -1;
    for (int i = int(tris_.size()) - 1; i >= 0; --i)
      if (tris_[i].alive) {
        t = i;
        break;
      }
  }
  for (int step = 0; step < int(tris_.size()) + 8; ++step) {
    const Tri& tr = tris_[t];
    int next = -1;
    for (int i = 0; i < 3; ++i) {
      const Vec2& a = pts_[tr.v[(i + 1) % 3]];
      const Vec2& b = pts_[tr.v[(i + 2) % 3]];
      if (orient2d(a, b, p) < -1e-15) {
        next = tr.nb[i];
        break;
      }
    }
    if (next < 0) return t;
    t = next;
  }
  // walk failed (numerically flat region): brute force
  for (int i = 0; i < int(tris_.size()); ++i) {
    if (!tris_[i].alive) continue;
    const Tri& tr = tris_[i];
    bool inside = true;
    for (int k = 0; k < 3; ++k)
      inside = inside && orient2d(pts_[tr.v[(k + 1) % 3]], pts_[tr.v[(k + 2) % 3]], p) >= -1e-12;
    if (inside) return i;
  }
  throw MeshFailure("point location failed");
}

int Delaunay::insert(const Vec2& p) {
  const int start = locate(p);
  const int pid = int(pts_.size());
  pts_.push_back(p);

  // grow the cavity: triangles whose circumcircle contains p, without
  // crossing constrained edges
  std::vector<int> cavity;
  std::vector<char> in_cavity(tris_.size(), 0);
  std::vector<int> stack{start};
  in_cavity[start] = 1;
  while (!stack.empty()) {
    const int t = stack.back();
    stack.pop_back();
    cavity.push_back(t);
    for (int i = 0; i < 3; ++i) {
      const int n = tris_[t].nb[i];
      if (n < 0 || in_cavity[n]) continue;
      const int a = tris_[t].v[(i + 1) % 3];
      const int b = tris_[t].v[(i + 2) % 3];
      if (is_constrained(a, b)) continue;
      const Tri& nt = tris_[n];
      if (in_circumcircle(pts_[nt.v[0]], pts_[nt.v[1]], pts_[nt.v[2]], p)) {
        in_cavity[n] = 1;
        stack.push_back(n);
      }
    }
  }

  // cavity boundary: directed edges (a,b) with outside neighbour
  struct Rim {
    int a, b, outside;
  };
  std::vector<Rim> rim;
  for (int t : cavity) {
    for (int i = 0; i < 3; ++i) {
      const int n = tris_[t].nb[i];
      if (n >= 0 && in_cavity[n]) continue;
      rim.push_back({tris_[t].v[(i + 1) % 3], tris_[t].v[(i + 2) % 3], n});
    }
  }
  for (int t : cavity) tris_[t].alive = false;

  // fan p to the rim
  std::vector<int> fresh;
  fresh.reserve(rim.size());
  for (const Rim& r : rim) {
    const int t = make_tri(pid, r.a, r.b, r.outside, -1, -1);
    wire(t, 0, r.outside);
    fresh.push_back(t);
  }
  // wire the fan internally: edge (p, r.a) of one triangle matches (p, r.b)
  // of the triangle whose rim ends at r.a
  for (size_t i = 0; i < fresh.size(); ++i) {
    for (size_t j = 0; j < fresh.size(); ++j) {
      if (i == j) continue;
      const Tri& ti = tris_[fresh[i]];
      const Tri& tj = tris_[fresh[j]];
      if (ti.v[1] == tj.v[2]) {
        tris_[fresh[i]].nb[2] = fresh[j];  // edge (p, v1) shared
        tris_[fresh[j]].nb[1] = fresh[i];
      }
    }
  }
  last_tri_ = fresh.empty() ? last_tri_ : fresh.back();
  if (fresh.empty()) throw MeshFailure("empty insertion cavity");
  return pid;
}

int Delaunay::insert_on_segment(int a, int b, const Vec2& p) {
  if (!is_constrained(a, b)) throw MeshFailure("segment split on a non-constrained edge");
  const int pid = int(pts_.size());
  pts_.push_back(p);

  // locate the one or two triangles sharing edge (a,b)
  std::vector<int> owners;
  for (int t = 0; t < int(tris_.size()); ++t) {
    if (!tris_[t].alive) continue;
    const Tri& tr = tris_[t];
    for (int i = 0; i < 3; ++i) {
      if ((tr.v[(i + 1) % 3] == a && tr.v[(i + 2) % 3] == b) ||
          (tr.v[(i + 1) % 3] == b && tr.v[(i + 2) % 3] == a)) {
        owners.push_back(t);
        break;
      }
    }
  }
  if (owners.empty()) throw MeshFailure("segment to split is not an edge");

  constraints_.erase(key(a, b));
  constraints_.insert(key(a, pid));
  constraints_.insert(key(pid, b));

  std::vector<std::pair<int, int>> to_legalize;
  for (int t : owners) {
    const Tri tr = tris_[t];
    int i = 0;
    for (; i < 3; ++i) {
      const int ea = tr.v[(i + 1) % 3];
      const int eb = tr.v[(i + 2) % 3];
      if ((ea == a && eb == b) || (ea == b && eb == a)) break;
    }
    const int apex = tr.v[i];
    const int va = tr.v[(i + 1) % 3];
    const int vb = tr.v[(i + 2) % 3];
    tris_[t].alive = false;
    // children keep the outer neighbours; the split edge sides pair with the
    // other owner's children through wire() below
    const int t1 = make_tri(pid, apex, vb, tr.nb[(i + 1) % 3], -1, -1);
    const int t2 = make_tri(pid, va, apex, tr.nb[(i + 2) % 3], -1, -1);
    wire(t1, 0, tr.nb[(i + 1) % 3]);
    wire(t2, 0, tr.nb[(i + 2) % 3]);
    tris_[t1].nb[2] = t2;
    tris_[t2].nb[1] = t1;
    to_legalize.push_back({t1, 0});
    to_legalize.push_back({t2, 0});
    (void)va;
    (void)vb;
  }
  // wire across the split segment between the two owner fans
  for (int t = int(tris_.size()) - int(owners.size()) * 2; t < int(tris_.size()); ++t) {
    for (int u = t + 1; u < int(tris_.size()); ++u) {
      const Tri& a1 = tris_[t];
      const Tri& a2 = tris_[u];
      for (int i = 0; i < 3; ++i) {
        if (a1.nb[i] >= 0) continue;
        const int e1 = a1.v[(i + 1) % 3], e2 = a1.v[(i + 2) % 3];
        for (int j = 0; j < 3; ++j) {
          if (a2.nb[j] >= 0) continue;
          const int f1 = a2.v[(j + 1) % 3], f2 = a2.v[(j + 2) % 3];
          if ((e1 == f1 && e2 == f2) || (e1 == f2 && e2 == f1)) {
            tris_[t].nb[i] = u;
            tris_[u].nb[j] = t;
          }
        }
      }
    }
  }
  for (auto [t, e] : to_legalize)
    if (tris_[t].alive) legalize(t, 0);
  last_tri_ = int(tris_.size()) - 1;
  return pid;
}

void Delaunay::legalize(int t, int edge) {
  if (!tris_[t].alive) return;
  const int n = tris_[t].nb[edge];
  if (n < 0) return;
  const int a = tris_[t].v[(edge + 1) % 3];
  const int b = tris_[t].v[(edge + 2) % 3];
  if (is_constrained(a, b)) return;
  const int p = tris_[t].v[edge];
  const Tri& nt = tris_[n];
  int nedge = -1;
  for (int i = 0; i < 3; ++i)
    if (nt.nb[i] == t) nedge = i;
  if (nedge < 0) return;
  const int q = nt.v[nedge];
  if (!in_circumcircle(pts_[tris_[t].v[0]], pts_[tris_[t].v[1]], pts_[tris_[t].v[2]], pts_[q]))
    return;
  // flip edge (a,b) -> (p,q)
  const int tn1 = tris_[t].nb[(edge + 2) % 3];   // neighbour across (p,a)
  const int nn1 = nt.nb[(nedge + 2) % 3];        // neighbour across (q,b)
  const int tn2 = tris_[t].nb[(edge + 1) % 3];   // neighbour across (p,b)... (b,p)
  const int nn2 = nt.nb[(nedge + 1) % 3];        // neighbour across (q,a)
  tris_[t].alive = false;
  tris_[n].alive = false;
  const int u1 = make_tri(p, a, q, nn2, -1, tn1);
  const int u2 = make_tri(p, q, b, nn1, tn2, -1);
  tris_[u1].nb[1] = u2;
  tris_[u2].nb[2] = u1;
  wire(u1, 0, nn2);
  wire(u1, 2, tn1);
  wire(u2, 0, nn1);
  wire(u2, 1, tn2);
  legalize(u1, 0);
  legalize(u2, 0);
}

void Delaunay::add_constraint(int a, int b) { constraints_.insert(key(a, b)); }

bool Delaunay::is_constrained(int a, int b) const { return constraints_.count(key(a, b)) > 0; }

bool Delaunay::edge_exists(int a, int b) const {
  for (const Tri& t : tris_) {
    if (!t.alive) continue;
    for (int i = 0; i < 3; ++i) {
      const int u = t.v[i], v = t.v[(i + 1) % 3];
      if ((u == a && v == b) || (u == b && v == a)) return true;
    }
  }
  return false;
}

std::vector<int> Delaunay::recover_constraint(int a, int b) {
  if (edge_exists(a, b)) {
    add_constraint(a, b);
    return {a, b};
  }
  // conforming recovery: split at the midpoint and recurse
  const Vec2 m = 0.5 * (pts_[a] + pts_[b]);
  const int mid = insert(m);
  std::vector<int> left = recover_constraint(a, mid);
  const std::vector<int> right = recover_constraint(mid, b);
  left.insert(left.end(), right.begin() + 1, right.end());
  return left;
}

}  // namespace pulshom
