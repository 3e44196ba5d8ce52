#pragma once

#include <set>
#include <vector>

#include "pulshom/common.hpp"

namespace pulshom {

// Incremental Bowyer-Watson triangulation with constrained ("barrier")
// edges: cavities never grow across a constrained edge, so constrained
// edges survive later insertions.  Enough machinery for conforming
// Delaunay meshing with Ruppert-style refinement.
class Delaunay {
 public:
  struct Tri {
    int v[3];   // counterclockwise
    int nb[3];  // nb[i] is the neighbour opposite v[i], -1 at the hull
    bool alive = true;
  };

  Delaunay();

  int insert(const Vec2& p);
  // Split the constrained edge (a,b) at p (p must lie on the open segment).
  int insert_on_segment(int a, int b, const Vec2& p);
  void add_constraint(int a, int b);
  bool edge_exists(int a, int b) const;
  bool is_constrained(int a, int b) const;
  // Ensure the edge a-b is present, inserting segment midpoints if needed.
  // Returns the vertex chain from a to b (recovery may subdivide).
  std::vector<int> recover_constraint(int a, int b);

  const std::vector<Vec2>& points() const { return pts_; }
  const std::vector<Tri>& tris() const { return tris_; }
  const std::set<std::pair<int, int>>& constraints() const { return constraints_; }
  static bool is_super_vertex(int v) { return v < 3; }

 private:
  int locate(const Vec2& p) const;
  void legalize(int t, int edge);
  int make_tri(int a, int b, int c, int na, int nb, int nc);
  void wire(int t, int side, int neighbour);

  std::vector<Vec2> pts_;
  std::vector<Tri> tris_;
  std::set<std::pair<int, int>> constraints_;
  int last_tri_ = 0;
};

double orient2d(const Vec2& a, const Vec2& b, const Vec2& c);
bool in_circumcircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& p);
Vec2 circumcenter(const Vec2& a, const Vec2& b, const Vec2& c);

}  // namespace pulshom
