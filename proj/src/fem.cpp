#include "pulshom/fem.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/IterativeLinearSolvers>
#include <atomic>
#include <cmath>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pulshom {

namespace {

struct TriGeom {
  Vec2 p[3];
  Vec2 grad[3];  // P1 shape gradients
  double area;
  Vec2 quad[3];  // edge midpoints, weights area/3 (degree-2 exact)
};

TriGeom tri_geom(const PerforatedMesh& mesh, int t) {
  TriGeom g;
  for (int i = 0; i < 3; ++i) g.p[i] = mesh.vertices[mesh.triangles[t][i]];
  const Vec2 e1 = g.p[1] - g.p[0];
  const Vec2 e2 = g.p[2] - g.p[0];
  g.area = 0.5 * e1.cross(e2);
  for (int i = 0; i < 3; ++i) {
    const Vec2& a = g.p[(i + 1) % 3];
    const Vec2& b = g.p[(i + 2) % 3];
    const Vec2 n = (b - a).perp();
    g.grad[i] = n * (1.0 / n.dot(g.p[i] - a));
  }
  g.quad[0] = 0.5 * (g.p[0] + g.p[1]);
  g.quad[1] = 0.5 * (g.p[1] + g.p[2]);
  g.quad[2] = 0.5 * (g.p[2] + g.p[0]);
  return g;
}

// P1 shape values at the edge-midpoint quadrature nodes: kPhiAtQuad[q][i]
// with quad nodes mid(p0,p1), mid(p1,p2), mid(p2,p0)
constexpr double kPhiAtQuad[3][3] = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};

using ElementKernel = std::function<void(int tri, const TriGeom&, double local[3][3])>;

Eigen::SparseMatrix<double> assemble_matrix(const DofMap& dofs, const ElementKernel& kernel,
                                            AssemblyMode mode) {
  const PerforatedMesh& mesh = dofs.mesh();
  const int nt = mesh.triangle_count();
  std::vector<std::array<double, 9>> element(nt);
  std::atomic<bool> bad{false};

  auto compute = [&](int t) {
    const TriGeom g = tri_geom(mesh, t);
    double local[3][3] = {};
    kernel(t, g, local);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        if (!std::isfinite(local[i][j])) bad.store(true);
        element[t][i * 3 + j] = local[i][j];
      }
  };

  if (mode == AssemblyMode::parallel) {
#pragma omp parallel for schedule(static)
    for (int t = 0; t < nt; ++t) compute(t);
  } else {
    for (int t = 0; t < nt; ++t) compute(t);
  }
  if (bad.load()) throw NonFiniteCoefficient("non-finite coefficient during assembly");

  // deterministic scatter: serial, triangle order
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(size_t(nt) * 9);
  for (int t = 0; t < nt; ++t) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trip.emplace_back(dofs.dof(mesh.triangles[t][i]), dofs.dof(mesh.triangles[t][j]),
                          element[t][i * 3 + j]);
  }
  Eigen::SparseMatrix<double> m(dofs.free_count(), dofs.free_count());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

}  // namespace

DofMap::DofMap(const PerforatedMesh& mesh, bool periodic, bool mean_zero)
    : mesh_(&mesh), mean_zero_(mean_zero) {
  const int nv = mesh.vertex_count();
  std::vector<int> parent(nv);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };
  if (periodic)
    for (const auto& [slave, master] : mesh.periodic_pairs) parent[find(slave)] = find(master);
  vertex_dof_.assign(nv, -1);
  for (int v = 0; v < nv; ++v) {
    const int root = find(v);
    if (vertex_dof_[root] < 0) vertex_dof_[root] = free_++;
    vertex_dof_[v] = vertex_dof_[root];
  }
}

double Field::evaluate(const Vec2& p) const {
  const PerforatedMesh& mesh = dofmap->mesh();
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tr = mesh.triangles[t];
    const Vec2& a = mesh.vertices[tr[0]];
    const Vec2& b = mesh.vertices[tr[1]];
    const Vec2& c = mesh.vertices[tr[2]];
    const double det = (b - a).cross(c - a);
    const double l1 = (p - a).cross(c - a) / det;
    const double l2 = (b - a).cross(p - a) / det;
    const double l0 = 1.0 - l1 - l2;
    if (l0 >= -1e-10 && l1 >= -1e-10 && l2 >= -1e-10)
      return l0 * at_vertex(tr[0]) + l1 * at_vertex(tr[1]) + l2 * at_vertex(tr[2]);
  }
  throw GridMismatch("evaluation point is outside the mesh");
}

double field_integral(const Field& f) {
  const PerforatedMesh& mesh = f.dofmap->mesh();
  double sum = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tr = mesh.triangles[t];
    sum += mesh.triangle_area(t) / 3.0 *
           (f.at_vertex(tr[0]) + f.at_vertex(tr[1]) + f.at_vertex(tr[2]));
  }
  return sum;
}

double l2_norm(const Field& f) {
  const PerforatedMesh& mesh = f.dofmap->mesh();
  double sum = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tr = mesh.triangles[t];
    const double u0 = f.at_vertex(tr[0]), u1 = f.at_vertex(tr[1]), u2 = f.at_vertex(tr[2]);
    // exact P1 mass: area/6 on the diagonal, area/12 off it
    sum += mesh.triangle_area(t) / 12.0 *
           (u0 * u0 + u1 * u1 + u2 * u2 + (u0 + u1 + u2) * (u0 + u1 + u2));
  }
  return std::sqrt(sum);
}

double h1_seminorm(const Field& f) {
  const PerforatedMesh& mesh = f.dofmap->mesh();
  double sum = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const TriGeom g = tri_geom(mesh, t);
    Vec2 grad{0.0, 0.0};
    for (int i = 0; i < 3; ++i) grad += f.at_vertex(mesh.triangles[t][i]) * g.grad[i];
    sum += g.area * grad.squared_norm();
  }
  return std::sqrt(sum);
}

double mean(const Field& f) { return field_integral(f) / f.dofmap->mesh().area(); }

Vec2 gradient_integral(const Field& f) {
  const PerforatedMesh& mesh = f.dofmap->mesh();
  Vec2 sum{0.0, 0.0};
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const TriGeom g = tri_geom(mesh, t);
    Vec2 grad{0.0, 0.0};
    for (int i = 0; i < 3; ++i) grad += f.at_vertex(mesh.triangles[t][i]) * g.grad[i];
    sum += g.area * grad;
  }
  return sum;
}

Vec2 gradient_integral_weighted(const Field& f,
                                const std::function<Mat2(int, const Vec2&)>& weight) {
  const PerforatedMesh& mesh = f.dofmap->mesh();
  Vec2 sum{0.0, 0.0};
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const TriGeom g = tri_geom(mesh, t);
    Vec2 grad{0.0, 0.0};
    for (int i = 0; i < 3; ++i) grad += f.at_vertex(mesh.triangles[t][i]) * g.grad[i];
    for (int q = 0; q < 3; ++q) sum += (g.area / 3.0) * weight(t, g.quad[q]).apply(grad);
  }
  return sum;
}

Eigen::SparseMatrix<double> assemble_stiffness(const DofMap& dofs, const MatrixCoeff& coeff,
                                               AssemblyMode mode) {
  return assemble_matrix(
      dofs,
      [&coeff](int t, const TriGeom& g, double local[3][3]) {
        Mat2 avg{0, 0, 0, 0};
        for (int q = 0; q < 3; ++q) avg = avg + coeff(t, g.quad[q]) * (1.0 / 3.0);
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            local[i][j] = g.area * g.grad[i].dot(avg.apply(g.grad[j]));
      },
      mode);
}

Eigen::SparseMatrix<double> assemble_mass(const DofMap& dofs, const ScalarCoeff& w,
                                          AssemblyMode mode) {
  return assemble_matrix(
      dofs,
      [&w](int t, const TriGeom& g, double local[3][3]) {
        for (int q = 0; q < 3; ++q) {
          const double wq = w(t, g.quad[q]) * g.area / 3.0;
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
              local[i][j] += wq * kPhiAtQuad[q][i] * kPhiAtQuad[q][j];
        }
      },
      mode);
}

Eigen::SparseMatrix<double> assemble_advection(const DofMap& dofs, const VectorCoeff& b,
                                               AssemblyMode mode) {
  return assemble_matrix(
      dofs,
      [&b](int t, const TriGeom& g, double local[3][3]) {
        for (int q = 0; q < 3; ++q) {
          const Vec2 bq = b(t, g.quad[q]) * (g.area / 3.0);
          for (int i = 0; i < 3; ++i) {
            const double gi = bq.dot(g.grad[i]);
            for (int j = 0; j < 3; ++j) local[i][j] += gi * kPhiAtQuad[q][j];
          }
        }
      },
      mode);
}

Eigen::SparseMatrix<double> assemble_streamline_diffusion(const DofMap& dofs, const VectorCoeff& b,
                                                          double tau_scale, AssemblyMode mode) {
  return assemble_matrix(
      dofs,
      [&b, tau_scale](int t, const TriGeom& g, double local[3][3]) {
        Vec2 bq{0, 0};
        for (int q = 0; q < 3; ++q) bq += b(t, g.quad[q]) * (1.0 / 3.0);
        const double hk = std::sqrt(4.0 * g.area / std::sqrt(3.0));
        const double speed = bq.norm();
        if (speed < 1e-14) return;
        const double tau = tau_scale * hk / (2.0 * speed);
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            local[i][j] = tau * g.area * bq.dot(g.grad[i]) * bq.dot(g.grad[j]);
      },
      mode);
}

Eigen::VectorXd assemble_load_bulk(const DofMap& dofs, const ScalarCoeff& f) {
  const PerforatedMesh& mesh = dofs.mesh();
  Eigen::VectorXd load = Eigen::VectorXd::Zero(dofs.free_count());
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const TriGeom g = tri_geom(mesh, t);
    for (int q = 0; q < 3; ++q) {
      const double fq = f(t, g.quad[q]) * g.area / 3.0;
      for (int i = 0; i < 3; ++i) load[dofs.dof(mesh.triangles[t][i])] += fq * kPhiAtQuad[q][i];
    }
  }
  return load;
}

namespace {

// two-point Gauss on a segment, exact to degree 3
void edge_quadrature(const Vec2& a, const Vec2& b, Vec2 q[2], double w[2], double lam[2]) {
  const double off = 0.5 / std::sqrt(3.0);
  lam[0] = 0.5 - off;
  lam[1] = 0.5 + off;
  q[0] = a + lam[0] * (b - a);
  q[1] = a + lam[1] * (b - a);
  w[0] = w[1] = 0.5 * (b - a).norm();
}

}  // namespace

Eigen::VectorXd assemble_load_interface(const DofMap& dofs, const VectorCoeff& g) {
  const PerforatedMesh& mesh = dofs.mesh();
  Eigen::VectorXd load = Eigen::VectorXd::Zero(dofs.free_count());
  for (const BoundaryEdge& e : mesh.boundary_edges) {
    if (e.marker != BoundaryMarker::interface) continue;
    const Vec2& a = mesh.vertices[e.v0];
    const Vec2& b = mesh.vertices[e.v1];
    const Vec2 nu = CellGeometry::interface_normal(a, b);
    Vec2 q[2];
    double w[2], lam[2];
    edge_quadrature(a, b, q, w, lam);
    for (int k = 0; k < 2; ++k) {
      const double gn = g(-1, q[k]).dot(nu) * w[k];
      load[dofs.dof(e.v0)] -= gn * (1.0 - lam[k]);
      load[dofs.dof(e.v1)] -= gn * lam[k];
    }
  }
  return load;
}

Eigen::VectorXd assemble_load_interface_scalar(const DofMap& dofs, const ScalarCoeff& w) {
  const PerforatedMesh& mesh = dofs.mesh();
  Eigen::VectorXd load = Eigen::VectorXd::Zero(dofs.free_count());
  for (const BoundaryEdge& e : mesh.boundary_edges) {
    if (e.marker != BoundaryMarker::interface) continue;
    const Vec2& a = mesh.vertices[e.v0];
    const Vec2& b = mesh.vertices[e.v1];
    Vec2 q[2];
    double ww[2], lam[2];
    edge_quadrature(a, b, q, ww, lam);
    for (int k = 0; k < 2; ++k) {
      const double val = w(-1, q[k]) * ww[k];
      load[dofs.dof(e.v0)] += val * (1.0 - lam[k]);
      load[dofs.dof(e.v1)] += val * lam[k];
    }
  }
  return load;
}

Eigen::VectorXd assemble_load_flux(const DofMap& dofs, const VectorCoeff& q) {
  const PerforatedMesh& mesh = dofs.mesh();
  Eigen::VectorXd load = Eigen::VectorXd::Zero(dofs.free_count());
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const TriGeom g = tri_geom(mesh, t);
    Vec2 avg{0, 0};
    for (int k = 0; k < 3; ++k) avg += q(t, g.quad[k]) * (1.0 / 3.0);
    for (int i = 0; i < 3; ++i)
      load[dofs.dof(mesh.triangles[t][i])] += g.area * avg.dot(g.grad[i]);
  }
  return load;
}

Field solve_neumann_meanzero(const DofMap& dofs, const Eigen::SparseMatrix<double>& matrix,
                             Eigen::VectorXd rhs, const SolveOptions& opt) {
  const int n = dofs.free_count();
  const double defect = rhs.sum();
  if (std::abs(defect) > 100.0 * opt.tol_compat * (1.0 + rhs.norm()))
    throw IncompatibleData("load is not compatible with the pure-Neumann problem");
  rhs.array() -= defect / n;

  Field f;
  f.dofmap = &dofs;
  if (opt.method == SolveOptions::Method::cg) {
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>>
        cg;
    cg.setTolerance(opt.cg_tol);
    cg.setMaxIterations(20 * n);
    cg.compute(matrix);
    f.dofs = cg.solve(rhs);
    if (cg.info() != Eigen::Success && cg.error() > opt.cg_tol * 10)
      throw SolverDivergence("conjugate gradient did not converge");
  } else {
    // pin dof 0 and solve the reduced SPD system
    const Eigen::SparseMatrix<double> reduced =
        matrix.bottomRightCorner(n - 1, n - 1);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(reduced);
    if (ldlt.info() != Eigen::Success) throw SolverDivergence("factorization failed");
    Eigen::VectorXd sub = ldlt.solve(rhs.tail(n - 1));
    f.dofs = Eigen::VectorXd::Zero(n);
    f.dofs.tail(n - 1) = sub;
  }

  const double res = (matrix * f.dofs - rhs).norm();
  if (res > opt.residual_tol * std::max(1.0, rhs.norm()))
    throw SolverDivergence("pure-Neumann solve residual too large");

  f.dofs.array() -= field_integral(f) / dofs.mesh().area();
  return f;
}

std::vector<double> vertex_values(const Field& f) {
  const PerforatedMesh& mesh = f.dofmap->mesh();
  std::vector<double> vals(mesh.vertex_count());
  for (int v = 0; v < mesh.vertex_count(); ++v) vals[v] = f.at_vertex(v);
  return vals;
}

}  // namespace pulshom
