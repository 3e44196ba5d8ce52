#pragma once

#include <Eigen/Sparse>
#include <functional>

#include "pulshom/mesh.hpp"

namespace pulshom {

// Free-dof indexing after periodic identification: paired boundary vertices
// share one dof.  The mean-zero flag is honoured by solve_neumann_meanzero.
class DofMap {
 public:
  DofMap(const PerforatedMesh& mesh, bool periodic, bool mean_zero = false);

  int dof(int vertex) const { return vertex_dof_[vertex]; }
  int free_count() const { return free_; }
  bool mean_zero() const { return mean_zero_; }
  const PerforatedMesh& mesh() const { return *mesh_; }

 private:
  const PerforatedMesh* mesh_;
  std::vector<int> vertex_dof_;
  int free_ = 0;
  bool mean_zero_ = false;
};

// Scalar FEM coefficient vector with slice stamps.
struct Field {
  Eigen::VectorXd dofs;
  const DofMap* dofmap = nullptr;
  double t = 0.0;
  double s = 0.0;

  double at_vertex(int v) const { return dofs[dofmap->dof(v)]; }
  // barycentric interpolation at an arbitrary point of the mesh
  double evaluate(const Vec2& p) const;
};

// integral of a P1 field and derived quantities (quadrature exact for P1)
double field_integral(const Field& f);
double l2_norm(const Field& f);
double h1_seminorm(const Field& f);
double mean(const Field& f);
Vec2 gradient_integral(const Field& f);  // integral of the elementwise gradient
Vec2 gradient_integral_weighted(const Field& f,
                                const std::function<Mat2(int, const Vec2&)>& weight);

enum class AssemblyMode { serial, parallel };

// coefficient functors receive the triangle index and the physical point
using MatrixCoeff = std::function<Mat2(int, const Vec2&)>;
using ScalarCoeff = std::function<double(int, const Vec2&)>;
using VectorCoeff = std::function<Vec2(int, const Vec2&)>;

// stiffness: entries int coeff grad(phi_j) . grad(phi_i)
Eigen::SparseMatrix<double> assemble_stiffness(const DofMap& dofs, const MatrixCoeff& coeff,
                                               AssemblyMode mode = AssemblyMode::parallel);
// weighted mass: entries int w phi_j phi_i
Eigen::SparseMatrix<double> assemble_mass(const DofMap& dofs, const ScalarCoeff& w,
                                          AssemblyMode mode = AssemblyMode::parallel);
// advection pairing against the test gradient: entries int phi_j (b . grad(phi_i))
Eigen::SparseMatrix<double> assemble_advection(const DofMap& dofs, const VectorCoeff& b,
                                               AssemblyMode mode = AssemblyMode::parallel);
// streamline stabilisation: entries int tau (b.grad(phi_j)) (b.grad(phi_i))
Eigen::SparseMatrix<double> assemble_streamline_diffusion(const DofMap& dofs, const VectorCoeff& b,
                                                          double tau_scale,
                                                          AssemblyMode mode = AssemblyMode::parallel);

// bulk load int f phi_i
Eigen::VectorXd assemble_load_bulk(const DofMap& dofs, const ScalarCoeff& f);
// interface load -int_Gamma (g . nu) phi_i with nu the pore-outward normal
Eigen::VectorXd assemble_load_interface(const DofMap& dofs, const VectorCoeff& g);
// interface load int_Gamma w phi_i (scalar boundary data)
Eigen::VectorXd assemble_load_interface_scalar(const DofMap& dofs, const ScalarCoeff& w);
// flux load int q . grad(phi_i)
Eigen::VectorXd assemble_load_flux(const DofMap& dofs, const VectorCoeff& q);

struct SolveOptions {
  enum class Method { direct, cg };
  Method method = Method::direct;
  double cg_tol = 1e-10;
  double tol_compat = 1e-8;
  double residual_tol = 1e-9;
};

// Pure-Neumann / periodic solve on the quotient space: projects the load
// onto mean-zero compatibility, solves the SPD system with one pinned dof
// (or CG), shifts the solution to zero mean.  Throws IncompatibleData when
// the projection defect exceeds 100 * tol_compat.
Field solve_neumann_meanzero(const DofMap& dofs, const Eigen::SparseMatrix<double>& matrix,
                             Eigen::VectorXd rhs, const SolveOptions& opt = {});

// expand the free-dof vector to one value per mesh vertex
std::vector<double> vertex_values(const Field& f);

}  // namespace pulshom
