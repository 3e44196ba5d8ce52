/// @file test_fem.cpp
/// P1 kernel: assembly identities, pure-Neumann mean-zero solves, norms,
/// and the manufactured-solution convergence audit.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <random>
#include <set>

#include "pulshom/fem.hpp"
#include "pulshom/motion.hpp"

using namespace pulshom;

namespace {

CellGeometry small_rect() {
  auto p = MotionProgram::static_obstacle(ObstacleShape::rectangle(0.1, 0.1), {0.5, 0.5});
  return obstacle_at(p, 0.0, {0.5, 0.5}, 0.0);
}

Field interpolate(const DofMap& dofs, const std::function<double(const Vec2&)>& fn) {
  Field f;
  f.dofmap = &dofs;
  f.dofs = Eigen::VectorXd::Zero(dofs.free_count());
  for (int v = 0; v < dofs.mesh().vertex_count(); ++v)
    f.dofs[dofs.dof(v)] = fn(dofs.mesh().vertices[v]);
  return f;
}

}  // namespace

TEST_CASE("stiffness rows sum to zero: constants are in the kernel") {
  const PerforatedMesh mesh = mesh_cell(small_rect(), 1.0 / 16);
  const DofMap dofs(mesh, true, true);
  const Mat2 coeff{2.0, 0.3, 0.3, 1.4};
  const auto K = assemble_stiffness(dofs, [&](int, const Vec2&) { return coeff; });
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(dofs.free_count());
  CHECK((K * ones).lpNorm<Eigen::Infinity>() < 1e-13);
}

TEST_CASE("uniform gradient reproduces boundary fluxes") {
  const PerforatedMesh mesh = mesh_macro(1.0 / 8);
  const DofMap dofs(mesh, false);
  const double D = 1.7;
  const auto K = assemble_stiffness(dofs, [&](int, const Vec2&) { return Mat2::identity() * D; });
  const Field lin = interpolate(dofs, [](const Vec2& p) { return p.x; });
  const Eigen::VectorXd flux = K * lin.dofs;
  double right = 0.0, left = 0.0, interior = 0.0;
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const double fx = flux[dofs.dof(v)];
    if (mesh.vertices[v].x == 1.0)
      right += fx;
    else if (mesh.vertices[v].x == 0.0)
      left += fx;
    else
      interior = std::max(interior, std::abs(fx));
  }
  CHECK(right == doctest::Approx(D).epsilon(1e-12));
  CHECK(left == doctest::Approx(-D).epsilon(1e-12));
  CHECK(interior < 1e-12);
}

TEST_CASE("assembled stiffness is positive semidefinite with constant kernel") {
  CellGeometry g = small_rect();
  const PerforatedMesh mesh = mesh_cell(g, 1.0 / 8);
  const DofMap dofs(mesh, true, true);
  REQUIRE(dofs.free_count() <= 220);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(0.2, 1.0);
  const double a = dist(rng), b = dist(rng), c = 0.3 * dist(rng);
  const Mat2 spd{a + b, c, c, a + 2.0 * b};  // diagonally dominant SPD
  const auto K = assemble_stiffness(dofs, [&](int, const Vec2&) { return spd; });
  Eigen::MatrixXd dense(K);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense);
  CHECK(eig.eigenvalues()[0] > -1e-11);
  CHECK(std::abs(eig.eigenvalues()[0]) < 1e-11);  // the constant mode
  CHECK(eig.eigenvalues()[1] > 1e-4);
  const Eigen::VectorXd kernel = eig.eigenvectors().col(0);
  const double spread = (kernel.array() - kernel.mean()).abs().maxCoeff();
  CHECK(spread < 1e-8);
}

TEST_CASE("bulk load of one sums to the pore area") {
  CellGeometry g = small_rect();
  const PerforatedMesh mesh = mesh_cell(g, 1.0 / 16);
  const DofMap dofs(mesh, true, true);
  const Eigen::VectorXd load = assemble_load_bulk(dofs, [](int, const Vec2&) { return 1.0; });
  CHECK(load.sum() == doctest::Approx(g.porosity).epsilon(1e-13));
}

TEST_CASE("constant interface data on a closed curve sums to zero") {
  CellGeometry g = small_rect();
  const PerforatedMesh mesh = mesh_cell(g, 1.0 / 16);
  const DofMap dofs(mesh, true, true);
  const Eigen::VectorXd load =
      assemble_load_interface(dofs, [](int, const Vec2&) { return Vec2{0.7, -0.2}; });
  CHECK(std::abs(load.sum()) < 1e-13);
}

TEST_CASE("translating-phase interface velocity load sums to zero") {
  auto p = MotionProgram::paper_example(0.05, 0.1);
  const double s = 0.125;
  const CellGeometry g = obstacle_at(p, 0.0, {0.5, 0.5}, s);
  const PerforatedMesh mesh = mesh_cell(g, 1.0 / 16);
  const DofMap dofs(mesh, true, true);
  const Eigen::VectorXd load = assemble_load_interface(
      dofs, [&](int, const Vec2& y) { return boundary_velocity(p, 0.0, {0.5, 0.5}, s, y, 0.1); });
  CHECK(std::abs(load.sum()) < 1e-13);  // rigid motion preserves the area
}

TEST_CASE("zero load solves to the zero field") {
  const PerforatedMesh mesh = mesh_cell(small_rect(), 1.0 / 16);
  const DofMap dofs(mesh, true, true);
  const auto K = assemble_stiffness(dofs, [](int, const Vec2&) { return Mat2::identity(); });
  const Field u = solve_neumann_meanzero(dofs, K, Eigen::VectorXd::Zero(dofs.free_count()));
  CHECK(u.dofs.lpNorm<Eigen::Infinity>() < 1e-14);
}

TEST_CASE("incompatible load is rejected") {
  const PerforatedMesh mesh = mesh_cell(small_rect(), 1.0 / 16);
  const DofMap dofs(mesh, true, true);
  const auto K = assemble_stiffness(dofs, [](int, const Vec2&) { return Mat2::identity(); });
  CHECK_THROWS_AS(
      solve_neumann_meanzero(dofs, K, Eigen::VectorXd::Ones(dofs.free_count())),
      IncompatibleData);
}

TEST_CASE("manufactured solution converges at the P1 rates") {
  auto exact = [](const Vec2& p) { return std::cos(2 * kPi * p.x) * std::cos(2 * kPi * p.y); };
  auto rhs_fn = [&](const Vec2& p) { return 8.0 * kPi * kPi * exact(p); };

  std::vector<double> l2, h1;
  for (double h : {1.0 / 8, 1.0 / 16, 1.0 / 32}) {
    CellGeometry empty;
    const PerforatedMesh mesh = mesh_cell(empty, h);
    const DofMap dofs(mesh, true, true);
    const auto K = assemble_stiffness(dofs, [](int, const Vec2&) { return Mat2::identity(); });
    const Eigen::VectorXd load =
        assemble_load_bulk(dofs, [&](int, const Vec2& p) { return rhs_fn(p); });
    const Field u = solve_neumann_meanzero(dofs, K, load);
    const Field diff = [&] {
      Field d = interpolate(dofs, exact);
      d.dofs -= u.dofs;
      d.dofmap = &dofs;
      return d;
    }();
    l2.push_back(l2_norm(diff));
    h1.push_back(h1_seminorm(diff));
  }
  const double l2_order = 0.5 * (std::log2(l2[0] / l2[1]) + std::log2(l2[1] / l2[2]));
  const double h1_order = 0.5 * (std::log2(h1[0] / h1[1]) + std::log2(h1[1] / h1[2]));
  CHECK(l2_order == doctest::Approx(2.0).epsilon(0.1));
  CHECK(h1_order == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("norm identities on simple fields") {
  CellGeometry empty;
  const PerforatedMesh full = mesh_cell(empty, 1.0 / 8);
  const DofMap dofs_full(full, true, true);
  const Field one = interpolate(dofs_full, [](const Vec2&) { return 1.0; });
  CHECK(l2_norm(one) == doctest::Approx(1.0).epsilon(1e-14));

  CellGeometry g = small_rect();
  const PerforatedMesh pm = mesh_cell(g, 1.0 / 16);
  const DofMap dofs(pm, false);
  const Field lin = interpolate(dofs, [](const Vec2& p) { return p.x; });
  CHECK(h1_seminorm(lin) == doctest::Approx(std::sqrt(g.porosity)).epsilon(1e-13));

  const DofMap pdofs(pm, true, true);
  const auto K = assemble_stiffness(pdofs, [](int, const Vec2&) { return Mat2::identity(); });
  Eigen::VectorXd load = assemble_load_bulk(pdofs, [](int, const Vec2& p) {
    return std::sin(2 * kPi * p.x) * std::cos(2 * kPi * p.y);
  });
  const Field u = solve_neumann_meanzero(pdofs, K, std::move(load));
  CHECK(std::abs(mean(u)) < 1e-12);
}

TEST_CASE("periodic pairing shares one dof") {
  CellGeometry empty;
  const PerforatedMesh mesh = mesh_cell(empty, 1.0 / 8);
  const DofMap dofs(mesh, true, true);
  for (const auto& [slave, master] : mesh.periodic_pairs)
    CHECK(dofs.dof(slave) == dofs.dof(master));
  std::set<int> slaves;
  for (const auto& [slave, master] : mesh.periodic_pairs) slaves.insert(slave);
  CHECK(dofs.free_count() == mesh.vertex_count() - int(slaves.size()));
}

TEST_CASE("parallel assembly matches the serial reference bitwise") {
  const CellGeometry g = small_rect();
  const PerforatedMesh mesh = mesh_cell(g, 1.0 / 32);
  const DofMap dofs(mesh, true, true);
  auto coeff = [](int, const Vec2& p) {
    return Mat2{1.0 + p.x, 0.2 * p.y, 0.2 * p.y, 1.5 - 0.3 * p.x};
  };
  const auto Ks = assemble_stiffness(dofs, coeff, AssemblyMode::serial);
  const auto Kp = assemble_stiffness(dofs, coeff, AssemblyMode::parallel);
  CHECK(Eigen::SparseMatrix<double>(Ks - Kp).norm() == 0.0);  // bitwise equal values

  const auto Ms = assemble_mass(dofs, [](int, const Vec2& p) { return 1.0 + p.y; },
                                AssemblyMode::serial);
  const auto Mp = assemble_mass(dofs, [](int, const Vec2& p) { return 1.0 + p.y; },
                                AssemblyMode::parallel);
  CHECK(Eigen::SparseMatrix<double>(Ms - Mp).norm() == 0.0);
}

TEST_CASE("non-finite coefficients are rejected") {
  const PerforatedMesh mesh = mesh_cell(small_rect(), 1.0 / 8);
  const DofMap dofs(mesh, true, true);
  CHECK_THROWS_AS(assemble_stiffness(dofs, [](int, const Vec2&) {
                    return Mat2{std::nan(""), 0, 0, 1};
                  }),
                  NonFiniteCoefficient);
}

TEST_CASE("conjugate gradient path agrees with the direct solver") {
  const CellGeometry g = small_rect();
  const PerforatedMesh mesh = mesh_cell(g, 1.0 / 16);
  const DofMap dofs(mesh, true, true);
  const auto K = assemble_stiffness(dofs, [](int, const Vec2&) { return Mat2::identity(); });
  Eigen::VectorXd load = assemble_load_bulk(dofs, [](int, const Vec2& p) {
    return std::cos(2 * kPi * p.x) + std::sin(2 * kPi * p.y);
  });
  load.array() -= load.sum() / load.size();  // the perforation breaks exact compatibility
  const Field direct = solve_neumann_meanzero(dofs, K, load);
  SolveOptions cg;
  cg.method = SolveOptions::Method::cg;
  const Field iterative = solve_neumann_meanzero(dofs, K, load, cg);
  CHECK((direct.dofs - iterative.dofs).lpNorm<Eigen::Infinity>() < 1e-8);
}
