#include <gtest/gtest.h>

#include <cmath>

#include "mmfem/errors.hpp"
#include "mmfem/solver.hpp"

using namespace mmfem;

namespace {

SpMat dense_to_sparse(const Eigen::MatrixXd& A) { return A.sparseView(); }

Problem antiplane(const Mesh& mesh, Family fam, int p, double Lc) {
    Problem pb;
    pb.model = Model::antiplane;
    pb.mesh = &mesh;
    pb.params = {.lambda_e = 0, .mu_e = 1, .lambda_micro = 0, .mu_micro = 1, .mu_c = 0,
                 .lambda_macro = 0, .mu_macro = 1, .Lc = Lc};
    pb.u_space = {Family::h1, p + 1, 2};
    pb.p_space = {fam, p, 2};
    return pb;
}

}  // namespace

TEST(Solver, IdentitySystem) {
    const SpMat I = dense_to_sparse(Eigen::MatrixXd::Identity(4, 4));
    const Eigen::VectorXd x = solve_spd(I, Eigen::VectorXd::Unit(4, 0));
    EXPECT_EQ(x, Eigen::VectorXd::Unit(4, 0));
}

TEST(Solver, TwoByTwo) {
    const SpMat K = dense_to_sparse((Eigen::MatrixXd(2, 2) << 2, 1, 1, 2).finished());
    SolveStats st;
    const Eigen::VectorXd x = solve_spd(K, Eigen::Vector2d(1, 1), &st);
    EXPECT_NEAR(x(0), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(x(1), 1.0 / 3.0, 1e-15);
    EXPECT_LE(st.residual, kResidualTolerance);
}

TEST(Solver, IndefiniteMatrixRejected) {
    const SpMat K = dense_to_sparse((Eigen::MatrixXd(2, 2) << 1, 2, 2, 1).finished());
    EXPECT_THROW(solve_spd(K, Eigen::Vector2d(1, 0)), NotPositiveDefinite);
    EXPECT_THROW(solve_spd(K, Eigen::Vector3d(1, 0, 0)), InvalidParam);
}

TEST(Solver, AlgebraicLimitWithoutCurvature) {
    // Lc = 0: p = mu_e / (mu_e + mu_micro) grad u pointwise.
    const Mesh mesh = generate_disk(1.0, 3);
    for (Family fam : {Family::nedelec1, Family::nedelec2}) {
        const Layout layout(antiplane(mesh, fam, 1, 0.0));
        const SparseSystem sys = assemble(layout);
        const ConstraintSet cs = build_constraints(layout, boundary_data([](auto x) { return std::array{x[0], x[1], x[2]}; }));
        const FieldSolution sol = solve(layout, sys, cs);
        EXPECT_LE(sol.stats.residual, kResidualTolerance);
        for (const Point& x : {Point{0.1, 0.2, 0}, Point{-0.5, 0.3, 0}, Point{0.0, -0.9, 0}}) {
            const PointFields pf = eval_field(sol, x);
            EXPECT_NEAR(pf.u(0), x[0], 1e-10);
            EXPECT_NEAR(pf.P(0, 0), 0.5, 1e-10);
            EXPECT_NEAR(pf.P(0, 1), 0.0, 1e-10);
        }
    }
}

TEST(Solver, ManufacturedPolynomialRecovered) {
    // u = x^2 + y, p = grad u, rot p = 0: f = 0 and m = mu_micro p.
    const Mesh mesh = generate_disk(1.0, 2);
    for (Family fam : {Family::nedelec1, Family::nedelec2}) {
        Problem pb = antiplane(mesh, fam, 1, 0.7);
        pb.params.mu_micro = 2.0;
        pb.loads.m = [](const Point& x) { return Vec3{2.0 * 2 * x[0], 2.0, 0}; };
        const Layout layout(pb);
        const SparseSystem sys = assemble(layout);
        const ConstraintSet cs = build_constraints(
            layout, boundary_data([](auto x) { return std::array{x[0] * x[0] + x[1], x[1], x[2]}; }));
        const FieldSolution sol = solve(layout, sys, cs);
        EXPECT_LE(sol.stats.residual, kResidualTolerance);
        const auto exact_u = [](const Point& x) {
            Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
            m(0, 0) = x[0] * x[0] + x[1];
            return m;
        };
        const auto exact_p = [](const Point& x) {
            Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
            m(0, 0) = 2 * x[0];
            m(0, 1) = 1;
            return m;
        };
        EXPECT_LT(l2_error(layout, sol.coefficients, FieldKind::u, exact_u, 6), 1e-11);
        EXPECT_LT(l2_error(layout, sol.coefficients, FieldKind::p, exact_p, 6), 1e-11);
    }
}

TEST(Solver, ReusedFactorizationMatchesFreshSolve) {
    const Mesh mesh = generate_box(3, {0, 0, 0}, {1, 1, 1}, {2, 2, 2});
    Problem pb;
    pb.model = Model::full3d;
    pb.mesh = &mesh;
    pb.params = {.lambda_e = 2.5, .mu_e = 1.25, .lambda_micro = 10, .mu_micro = 5, .mu_c = 1,
                 .lambda_macro = 2, .mu_macro = 1, .Lc = 1};
    pb.u_space = {Family::h1, 2, 3};
    pb.p_space = {Family::nedelec1, 1, 3};
    const Layout layout(pb);
    const SparseSystem sys = assemble(layout);
    const ConstraintSet cs = build_constraints(
        layout, boundary_data([](auto x) { return std::array{x[1] * x[2], 0.1 * x[0], x[0] * x[1]}; }));
    ReducedSolver rs(sys, cs);
    for (double c : {1e-3, 1.0, 100.0}) {
        SolveStats st;
        const Eigen::VectorXd a = rs.solve(c, &st);
        EXPECT_LE(st.residual, kResidualTolerance);
        ReducedSolver fresh(sys, cs);
        const Eigen::VectorXd b = fresh.solve(c);
        EXPECT_LT((a - b).norm(), 1e-12 * b.norm());
        for (const auto& [dof, con] : cs.entries()) EXPECT_EQ(a(dof), con.value);
    }
}

TEST(Solver, ZeroCosseratFactorizesWithMicroBoundary) {
    const Mesh mesh = generate_box(3, {0, 0, 0}, {2, 1, 1}, {2, 1, 1});
    Problem pb;
    pb.model = Model::full3d;
    pb.mesh = &mesh;
    pb.params = {.lambda_e = 0, .mu_e = 0.5, .lambda_micro = 0, .mu_micro = 20, .mu_c = 0,
                 .lambda_macro = 0, .mu_macro = 0.5, .Lc = 1};
    pb.u_space = {Family::h1, 2, 3};
    pb.p_space = {Family::nedelec2, 1, 3};
    const Layout layout(pb);
    const SparseSystem sys = assemble(layout);
    const ConstraintSet cs =
        build_constraints(layout, boundary_data([](auto x) { return std::array{0.0 * x[0], 0.0 * x[0], 0.1 * x[0] * x[0]}; }),
                          {"xmin", "xmax"});
    const FieldSolution sol = solve(layout, sys, cs);
    EXPECT_FALSE(sol.stats.used_cg);
    EXPECT_LE(sol.stats.residual, kResidualTolerance);
}

TEST(Solver, EvalFieldAtVertexAndOutside) {
    const Mesh mesh = generate_disk(1.0, 2);
    const Layout layout(antiplane(mesh, Family::nedelec1, 2, 1.0));
    FieldSolution sol{&layout, Eigen::VectorXd::LinSpaced(layout.size(), -1, 1), {}};
    for (int v = 0; v < mesh.num_vertices(); ++v)
        EXPECT_NEAR(eval_field(sol, mesh.vertices[v]).u(0),
                    sol.coefficients(layout.u().map.global(PolytopeKind::vertex, v, 0)), 1e-12);
    EXPECT_THROW(eval_field(sol, Point{2, 0, 0}), PointOutsideMesh);
    // Constant Bernstein coefficients give a constant field.
    sol.coefficients.setZero();
    sol.coefficients.head(layout.u().map.size()).setConstant(0.25);
    EXPECT_NEAR(eval_field(sol, Point{0.31, -0.2, 0}).u(0), 0.25, 1e-14);
}
