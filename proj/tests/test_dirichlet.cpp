#include <gtest/gtest.h>

#include <cmath>

#include "mmfem/dirichlet.hpp"
#include "mmfem/errors.hpp"
#include "mmfem/solver.hpp"

using namespace mmfem;

namespace {

Problem antiplane(const Mesh& mesh, Family fam, int p, double Lc = 1.0) {
    Problem pb;
    pb.model = Model::antiplane;
    pb.mesh = &mesh;
    pb.params.Lc = Lc;
    pb.u_space = {Family::h1, p + 1, 2};
    pb.p_space = {fam, p, 2};
    return pb;
}

Problem full3d(const Mesh& mesh, Family fam, int p) {
    Problem pb;
    pb.model = Model::full3d;
    pb.mesh = &mesh;
    pb.params.Lc = 1.0;
    pb.u_space = {Family::h1, p + 1, 3};
    pb.p_space = {fam, p, 3};
    return pb;
}

Eigen::Vector3d v3(const Vec3& a) { return {a[0], a[1], a[2]}; }

// Points spread over a boundary facet.
std::vector<Point> facet_samples(const Mesh& mesh, int facet) {
    const auto vs = mesh.facet_vertices(facet);
    std::vector<Point> out;
    const std::vector<std::array<double, 3>> bary = {{0.2, 0.8, 0}, {0.5, 0.5, 0}, {0.9, 0.1, 0},
                                                     {0.2, 0.3, 0.5}, {0.6, 0.1, 0.3}};
    for (const auto& b : bary) {
        // Facet-interior points only: on a face, a point of its rim may be located in a cell
        // that touches the face along that rim alone.
        if ((vs.size() == 2) != (b[2] == 0)) continue;
        Point x{};
        for (std::size_t k = 0; k < vs.size(); ++k)
            for (int d = 0; d < 3; ++d) x[d] += b[k] * mesh.vertices[vs[k]][d];
        out.push_back(x);
    }
    return out;
}

}  // namespace

TEST(Dirichlet, VertexValues) {
    const Mesh mesh = generate_box(2, {0, 0, 0}, {2, 1, 0}, {2, 1, 1});
    const Layout layout(antiplane(mesh, Family::nedelec1, 1));
    const ConstraintSet cs = build_constraints(layout, boundary_data([](auto x) { return std::array{x[0], x[1], x[2]}; }));
    const int v = 2;  // vertex (2, 0)
    ASSERT_EQ(mesh.vertices[v][0], 2.0);
    ASSERT_EQ(mesh.vertices[v][1], 0.0);
    EXPECT_EQ(cs.value(layout.u().map.global(PolytopeKind::vertex, v, 0)), 2.0);
    EXPECT_EQ(cs.entries().at(layout.u().map.global(PolytopeKind::vertex, v, 0)).from, Provenance::vertex);

    const ConstraintSet cc = build_constraints(layout, boundary_data([](auto) { return std::array{Dual(1.5), Dual(0), Dual(0)}; }));
    for (const auto& [dof, c] : cc.entries()) {
        if (dof < layout.u().map.size()) EXPECT_NEAR(c.value, 1.5, 1e-14);
        else EXPECT_NEAR(c.value, 0.0, 1e-14);  // tangential gradient vanishes
    }
}

TEST(Dirichlet, SinusoidalVertexValue) {
    const Mesh mesh = generate_disk(10.0, 2);
    const Layout layout(antiplane(mesh, Family::nedelec2, 1));
    const auto data = boundary_data([](auto x) {
        using T = std::decay_t<decltype(x[0])>;
        return std::array<T, 3>{sin((x[0] * x[0] + x[1] * x[1]) / 5.0), T(0), T(0)};
    });
    bool found = false;
    for (int v = 0; v < mesh.num_vertices(); ++v)
        if (std::abs(mesh.vertices[v][0] - 10) < 1e-12 && std::abs(mesh.vertices[v][1]) < 1e-12) {
            const ConstraintSet cs = build_constraints(layout, data);
            EXPECT_NEAR(cs.value(layout.u().map.global(PolytopeKind::vertex, v, 0)), std::sin(20.0), 1e-12);
            found = true;
        }
    EXPECT_TRUE(found);
}

TEST(Dirichlet, UnitEdgeQuadraticStiffness) {
    const Mesh mesh = build(2, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}});
    const DofMap map(mesh, {Family::h1, 2, 2});
    const int e = 0;
    ASSERT_EQ(mesh.edges[e], (std::array<int, 2>{0, 1}));
    const auto pr = project_entity(map, PolytopeKind::edge, e, [](const Point&) { return Vec3{1, 0, 0}; },
                                   [](int) { return 0.0; });
    ASSERT_EQ(pr.K.rows(), 1);
    EXPECT_NEAR(pr.K(0, 0), 4.0 / 3.0, 1e-14);
}

TEST(Dirichlet, UnitEdgeSecondFamilyMass) {
    const Mesh mesh = build(2, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}});
    const DofMap map(mesh, {Family::nedelec2, 1, 2});
    const auto pr = project_entity(map, PolytopeKind::edge, 0, [](const Point&) { return Vec3{0, 0, 0}; },
                                   [](int) { return 0.0; });
    ASSERT_EQ(pr.K.rows(), 2);
    EXPECT_NEAR(pr.K(0, 0), 1.0 / 3.0, 1e-14);
    EXPECT_NEAR(pr.K(1, 1), 1.0 / 3.0, 1e-14);
    EXPECT_NEAR(std::abs(pr.K(0, 1)), 1.0 / 6.0, 1e-14);
    EXPECT_NEAR(pr.values.norm(), 0.0, 1e-15);
}

TEST(Dirichlet, LowestOrderEdgeDofIsEdgeLength) {
    const double L = 2.5;
    const Mesh mesh = build(2, {{0, 0, 0}, {L, 0, 0}, {0, 1, 0}}, {{0, 1, 2}});
    const Layout layout(antiplane(mesh, Family::nedelec1, 0));
    const ConstraintSet cs = build_constraints(layout, boundary_data([](auto x) { return std::array{x[0], x[1], x[2]}; }));
    const int dof = layout.p().offset + layout.p().map.global(PolytopeKind::edge, 0, 0);
    EXPECT_NEAR(std::abs(cs.value(dof)), L, 1e-13);
    EXPECT_EQ(cs.entries().at(dof).from, Provenance::edge);
}

TEST(Dirichlet, ProjectionExactForPolynomialData2d) {
    const Mesh mesh = generate_disk(1.0, 3);
    const auto data = boundary_data([](auto x) {
        using T = std::decay_t<decltype(x[0])>;
        return std::array<T, 3>{x[0] * x[0] - 2.0 * x[0] * x[1] + x[1] + 1.0, T(0), T(0)};
    });
    for (Family fam : {Family::nedelec1, Family::nedelec2})
        for (int p = 1; p <= 3; ++p) {
            const Layout layout(antiplane(mesh, fam, p));
            const ConstraintSet cs = build_constraints(layout, data);
            const FieldSolution sol{&layout, cs.lift(layout.size()), {}};
            for (int f : mesh.boundary_facets) {
                const auto vs = mesh.facet_vertices(f);
                const Eigen::Vector3d t = v3(mesh.vertices[vs[1]]) - v3(mesh.vertices[vs[0]]);
                for (const Point& x : facet_samples(mesh, f)) {
                    const PointFields pf = eval_field(sol, x);
                    EXPECT_NEAR(pf.u(0), data.value(x)[0], 1e-11);
                    const Eigen::Vector3d g = data.gradient(x).row(0).transpose();
                    EXPECT_NEAR(pf.P.row(0).dot(t), g.dot(t), 1e-11);
                }
            }
        }
}

TEST(Dirichlet, ProjectionExactForPolynomialData3d) {
    const Mesh mesh = generate_box(3, {-1, -1, -1}, {1, 1, 1}, {2, 2, 1});
    const auto data = boundary_data([](auto x) {
        return std::array{x[0] * x[1] + x[2], x[2] * x[2] - x[0], x[0] * x[0] + 2.0 * x[1] * x[2]};
    });
    for (Family fam : {Family::nedelec1, Family::nedelec2}) {
        const Layout layout(full3d(mesh, fam, 2));
        const ConstraintSet cs = build_constraints(layout, data);
        int faces = 0;
        for (const auto& [dof, c] : cs.entries()) faces += c.from == Provenance::face;
        EXPECT_GT(faces, 0);
        const FieldSolution sol{&layout, cs.lift(layout.size()), {}};
        for (int f : mesh.boundary_facets) {
            const auto vs = mesh.facet_vertices(f);
            const Eigen::Vector3d n =
                (v3(mesh.vertices[vs[1]]) - v3(mesh.vertices[vs[0]])).cross(v3(mesh.vertices[vs[2]]) - v3(mesh.vertices[vs[0]])).normalized();
            for (const Point& x : facet_samples(mesh, f)) {
                const PointFields pf = eval_field(sol, x);
                const Eigen::Matrix3d G = data.gradient(x);
                EXPECT_LT((pf.u - v3(data.value(x))).norm(), 1e-11);
                for (int r = 0; r < 3; ++r)
                    EXPECT_LT((pf.P.row(r).transpose() - G.row(r).transpose()).cross(n).norm(), 1e-11);
            }
        }
    }
}

TEST(Dirichlet, EdgeErrorDecreasesWithDegree) {
    const Mesh mesh = build(2, {{0, 0, 0}, {2, 0.5, 0}, {0, 1.5, 0}}, {{0, 1, 2}});
    const auto data = boundary_data([](auto x) {
        using T = std::decay_t<decltype(x[0])>;
        return std::array<T, 3>{sin(3.0 * x[0] + x[1]), T(0), T(0)};
    });
    double prev = 1e300, first = 0;
    for (int p = 0; p <= 5; ++p) {
        const Layout layout(antiplane(mesh, Family::nedelec1, p));
        const ConstraintSet cs = build_constraints(layout, data);
        const FieldSolution sol{&layout, cs.lift(layout.size()), {}};
        double err = 0;
        const LineRule& lr = gauss_legendre01(12);
        for (std::size_t q = 0; q < lr.points.size(); ++q) {
            const double a = lr.points[q];
            const Point x{2 * a, 0.5 * a, 0};
            const double d = eval_field(sol, x).u(0) - data.value(x)[0];
            err += lr.weights[q] * d * d;
        }
        EXPECT_LT(err, prev) << "p=" << p;
        if (p == 0) first = err;
        prev = err;
    }
    EXPECT_LT(prev, 1e-3 * first);
}

TEST(Dirichlet, TagsSelectFacets) {
    const Mesh mesh = generate_box(3, {0, 0, 0}, {1, 1, 1}, {2, 2, 2});
    const Layout layout(full3d(mesh, Family::nedelec2, 1));
    const auto data = boundary_data([](auto x) { return std::array{x[0], x[1], x[2]}; });
    const ConstraintSet one = build_constraints(layout, data, {"xmin"});
    const ConstraintSet two = build_constraints(layout, data, {"xmin", "xmax"});
    const ConstraintSet all = build_constraints(layout, data);
    EXPECT_GT(one.size(), 0);
    EXPECT_EQ(two.size(), 2 * one.size());
    EXPECT_GT(all.size(), two.size());
    for (const auto& [dof, c] : one.entries()) EXPECT_EQ(two.value(dof), c.value);
    EXPECT_THROW(build_constraints(layout, data, {"nowhere"}), InvalidParam);
}

TEST(Dirichlet, MicrodistortionFreeWithoutCurvature) {
    const Mesh mesh = generate_disk(1.0, 2);
    const Layout layout(antiplane(mesh, Family::nedelec1, 1, 0.0));
    const ConstraintSet cs = build_constraints(layout, boundary_data([](auto x) { return std::array{x[0], x[1], x[2]}; }));
    for (const auto& [dof, c] : cs.entries()) EXPECT_LT(dof, layout.p().offset);
}

TEST(Dirichlet, ConstraintSetRejectsDuplicates) {
    ConstraintSet cs;
    cs.set(3, 1.0, Provenance::vertex);
    EXPECT_THROW(cs.set(3, 2.0, Provenance::edge), BadIndex);
    EXPECT_THROW(cs.value(4), BadIndex);
    EXPECT_THROW(cs.lift(2), BadIndex);
    EXPECT_EQ(cs.lift(5)(3), 1.0);
}
