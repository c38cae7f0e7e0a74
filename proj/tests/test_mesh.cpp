#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "mmfem/errors.hpp"
#include "mmfem/mesh.hpp"

using namespace mmfem;

TEST(Mesh, ReferenceTriangle) {
    const Mesh m = build(2, {{0, 0, 0}, {0, 1, 0}, {1, 0, 0}}, {{2, 0, 1}});
    EXPECT_EQ(m.cells[0], (std::array<int, 4>{0, 1, 2, -1}));
    EXPECT_NEAR(std::abs(m.maps[0].det), 1.0, 1e-15);
    EXPECT_TRUE(m.maps[0].J.isIdentity(1e-15));
}

TEST(Mesh, ReferenceTetrahedron) {
    const Mesh m = build(3, {{0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {1, 0, 0}}, {{0, 1, 2, 3}});
    EXPECT_NEAR(std::abs(m.maps[0].det), 1.0, 1e-15);
    EXPECT_TRUE(m.maps[0].J.isIdentity(1e-15));
    EXPECT_EQ(m.num_edges(), 6);
    EXPECT_EQ(m.num_faces(), 4);
    EXPECT_EQ(m.boundary_facets.size(), 4u);
}

TEST(Mesh, TwoTrianglesShareOneEdge) {
    const Mesh m = build(2, {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}, {{0, 1, 2}, {0, 2, 3}});
    EXPECT_EQ(m.num_edges(), 5);
    EXPECT_EQ(m.boundary_facets.size(), 4u);
    int interior = 0;
    for (const auto& ec : m.edge_cells) interior += ec.size() == 2;
    EXPECT_EQ(interior, 1);
}

TEST(Mesh, BuildErrors) {
    EXPECT_THROW(build(2, {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}, {{0, 1, 2}}), DegenerateCell);
    EXPECT_THROW(build(2, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 5}}), BadIndex);
    EXPECT_THROW(build(2, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1}}), BadIndex);
    EXPECT_THROW(build(2, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}}, {{"x", {{0, 3}}}}), BadIndex);
}

TEST(Mesh, BoxCounts) {
    EXPECT_EQ(generate_box(3, {-1, -1, -1}, {1, 1, 1}, {2, 2, 2}).num_cells(), 48);
    EXPECT_EQ(generate_box(3, {-1, -1, -1}, {1, 1, 1}, {4, 4, 4}).num_cells(), 384);
    EXPECT_EQ(generate_box(2, {0, 0, 0}, {1, 1, 0}, {3, 2, 1}).num_cells(), 12);
    EXPECT_THROW(generate_box(3, {0, 0, 0}, {1, 1, 1}, {0, 1, 1}), InvalidParam);
}

TEST(Mesh, BoxTags) {
    const Mesh m = generate_box(3, {-1, -1, -1}, {1, 1, 1}, {2, 2, 2});
    std::size_t tagged = 0;
    for (const auto& [label, facets] : m.boundary_tags) {
        EXPECT_EQ(facets.size(), 8u) << label;
        tagged += facets.size();
    }
    EXPECT_EQ(tagged, m.boundary_facets.size());
}

TEST(Mesh, DiskBoundaryOnCircle) {
    const Mesh m = generate_disk(10.0, 3);
    EXPECT_EQ(m.num_cells(), 54);
    for (int v = 0; v < m.num_vertices(); ++v)
        if (m.boundary_vertex[v])
            EXPECT_NEAR(std::hypot(m.vertices[v][0], m.vertices[v][1]), 10.0, 1e-12);
    EXPECT_EQ(m.boundary_tags.at("boundary").size(), 18u);
    EXPECT_THROW(generate_disk(-1, 2), InvalidParam);
}

TEST(MeshProperty, OrientationAndSharing) {
    for (const Mesh& m : {generate_box(3, {0, 0, 0}, {1, 2, 3}, {2, 3, 2}), generate_disk(2.0, 5)}) {
        for (int c = 0; c < m.num_cells(); ++c) {
            for (int a = 0; a < m.dim; ++a) EXPECT_LT(m.cells[c][a], m.cells[c][a + 1]);
            const auto le = edge_vertices(m.dim);
            for (std::size_t e = 0; e < le.size(); ++e) {
                const auto& ge = m.edges[m.cell_edges[c][e]];
                EXPECT_EQ(ge[0], m.cells[c][le[e][0]]);
                EXPECT_EQ(ge[1], m.cells[c][le[e][1]]);
            }
        }
        for (const auto& ec : m.edge_cells) EXPECT_GE(ec.size(), 1u);
        const auto& fc = m.dim == 2 ? m.edge_cells : m.face_cells;
        for (const auto& cells : fc) EXPECT_LE(cells.size(), 2u);
    }
}

TEST(MeshProperty, VolumeAdditivity) {
    EXPECT_NEAR(total_volume(generate_box(3, {-1, -1, -1}, {1, 1, 1}, {3, 2, 4})), 8.0, 1e-10);
    EXPECT_NEAR(total_volume(generate_box(2, {0, 0, 0}, {2, 3, 0}, {4, 5, 1})), 6.0, 1e-10);
    double prev_deficit = 1e300;
    for (int rings : {2, 4, 8, 16}) {
        const double deficit = std::numbers::pi * 100 - total_volume(generate_disk(10, rings));
        EXPECT_GT(deficit, 0.0);
        EXPECT_LT(deficit, prev_deficit);
        prev_deficit = deficit;
    }
}

TEST(MeshProperty, PushPullRoundTrip) {
    const Mesh m = generate_box(3, {0, 0, 0}, {1, 1, 1}, {2, 2, 2});
    for (int c = 0; c < m.num_cells(); ++c) {
        const RefPoint x{0.2, 0.3, 0.1};
        const RefPoint back = pull_back(m, c, push_forward(m, c, x));
        EXPECT_NEAR(back.xi, x.xi, 1e-14);
        EXPECT_NEAR(back.eta, x.eta, 1e-14);
        EXPECT_NEAR(back.zeta, x.zeta, 1e-14);
        EXPECT_EQ(locate(m, push_forward(m, c, {0.25, 0.25, 0.25})), c);
    }
    EXPECT_EQ(locate(m, {2, 0, 0}), -1);
}

TEST(MeshIO, RoundTrip) {
    const Mesh m = generate_box(3, {-1, -1, -1}, {1, 1, 1}, {2, 2, 2});
    const auto path = std::filesystem::temp_directory_path() / "mmfem_mesh_roundtrip.json";
    write_json(m, path.string());
    const Mesh r = read_json(path.string());
    std::filesystem::remove(path);
    EXPECT_EQ(r.vertices, m.vertices);
    EXPECT_EQ(r.cells, m.cells);
    EXPECT_EQ(r.num_edges(), m.num_edges());
    EXPECT_EQ(r.num_faces(), m.num_faces());
    EXPECT_EQ(r.boundary_tags, m.boundary_tags);
}

TEST(MeshIO, Errors) {
    EXPECT_THROW(from_json_string(R"({"dim": 2, "vertices": [[0,0],[1,0],[0,1]]})"), ParseError);
    EXPECT_THROW(from_json_string(R"({"dim": 2, "vertices": [[0,0],[1]], "cells": []})"), ParseError);
    EXPECT_THROW(from_json_string("{not json"), ParseError);
    EXPECT_THROW(read_json("/nonexistent/mesh.json"), ParseError);
    try {
        from_json_string(R"({"dim": 2, "vertices": [[0,0]]})");
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("cells"), std::string::npos);
    }
}
