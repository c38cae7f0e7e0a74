#pragma once

#include <Eigen/Dense>
#include <array>
#include <map>
#include <string>
#include <vector>

#include "mmfem/simplex.hpp"

namespace mmfem {

using Point = std::array<double, 3>;

// x = origin + J * (xi, eta, zeta). In 2D the third row/column is padded with identity.
// Columns of J follow the reference vertex roles: xi -> last local vertex, zeta (3D) -> second.
struct AffineMap {
    Point origin{};
    Eigen::Matrix3d J = Eigen::Matrix3d::Identity();
    Eigen::Matrix3d inv_JT = Eigen::Matrix3d::Identity();
    double det = 1.0;  // signed; integration uses |det|
};

struct Mesh {
    int dim = 2;
    std::vector<Point> vertices;
    // Vertex ids, sorted ascending; only the first dim+1 entries are used.
    std::vector<std::array<int, 4>> cells;
    std::vector<std::array<int, 2>> edges;
    std::vector<std::array<int, 3>> faces;  // triangles of a 3D mesh; empty in 2D
    // Global entity id for each local edge/face of a cell.
    std::vector<std::array<int, 6>> cell_edges;
    std::vector<std::array<int, 4>> cell_faces;
    std::vector<std::vector<int>> edge_cells, face_cells;
    std::vector<AffineMap> maps;

    // Boundary facets are edges in 2D and faces in 3D.
    std::vector<int> boundary_facets;
    std::vector<char> boundary_vertex, boundary_edge, boundary_face;
    std::map<std::string, std::vector<int>> boundary_tags;  // label -> facet ids

    int num_cells() const { return static_cast<int>(cells.size()); }
    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_edges() const { return static_cast<int>(edges.size()); }
    int num_faces() const { return static_cast<int>(faces.size()); }
    int num_facets() const { return dim == 2 ? num_edges() : num_faces(); }
    std::vector<int> facet_vertices(int facet) const;
    // Facet id for a vertex tuple in any order; throws BadIndex when absent.
    int find_facet(std::vector<int> verts) const;
};

// Tags map a label to facets given as vertex-id tuples.
using FacetTags = std::map<std::string, std::vector<std::vector<int>>>;

Mesh build(int dim, std::vector<Point> vertices, std::vector<std::vector<int>> cells, const FacetTags& tags = {});

// Rectangle (2 triangles per quad) or box (6 tetrahedra per hexahedron).
// Facets on the bounding faces are tagged xmin, xmax, ymin, ymax, zmin, zmax.
Mesh generate_box(int dim, const Point& lo, const Point& hi, const std::array<int, 3>& n);
// Concentric rings: ring k carries 6k vertices; 6 rings^2 triangles; facets tagged "boundary".
Mesh generate_disk(double radius, int rings);
Mesh generate_disk_h(double radius, double target_h);

Point push_forward(const Mesh& mesh, int cell, const RefPoint& x);
RefPoint pull_back(const Mesh& mesh, int cell, const Point& x);
double cell_volume(const Mesh& mesh, int cell);
double total_volume(const Mesh& mesh);

// Lowest-id cell containing x within a barycentric tolerance; -1 when none does.
int locate(const Mesh& mesh, const Point& x, double tol = 1e-12);

// JSON schema: {"dim": 2|3, "vertices": [[x,y(,z)],...], "cells": [[ids],...],
//               "boundary_tags": {"label": [[facet vertex ids],...]}}
void write_json(const Mesh& mesh, const std::string& path);
Mesh read_json(const std::string& path);
std::string to_json_string(const Mesh& mesh);
Mesh from_json_string(const std::string& text);

}  // namespace mmfem
