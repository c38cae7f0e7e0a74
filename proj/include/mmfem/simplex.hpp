#pragma once

#include <array>
#include <span>
#include <vector>

namespace mmfem {

// Bezier index on the reference triangle (i,j) or tetrahedron (i,j,k).
// i is the exponent of xi, j of eta, k of zeta.
struct MultiIndex {
    int dim = 2;
    int p = 0;
    int i = 0, j = 0, k = 0;

    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

enum class PolytopeKind { vertex, edge, face, cell };

// Local ids: vertices v1..v4 -> 0..3; edges e12,e13,(e14,)e23,(e24,e34) -> 0..;
// faces f123,f124,f134,f234 -> 0..3; the cell is 0.
struct Polytope {
    PolytopeKind kind = PolytopeKind::cell;
    int local = 0;

    friend bool operator==(const Polytope&, const Polytope&) = default;
};

struct CollapsedPoint {
    double a = 0.0, b = 0.0, c = 0.0;
};

struct RefPoint {
    double xi = 0.0, eta = 0.0, zeta = 0.0;
};

inline constexpr double kCollapseEps = 1e-12;
inline constexpr double kInverseEps = 1e-14;

int num_vertices(int dim);
int num_edges(int dim);
int num_faces(int dim);  // two-dimensional sub-simplices; the triangle itself in 2D

// Local vertex tuples, ascending, in the numbering above.
std::span<const std::array<int, 2>> edge_vertices(int dim);
std::span<const std::array<int, 3>> face_vertices();  // tetrahedron only

int edge_id(int dim, int va, int vb);
int face_id(int va, int vb, int vc);

RefPoint vertex_point(int dim, int v);
// Barycentric coordinates ordered by local vertex: (1-xi-eta, eta, xi) in 2D,
// (1-xi-eta-zeta, zeta, eta, xi) in 3D.
std::array<double, 4> barycentric(int dim, const RefPoint& x);
// Gradient of barycentric coordinate v with respect to (xi, eta, zeta).
std::array<double, 3> barycentric_gradient(int dim, int v);
// Exponents of the barycentric coordinates in b_{ijk}, ordered by local vertex.
std::array<int, 4> exponents(const MultiIndex& mi);

RefPoint duffy_forward(int dim, const CollapsedPoint& cp);
CollapsedPoint duffy_inverse(int dim, const RefPoint& x);

int bezier_count(int dim, int p);
std::vector<MultiIndex> traversal_order(int p, int dim);
// Position of mi within traversal_order(mi.p, mi.dim).
int traversal_position(const MultiIndex& mi);
Polytope classify(const MultiIndex& mi);

// Values and reference gradients of all Bezier functions of one degree,
// stored in traversal order. Gradients always carry three slots.
struct ShapeSet {
    int dim = 2;
    int degree = 0;
    std::vector<double> values;
    std::vector<std::array<double, 3>> grads;

    int size() const { return static_cast<int>(values.size()); }
};

// Factorized evaluation through the collapsed coordinates.
void bezier_eval(int dim, int p, const CollapsedPoint& cp, ShapeSet& out);
ShapeSet bezier_tri_eval(int p, const CollapsedPoint& cp);
ShapeSet bezier_tet_eval(int p, const CollapsedPoint& cp);

// Closed-form evaluation from barycentric products; valid on the closed simplex.
void bezier_eval_closed(int dim, int p, const RefPoint& x, ShapeSet& out);
ShapeSet bezier_eval_closed(int dim, int p, const RefPoint& x);

}  // namespace mmfem
