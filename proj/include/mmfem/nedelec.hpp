#pragma once

#include <array>
#include <vector>

#include "mmfem/simplex.hpp"

namespace mmfem {

enum class Family { h1, nedelec1, nedelec2 };

// `degree` is the Bezier degree for h1 and the Nedelec index otherwise.
struct SpaceDescriptor {
    Family family = Family::h1;
    int degree = 1;
    int dim = 2;

    friend bool operator==(const SpaceDescriptor&, const SpaceDescriptor&) = default;
};

enum class ShapeKind { lowest_order, template_vector, gradient, nongradient_cell };

using Vec3 = std::array<double, 3>;
// Coefficients of the lowest-order functions, one per local edge.
using WhitneyCombo = std::array<double, 6>;

struct VectorShapeFn {
    Polytope polytope;
    ShapeKind kind = ShapeKind::template_vector;
    // template_vector: degree p; gradient: degree p+1; nongradient_cell: degree p+2.
    MultiIndex index;
    // Constant template vector, or e_j for a nongradient cell function.
    Vec3 vector{};
    // Lowest-order combination; a template multiplies it when `on_whitney` is set.
    WhitneyCombo whitney{};
    bool on_whitney = false;
    // Gradient weight alpha_j/(p+2) of a nongradient cell function.
    double gradient_weight = 0.0;
    // Traversal positions of the scalar factors, filled on construction.
    int scalar_pos = -1;
    int aux_pos = -1;
};

std::vector<VectorShapeFn> nedelec2_tri(int p);
std::vector<VectorShapeFn> nedelec1_tri(int p);
std::vector<VectorShapeFn> nedelec2_tet(int p);
std::vector<VectorShapeFn> nedelec1_tet(int p);

// Cached basis for a Nedelec descriptor.
const std::vector<VectorShapeFn>& nedelec_basis(const SpaceDescriptor& space);

// Closed-form dimension of the Nedelec space.
int nedelec_dimension(Family family, int dim, int p);

// Lowest-order function attached to local edge e, with its constant curl (rot in slot 0 for 2D).
void whitney(int dim, int e, const RefPoint& x, Vec3& value, Vec3& curl);

// Vector values and reference curls of a whole basis; 2D rot is stored in curls[n][0].
struct VectorShapeSet {
    int dim = 2;
    std::vector<Vec3> values;
    std::vector<Vec3> curls;

    int size() const { return static_cast<int>(values.size()); }
};

void eval_vector_shapes(const SpaceDescriptor& space, const CollapsedPoint& cp, VectorShapeSet& out);
VectorShapeSet eval_vector_shapes(const SpaceDescriptor& space, const CollapsedPoint& cp);
// Same quantities through the closed-form scalar path; valid on the closed simplex.
void eval_vector_shapes_closed(const SpaceDescriptor& space, const RefPoint& x, VectorShapeSet& out);
VectorShapeSet eval_vector_shapes_closed(const SpaceDescriptor& space, const RefPoint& x);

// Combines precomputed scalar sets at degrees p, p+1, p+2 into vector shapes.
void combine_vector_shapes(const SpaceDescriptor& space, const RefPoint& x, const ShapeSet& deg_p,
                           const ShapeSet& deg_p1, const ShapeSet& deg_p2, VectorShapeSet& out);

}  // namespace mmfem
