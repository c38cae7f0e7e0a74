#pragma once

#include <span>
#include <vector>

#include "mmfem/mesh.hpp"
#include "mmfem/nedelec.hpp"
#include "mmfem/quadrature.hpp"

namespace mmfem {

// Local shape function owner: polytope and position among the functions on it.
struct LocalDof {
    Polytope polytope;
    int ordinal = 0;
};

// Local functions of one element, with the polytope that owns each.
std::vector<LocalDof> local_dofs(const SpaceDescriptor& space);
int local_dimension(const SpaceDescriptor& space);

// Global numbering of one scalar (H1) or vector (Nedelec) component.
// Entities of a kind are numbered contiguously: base + entity id * per_entity + ordinal.
class DofMap {
public:
    DofMap(const Mesh& mesh, const SpaceDescriptor& space);

    const SpaceDescriptor& space() const { return space_; }
    const Mesh& mesh() const { return *mesh_; }
    int size() const { return total_; }
    int local_size() const { return static_cast<int>(local_.size()); }
    const std::vector<LocalDof>& local() const { return local_; }
    int per_entity(PolytopeKind kind) const { return per_[static_cast<int>(kind)]; }
    int global(PolytopeKind kind, int entity, int ordinal) const;
    // Global ids of the local functions of a cell, in local order.
    void cell_dofs(int cell, std::span<int> out) const;
    std::vector<int> cell_dofs(int cell) const;
    // Global entity id of a local polytope of a cell.
    int entity(int cell, const Polytope& poly) const;

private:
    const Mesh* mesh_;
    SpaceDescriptor space_;
    std::vector<LocalDof> local_;
    std::array<int, 4> per_{};
    std::array<int, 4> base_{};
    int total_ = 0;
};

// Reference values of a space at a set of points.
// H1: value[q*n+i] and vec = reference gradient. Nedelec: vec = value, curl = reference curl (rot in [0]).
struct RefTable {
    SpaceDescriptor space;
    int n = 0;
    int nq = 0;
    std::vector<double> value;
    std::vector<Vec3> vec;
    std::vector<Vec3> curl;
};

RefTable tabulate(const SpaceDescriptor& space, const QuadratureRule& rule);
// Closed-form path; valid on the closed reference simplex.
RefTable tabulate_at(const SpaceDescriptor& space, std::span<const RefPoint> points);

// Physical quantities from reference ones under the affine map.
Vec3 map_gradient(const AffineMap& m, const Vec3& g);  // J^{-T} g
Vec3 map_covariant(const AffineMap& m, const Vec3& v);  // J^{-T} v
Vec3 map_curl(int dim, const AffineMap& m, const Vec3& c);  // J c / det, or rot / det in 2D

}  // namespace mmfem
