#include "mmfem/space.hpp"

#include <map>
#include <string>

#include "mmfem/errors.hpp"

namespace mmfem {

namespace {

void check_space(const SpaceDescriptor& s) {
    if (s.dim != 2 && s.dim != 3) throw InvalidParam("space dimension must be 2 or 3");
    if (s.family == Family::h1 && s.degree < 1) throw InvalidParam("H1 degree must be at least 1");
    if (s.family == Family::nedelec1 && s.degree < 0) throw InvalidParam("Nedelec degree must be nonnegative");
    if (s.family == Family::nedelec2 && s.degree < 1) throw InvalidParam("second family degree must be at least 1");
}

}  // namespace

std::vector<LocalDof> local_dofs(const SpaceDescriptor& space) {
    check_space(space);
    std::vector<LocalDof> out;
    std::map<std::pair<int, int>, int> seen;
    auto add = [&](const Polytope& poly) {
        int& count = seen[{static_cast<int>(poly.kind), poly.local}];
        out.push_back({poly, count++});
    };
    if (space.family == Family::h1)
        for (const auto& mi : traversal_order(space.degree, space.dim)) add(classify(mi));
    else
        for (const auto& f : nedelec_basis(space)) add(f.polytope);
    return out;
}

int local_dimension(const SpaceDescriptor& space) {
    if (space.family == Family::h1) return bezier_count(space.dim, space.degree);
    return nedelec_dimension(space.family, space.dim, space.degree);
}

DofMap::DofMap(const Mesh& mesh, const SpaceDescriptor& space) : mesh_(&mesh), space_(space) {
    if (mesh.dim != space.dim) throw SpaceMismatch("space dimension differs from the mesh");
    local_ = local_dofs(space);
    for (const auto& d : local_) {
        int& n = per_[static_cast<int>(d.polytope.kind)];
        n = std::max(n, d.ordinal + 1);
    }
    const std::array<int, 4> counts{mesh.num_vertices(), mesh.num_edges(), mesh.dim == 3 ? mesh.num_faces() : 0,
                                     mesh.num_cells()};
    int base = 0;
    for (int k = 0; k < 4; ++k) {
        base_[k] = base;
        base += per_[k] * counts[k];
    }
    total_ = base;
}

int DofMap::global(PolytopeKind kind, int entity, int ordinal) const {
    const int k = static_cast<int>(kind);
    return base_[k] + entity * per_[k] + ordinal;
}

int DofMap::entity(int cell, const Polytope& poly) const {
    switch (poly.kind) {
        case PolytopeKind::vertex: return mesh_->cells[cell][poly.local];
        case PolytopeKind::edge: return mesh_->cell_edges[cell][poly.local];
        case PolytopeKind::face: return mesh_->cell_faces[cell][poly.local];
        case PolytopeKind::cell: return cell;
    }
    return -1;
}

void DofMap::cell_dofs(int cell, std::span<int> out) const {
    for (std::size_t i = 0; i < local_.size(); ++i)
        out[i] = global(local_[i].polytope.kind, entity(cell, local_[i].polytope), local_[i].ordinal);
}

std::vector<int> DofMap::cell_dofs(int cell) const {
    std::vector<int> out(local_.size());
    cell_dofs(cell, out);
    return out;
}

RefTable tabulate(const SpaceDescriptor& space, const QuadratureRule& rule) {
    RefTable t;
    t.space = space;
    t.n = local_dimension(space);
    t.nq = rule.size();
    t.value.resize(std::size_t(t.n) * t.nq);
    t.vec.resize(t.value.size());
    if (space.family != Family::h1) t.curl.resize(t.value.size());
    ShapeSet s;
    VectorShapeSet v;
    for (int q = 0; q < t.nq; ++q) {
        if (space.family == Family::h1) {
            bezier_eval(space.dim, space.degree, rule.points[q], s);
            for (int i = 0; i < t.n; ++i) {
                t.value[q * t.n + i] = s.values[i];
                t.vec[q * t.n + i] = s.grads[i];
            }
        } else {
            eval_vector_shapes(space, rule.points[q], v);
            for (int i = 0; i < t.n; ++i) {
                t.vec[q * t.n + i] = v.values[i];
                t.curl[q * t.n + i] = v.curls[i];
            }
        }
    }
    return t;
}

RefTable tabulate_at(const SpaceDescriptor& space, std::span<const RefPoint> points) {
    RefTable t;
    t.space = space;
    t.n = local_dimension(space);
    t.nq = static_cast<int>(points.size());
    t.value.resize(std::size_t(t.n) * t.nq);
    t.vec.resize(t.value.size());
    if (space.family != Family::h1) t.curl.resize(t.value.size());
    ShapeSet s;
    VectorShapeSet v;
    for (int q = 0; q < t.nq; ++q) {
        if (space.family == Family::h1) {
            bezier_eval_closed(space.dim, space.degree, points[q], s);
            for (int i = 0; i < t.n; ++i) {
                t.value[q * t.n + i] = s.values[i];
                t.vec[q * t.n + i] = s.grads[i];
            }
        } else {
            eval_vector_shapes_closed(space, points[q], v);
            for (int i = 0; i < t.n; ++i) {
                t.vec[q * t.n + i] = v.values[i];
                t.curl[q * t.n + i] = v.curls[i];
            }
        }
    }
    return t;
}

Vec3 map_gradient(const AffineMap& m, const Vec3& g) {
    const Eigen::Vector3d r = m.inv_JT * Eigen::Vector3d(g[0], g[1], g[2]);
    return {r[0], r[1], r[2]};
}

Vec3 map_covariant(const AffineMap& m, const Vec3& v) { return map_gradient(m, v); }

Vec3 map_curl(int dim, const AffineMap& m, const Vec3& c) {
    if (dim == 2) return {c[0] / m.det, 0.0, 0.0};
    const Eigen::Vector3d r = m.J * Eigen::Vector3d(c[0], c[1], c[2]) / m.det;
    return {r[0], r[1], r[2]};
}

}  // namespace mmfem
