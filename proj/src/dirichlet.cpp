#include "mmfem/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mmfem/errors.hpp"

namespace mmfem {

void ConstraintSet::set(int dof, double value, Provenance from) {
    if (!map_.emplace(dof, Constraint{value, from}).second)
        throw BadIndex("dof " + std::to_string(dof) + " constrained twice");
}

double ConstraintSet::value(int dof) const {
    const auto it = map_.find(dof);
    if (it == map_.end()) throw BadIndex("dof " + std::to_string(dof) + " is not constrained");
    return it->second.value;
}

Eigen::VectorXd ConstraintSet::lift(int n) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
    for (const auto& [dof, c] : map_) {
        if (dof < 0 || dof >= n) throw BadIndex("constrained dof outside the system");
        g(dof) = c.value;
    }
    return g;
}

namespace {

Eigen::Vector3d vec(const Point& p) { return {p[0], p[1], p[2]}; }

int index_of(std::span<const int> range, int value) {
    const auto it = std::find(range.begin(), range.end(), value);
    return it == range.end() ? -1 : static_cast<int>(it - range.begin());
}

// Target gradient sampled in the cell that carries the projection.
using CellTarget = std::function<Vec3(int cell, const RefPoint& ref, const Point& x)>;

EntityProjection project_impl(const DofMap& map, PolytopeKind kind, int entity, const CellTarget& grad,
                              const std::function<double(int)>& known) {
    const Mesh& mesh = map.mesh();
    const SpaceDescriptor& sp = map.space();
    const int dim = mesh.dim;
    const bool h1 = sp.family == Family::h1;
    if (kind != PolytopeKind::edge && !(kind == PolytopeKind::face && dim == 3))
        throw InvalidParam("boundary projections act on edges, or faces of a 3D mesh");

    std::vector<int> verts;
    int cell = 0, local = 0;
    if (kind == PolytopeKind::edge) {
        verts.assign(mesh.edges.at(entity).begin(), mesh.edges.at(entity).end());
        cell = *std::min_element(mesh.edge_cells[entity].begin(), mesh.edge_cells[entity].end());
        local = index_of(std::span<const int>(mesh.cell_edges[cell].data(), num_edges(dim)), entity);
    } else {
        verts.assign(mesh.faces.at(entity).begin(), mesh.faces.at(entity).end());
        cell = *std::min_element(mesh.face_cells[entity].begin(), mesh.face_cells[entity].end());
        local = index_of(std::span<const int>(mesh.cell_faces[cell].data(), 4), entity);
    }

    EntityProjection out;
    std::vector<int> owned_local, fixed_local;
    const auto& ldofs = map.local();
    for (int i = 0; i < static_cast<int>(ldofs.size()); ++i) {
        const Polytope& poly = ldofs[i].polytope;
        const int gid = map.entity(cell, poly);
        const int dof = map.global(poly.kind, gid, ldofs[i].ordinal);
        if (poly.kind == kind && poly.local == local) {
            owned_local.push_back(i);
            out.dofs.push_back(dof);
        } else if ((poly.kind == PolytopeKind::vertex && index_of(verts, gid) >= 0) ||
                   (poly.kind == PolytopeKind::edge && kind == PolytopeKind::face &&
                    index_of(verts, mesh.edges[gid][0]) >= 0 && index_of(verts, mesh.edges[gid][1]) >= 0)) {
            fixed_local.push_back(i);
            out.fixed.push_back(dof);
        }
    }
    const int nu = static_cast<int>(owned_local.size());
    const int nf = static_cast<int>(fixed_local.size());
    out.K = Eigen::MatrixXd::Zero(nu, nu);
    out.K_fixed = Eigen::MatrixXd::Zero(nu, nf);
    out.load = Eigen::VectorXd::Zero(nu);
    out.values = Eigen::VectorXd::Zero(nu);
    if (nu == 0) return out;

    // Local vertex positions of the entity inside the cell, and entity geometry.
    std::array<RefPoint, 3> rv{};
    std::array<Eigen::Vector3d, 3> xv;
    for (std::size_t k = 0; k < verts.size(); ++k) {
        rv[k] = vertex_point(dim, index_of(std::span<const int>(mesh.cells[cell].data(), dim + 1), verts[k]));
        xv[k] = vec(mesh.vertices[verts[k]]);
    }
    const double scale = 1.0 + xv[0].norm();
    Eigen::Vector3d tangent = xv[1] - xv[0], normal = Eigen::Vector3d::Zero();
    double measure = tangent.norm();
    if (kind == PolytopeKind::edge) {
        if (measure <= 1e-14 * scale) throw SingularEdge("edge " + std::to_string(entity) + " has zero length");
        tangent /= measure;
    } else {
        normal = (xv[1] - xv[0]).cross(xv[2] - xv[0]);
        measure = normal.norm();
        if (measure <= 1e-14 * scale * scale) throw DegenerateFace("face " + std::to_string(entity) + " has zero area");
        normal /= measure;
    }

    const int top = h1 ? sp.degree : sp.degree + 1;
    const int qdeg = std::min(2 * (top + 1), kMaxQuadratureDegree);
    std::vector<std::array<double, 3>> bary;
    std::vector<double> weights;
    if (kind == PolytopeKind::edge) {
        const LineRule& lr = gauss_legendre01(qdeg / 2 + 1);
        for (std::size_t q = 0; q < lr.points.size(); ++q) {
            bary.push_back({1 - lr.points[q], lr.points[q], 0});
            weights.push_back(lr.weights[q] * measure);
        }
    } else {
        const QuadratureRule& rule = rule_for(2, qdeg);
        for (int q = 0; q < rule.size(); ++q) {
            const auto b = barycentric(2, rule.simplex_points[q]);
            bary.push_back({b[0], b[1], b[2]});
            weights.push_back(rule.weights[q] * measure);
        }
    }
    std::vector<RefPoint> points;
    for (const auto& b : bary) {
        RefPoint r;
        for (std::size_t k = 0; k < verts.size(); ++k) {
            r.xi += b[k] * rv[k].xi;
            r.eta += b[k] * rv[k].eta;
            r.zeta += b[k] * rv[k].zeta;
        }
        points.push_back(r);
    }
    const RefTable tab = tabulate_at(sp, points);
    const AffineMap& am = mesh.maps[cell];

    // Features whose Gram matrix is the local projection operator.
    const int nfeat = kind == PolytopeKind::edge ? 1 : h1 ? 3 : 4;
    const Eigen::Matrix3d tang_proj = Eigen::Matrix3d::Identity() - normal * normal.transpose();
    auto feature = [&](const Eigen::Vector3d& v, double curl_n) {
        Eigen::Vector4d f = Eigen::Vector4d::Zero();
        if (kind == PolytopeKind::edge) {
            f(0) = v.dot(tangent);
        } else {
            f.head<3>() = tang_proj * v;
            f(3) = curl_n;
        }
        return f;
    };
    Eigen::MatrixXd Fo(nfeat, nu), Ff(nfeat, nf);
    for (std::size_t q = 0; q < points.size(); ++q) {
        const double w = weights[q];
        const Point x = push_forward(mesh, cell, points[q]);
        const Eigen::Vector4d target = feature(vec(grad(cell, points[q], x)), 0.0);
        auto fill = [&](const std::vector<int>& which, Eigen::MatrixXd& F) {
            for (std::size_t k = 0; k < which.size(); ++k) {
                const int i = which[k] + q * tab.n;
                const Vec3 v = h1 ? map_gradient(am, tab.vec[i]) : map_covariant(am, tab.vec[i]);
                const double cn = h1 ? 0.0 : vec(map_curl(dim, am, tab.curl[i])).dot(normal);
                F.col(k) = feature(vec(v), cn).head(nfeat);
            }
        };
        fill(owned_local, Fo);
        fill(fixed_local, Ff);
        out.K.noalias() += w * Fo.transpose() * Fo;
        out.K_fixed.noalias() += w * Fo.transpose() * Ff;
        out.load.noalias() += w * Fo.transpose() * target.head(nfeat);
    }

    Eigen::VectorXd g(nf);
    for (int k = 0; k < nf; ++k) g(k) = known(out.fixed[k]);
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(out.K);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        throw DegenerateFace("local boundary projection is singular");
    out.values = ldlt.solve(out.load - out.K_fixed * g);
    return out;
}

}  // namespace

EntityProjection project_entity(const DofMap& map, PolytopeKind kind, int entity,
                                const std::function<Vec3(const Point&)>& grad,
                                const std::function<double(int)>& known) {
    return project_impl(map, kind, entity, [&](int, const RefPoint&, const Point& x) { return grad(x); }, known);
}

namespace {

std::vector<int> selected_facets(const Mesh& mesh, const std::vector<std::string>& tags) {
    if (tags.empty()) return mesh.boundary_facets;
    std::set<int> facets;
    for (const auto& t : tags) {
        const auto it = mesh.boundary_tags.find(t);
        if (it == mesh.boundary_tags.end()) throw InvalidParam("unknown boundary tag '" + t + "'");
        facets.insert(it->second.begin(), it->second.end());
    }
    return {facets.begin(), facets.end()};
}

struct BoundaryEntities {
    std::vector<int> vertices, edges, faces;
};

BoundaryEntities closure(const Mesh& mesh, const std::vector<int>& facets) {
    std::set<int> v, e, f;
    if (mesh.dim == 2) {
        for (int k : facets) {
            e.insert(k);
            v.insert(mesh.edges[k].begin(), mesh.edges[k].end());
        }
    } else {
        std::map<std::pair<int, int>, int> edge_id;
        for (int k = 0; k < mesh.num_edges(); ++k) edge_id[{mesh.edges[k][0], mesh.edges[k][1]}] = k;
        for (int k : facets) {
            f.insert(k);
            const auto& fv = mesh.faces[k];
            v.insert(fv.begin(), fv.end());
            e.insert(edge_id.at({fv[0], fv[1]}));
            e.insert(edge_id.at({fv[0], fv[2]}));
            e.insert(edge_id.at({fv[1], fv[2]}));
        }
    }
    return {{v.begin(), v.end()}, {e.begin(), e.end()}, {f.begin(), f.end()}};
}

// Edge then face projections of one scalar component (H1) or one row (H(curl)).
void project_block(const DofMap& map, int offset, const BoundaryEntities& be, const CellTarget& grad,
                   ConstraintSet& cs) {
    const auto known = [&](int id) { return cs.value(offset + id); };
    for (int e : be.edges) {
        const EntityProjection pr = project_impl(map, PolytopeKind::edge, e, grad, known);
        for (std::size_t k = 0; k < pr.dofs.size(); ++k) cs.set(offset + pr.dofs[k], pr.values(k), Provenance::edge);
    }
    for (int f : be.faces) {
        const EntityProjection pr = project_impl(map, PolytopeKind::face, f, grad, known);
        for (std::size_t k = 0; k < pr.dofs.size(); ++k) cs.set(offset + pr.dofs[k], pr.values(k), Provenance::face);
    }
}

}  // namespace

ConstraintSet build_constraints(const Layout& layout, const BoundaryData& data,
                                const std::vector<std::string>& tags, bool constrain_p) {
    if (!data.value || !data.gradient) throw InvalidParam("boundary data needs a value and a gradient");
    const Mesh& mesh = layout.mesh();
    const BoundaryEntities be = closure(mesh, selected_facets(mesh, tags));
    ConstraintSet cs;

    const FieldBlock& ub = layout.u();
    for (int c = 0; c < ub.components; ++c) {
        const int offset = ub.offset + c * ub.map.size();
        for (int v : be.vertices)
            cs.set(offset + ub.map.global(PolytopeKind::vertex, v, 0), data.value(mesh.vertices[v])[c],
                   Provenance::vertex);
        const auto grad = [&](int, const RefPoint&, const Point& x) {
            const Eigen::Matrix3d g = data.gradient(x);
            return Vec3{g(c, 0), g(c, 1), g(c, 2)};
        };
        project_block(ub.map, offset, be, grad, cs);
    }
    if (layout.has_p() && constrain_p) {
        const FieldBlock& pb = layout.p();
        // Rows of P take the surface gradient of the discrete displacement trace, not of the exact data,
        // so P = grad u_h stays admissible and the curl penalty cannot lock as Lc grows.
        for (int r = 0; r < pb.components; ++r) {
            const int offset = ub.offset + r * ub.map.size();
            const auto grad = [&](int cell, const RefPoint& ref, const Point&) {
                const RefTable tab = tabulate_at(ub.map.space(), std::span<const RefPoint>(&ref, 1));
                const std::vector<int> dofs = ub.map.cell_dofs(cell);
                Vec3 v{0, 0, 0};
                for (int i = 0; i < tab.n; ++i) {
                    const int id = offset + dofs[i];
                    if (!cs.contains(id)) continue;  // vanishes on the facet
                    const Vec3 gi = map_gradient(mesh.maps[cell], tab.vec[i]);
                    const double c = cs.value(id);
                    for (int d = 0; d < 3; ++d) v[d] += c * gi[d];
                }
                return v;
            };
            project_block(pb.map, pb.offset + r * pb.map.size(), be, grad, cs);
        }
    }
    return cs;
}

ConstraintSet build_constraints(const Layout& layout, const BoundaryData& data, const std::vector<std::string>& tags) {
    const bool constrain_p = layout.problem().model != Model::cauchy && layout.problem().params.Lc > 0;
    return build_constraints(layout, data, tags, constrain_p);
}

}  // namespace mmfem
