#include "mmfem/simplex.hpp"

#include <algorithm>
#include <string>

#include "mmfem/bernstein.hpp"
#include "mmfem/dual.hpp"
#include "mmfem/errors.hpp"

namespace mmfem {

namespace {

constexpr std::array<std::array<int, 2>, 3> kTriEdges{{{0, 1}, {0, 2}, {1, 2}}};
constexpr std::array<std::array<int, 2>, 6> kTetEdges{
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
constexpr std::array<std::array<int, 3>, 4> kTetFaces{
    {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}};

void check_dim(int dim) {
    if (dim != 2 && dim != 3) throw InvalidParam("dimension must be 2 or 3");
}

}  // namespace

int num_vertices(int dim) { return dim + 1; }
int num_edges(int dim) { return dim == 2 ? 3 : 6; }
int num_faces(int dim) { return dim == 2 ? 1 : 4; }

std::span<const std::array<int, 2>> edge_vertices(int dim) {
    check_dim(dim);
    if (dim == 2) return kTriEdges;
    return kTetEdges;
}

std::span<const std::array<int, 3>> face_vertices() { return kTetFaces; }

int edge_id(int dim, int va, int vb) {
    if (va > vb) std::swap(va, vb);
    const auto edges = edge_vertices(dim);
    for (std::size_t e = 0; e < edges.size(); ++e)
        if (edges[e][0] == va && edges[e][1] == vb) return static_cast<int>(e);
    throw BadIndex("no local edge " + std::to_string(va) + "-" + std::to_string(vb));
}

int face_id(int va, int vb, int vc) {
    std::array<int, 3> t{va, vb, vc};
    std::sort(t.begin(), t.end());
    for (std::size_t f = 0; f < kTetFaces.size(); ++f)
        if (kTetFaces[f] == t) return static_cast<int>(f);
    throw BadIndex("no local face");
}

RefPoint vertex_point(int dim, int v) {
    check_dim(dim);
    if (dim == 2) {
        constexpr std::array<RefPoint, 3> pts{{{0, 0, 0}, {0, 1, 0}, {1, 0, 0}}};
        return pts.at(v);
    }
    constexpr std::array<RefPoint, 4> pts{{{0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {1, 0, 0}}};
    return pts.at(v);
}

std::array<double, 4> barycentric(int dim, const RefPoint& x) {
    if (dim == 2) return {1.0 - x.xi - x.eta, x.eta, x.xi, 0.0};
    return {1.0 - x.xi - x.eta - x.zeta, x.zeta, x.eta, x.xi};
}

std::array<double, 3> barycentric_gradient(int dim, int v) {
    if (v == 0) return dim == 2 ? std::array<double, 3>{-1, -1, 0} : std::array<double, 3>{-1, -1, -1};
    const RefPoint x = vertex_point(dim, v);
    return {x.xi, x.eta, x.zeta};
}

std::array<int, 4> exponents(const MultiIndex& mi) {
    if (mi.dim == 2) return {mi.p - mi.i - mi.j, mi.j, mi.i, 0};
    return {mi.p - mi.i - mi.j - mi.k, mi.k, mi.j, mi.i};
}

RefPoint duffy_forward(int dim, const CollapsedPoint& cp) {
    check_dim(dim);
    if (dim == 2) return {cp.a, (1.0 - cp.a) * cp.b, 0.0};
    return {cp.a, (1.0 - cp.a) * cp.b, (1.0 - cp.a) * (1.0 - cp.b) * cp.c};
}

CollapsedPoint duffy_inverse(int dim, const RefPoint& x) {
    check_dim(dim);
    const double d1 = 1.0 - x.xi;
    if (d1 < kInverseEps) throw SingularCollapse("1 - xi below tolerance");
    if (dim == 2) return {x.xi, x.eta / d1, 0.0};
    const double d2 = 1.0 - x.xi - x.eta;
    if (d2 < kInverseEps) throw SingularCollapse("1 - xi - eta below tolerance");
    return {x.xi, x.eta / d1, x.zeta / d2};
}

int bezier_count(int dim, int p) {
    if (p < 0) return 0;
    return dim == 2 ? (p + 1) * (p + 2) / 2 : (p + 1) * (p + 2) * (p + 3) / 6;
}

std::vector<MultiIndex> traversal_order(int p, int dim) {
    check_dim(dim);
    std::vector<MultiIndex> out;
    out.reserve(bezier_count(dim, p));
    for (int i = 0; i <= p; ++i)
        for (int j = 0; j <= p - i; ++j) {
            if (dim == 2) {
                out.push_back({2, p, i, j, 0});
                continue;
            }
            for (int k = 0; k <= p - i - j; ++k) out.push_back({3, p, i, j, k});
        }
    return out;
}

int traversal_position(const MultiIndex& mi) {
    const int p = mi.p;
    if (mi.i < 0 || mi.j < 0 || mi.k < 0 || mi.i + mi.j + mi.k > p)
        throw BadIndex("multi-index outside the simplex of degree " + std::to_string(p));
    auto tri = [](int q, int i, int j) { return i * (q + 1) - i * (i - 1) / 2 + j; };
    if (mi.dim == 2) return tri(p, mi.i, mi.j);
    int pos = 0;
    for (int ii = 0; ii < mi.i; ++ii) pos += bezier_count(2, p - ii);
    return pos + tri(p - mi.i, mi.j, mi.k);
}

Polytope classify(const MultiIndex& mi) {
    const auto e = exponents(mi);
    std::array<int, 4> support{};
    int n = 0;
    for (int v = 0; v <= mi.dim; ++v)
        if (e[v] > 0) support[n++] = v;
    if (mi.p == 0) return {PolytopeKind::cell, 0};
    switch (n) {
        case 1: return {PolytopeKind::vertex, support[0]};
        case 2: return {PolytopeKind::edge, edge_id(mi.dim, support[0], support[1])};
        case 3:
            if (mi.dim == 2) return {PolytopeKind::cell, 0};
            return {PolytopeKind::face, face_id(support[0], support[1], support[2])};
        default: return {PolytopeKind::cell, 0};
    }
}

void bezier_eval(int dim, int p, const CollapsedPoint& cp, ShapeSet& out) {
    check_dim(dim);
    if (cp.a > 1.0 - kCollapseEps) throw SingularCollapse("alpha at the collapsed vertex");
    if (dim == 3 && cp.b > 1.0 - kCollapseEps) throw SingularCollapse("beta at the collapsed edge");
    out.dim = dim;
    out.degree = p;
    out.values.resize(bezier_count(dim, p));
    out.grads.resize(out.values.size());

    // Scratch for the univariate factors; degree bounded by p.
    std::vector<double> va(p + 1), da(p + 1), vb(p + 1), db(p + 1), vc(p + 1), dc(p + 1);
    eval_all(p, cp.a, va, da);
    const double ia = 1.0 / (1.0 - cp.a);
    int n = 0;
    if (dim == 2) {
        for (int i = 0; i <= p; ++i) {
            eval_all(p - i, cp.b, std::span(vb).first(p - i + 1), std::span(db).first(p - i + 1));
            for (int j = 0; j <= p - i; ++j, ++n) {
                const double ga = da[i] * vb[j];
                const double gb = va[i] * db[j];
                out.values[n] = va[i] * vb[j];
                out.grads[n] = {ga + cp.b * ia * gb, ia * gb, 0.0};
            }
        }
        return;
    }
    const double ib = 1.0 / (1.0 - cp.b);
    const double s = ia * ib;
    for (int i = 0; i <= p; ++i) {
        eval_all(p - i, cp.b, std::span(vb).first(p - i + 1), std::span(db).first(p - i + 1));
        for (int j = 0; j <= p - i; ++j) {
            const int q = p - i - j;
            eval_all(q, cp.c, std::span(vc).first(q + 1), std::span(dc).first(q + 1));
            for (int k = 0; k <= q; ++k, ++n) {
                const double ga = da[i] * vb[j] * vc[k];
                const double gb = va[i] * db[j] * vc[k];
                const double gc = va[i] * vb[j] * dc[k];
                out.values[n] = va[i] * vb[j] * vc[k];
                out.grads[n] = {ga + cp.b * ia * gb + cp.c * s * gc, ia * gb + cp.c * s * gc, s * gc};
            }
        }
    }
}

ShapeSet bezier_tri_eval(int p, const CollapsedPoint& cp) {
    ShapeSet s;
    bezier_eval(2, p, cp, s);
    return s;
}

ShapeSet bezier_tet_eval(int p, const CollapsedPoint& cp) {
    ShapeSet s;
    bezier_eval(3, p, cp, s);
    return s;
}

void bezier_eval_closed(int dim, int p, const RefPoint& x, ShapeSet& out) {
    check_dim(dim);
    const auto order = traversal_order(p, dim);
    const auto lam = barycentric(dim, x);
    out.dim = dim;
    out.degree = p;
    out.values.resize(order.size());
    out.grads.resize(order.size());
    for (std::size_t n = 0; n < order.size(); ++n) {
        const auto e = exponents(order[n]);
        double coeff = 1.0;
        int rest = p;
        for (int v = 0; v <= dim; ++v) {
            coeff *= binomial(rest, e[v]);
            rest -= e[v];
        }
        out.grads[n] = {0.0, 0.0, 0.0};
        for (int d = 0; d < dim; ++d) {
            Dual prod{coeff, 0.0};
            for (int v = 0; v <= dim; ++v)
                prod *= pow(Dual{lam[v], barycentric_gradient(dim, v)[d]}, e[v]);
            out.values[n] = prod.val;
            out.grads[n][d] = prod.der;
        }
    }
}

ShapeSet bezier_eval_closed(int dim, int p, const RefPoint& x) {
    ShapeSet s;
    bezier_eval_closed(dim, p, x, s);
    return s;
}

}  // namespace mmfem
