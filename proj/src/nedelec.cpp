#include "mmfem/nedelec.hpp"

#include <map>
#include <mutex>
#include <string>

#include "mmfem/errors.hpp"

namespace mmfem {

namespace {

constexpr Vec3 E1{1, 0, 0}, E2{0, 1, 0}, E3{0, 0, 1}, S3{1, 1, 1};

Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
Vec3 operator-(const Vec3& a) { return {-a[0], -a[1], -a[2]}; }

Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// Lowest-order combination with unit weight on the listed (1-based) functions.
WhitneyCombo th(std::initializer_list<std::pair<int, double>> terms) {
    WhitneyCombo c{};
    for (auto [id, w] : terms) c[id - 1] += w;
    return c;
}

class Builder {
public:
    Builder(int dim, int p) : dim_(dim), p_(p) {}

    MultiIndex b(int i, int j, int k = 0, int shift = 0) const { return {dim_, p_ + shift, i, j, k}; }

    void templ(Polytope poly, const MultiIndex& mi, const Vec3& v) {
        VectorShapeFn f;
        f.polytope = poly;
        f.kind = ShapeKind::template_vector;
        f.index = mi;
        f.vector = v;
        f.scalar_pos = traversal_position(mi);
        out_.push_back(f);
    }
    void templ(Polytope poly, const MultiIndex& mi, const WhitneyCombo& w) {
        VectorShapeFn f;
        f.polytope = poly;
        f.kind = ShapeKind::template_vector;
        f.index = mi;
        f.whitney = w;
        f.on_whitney = true;
        f.scalar_pos = traversal_position(mi);
        out_.push_back(f);
    }
    void lowest(Polytope poly, int edge) {
        VectorShapeFn f;
        f.polytope = poly;
        f.kind = ShapeKind::lowest_order;
        f.whitney[edge] = 1.0;
        out_.push_back(f);
    }
    void grad(Polytope poly, const MultiIndex& mi) {
        VectorShapeFn f;
        f.polytope = poly;
        f.kind = ShapeKind::gradient;
        f.index = mi;
        f.scalar_pos = traversal_position(mi);
        out_.push_back(f);
    }
    // (p+2) b^{p+1}_{mi - e_dir} e_dir - (mi_dir/(p+2)) grad b^{p+2}_{mi}; dir 0,1,2 <-> xi,eta,zeta.
    void nongradient(const MultiIndex& mi, int dir) {
        VectorShapeFn f;
        f.polytope = {PolytopeKind::cell, 0};
        f.kind = ShapeKind::nongradient_cell;
        f.index = mi;
        MultiIndex lower{mi.dim, mi.p - 1, mi.i, mi.j, mi.k};
        const int exps[3] = {mi.i, mi.j, mi.k};
        if (dir == 0) lower.i -= 1;
        if (dir == 1) lower.j -= 1;
        if (dir == 2) lower.k -= 1;
        f.vector = dir == 0 ? E1 : dir == 1 ? E2 : E3;
        f.gradient_weight = double(exps[dir]) / double(mi.p);
        f.scalar_pos = traversal_position(lower);
        f.aux_pos = traversal_position(mi);
        out_.push_back(f);
    }

    std::vector<VectorShapeFn> take() { return std::move(out_); }

private:
    int dim_, p_;
    std::vector<VectorShapeFn> out_;
};

Polytope edge(int e) { return {PolytopeKind::edge, e}; }
Polytope face(int f) { return {PolytopeKind::face, f}; }
constexpr Polytope kCell{PolytopeKind::cell, 0};

void check_degree(int p, int min) {
    if (p < min) throw InvalidParam("Nedelec degree " + std::to_string(p) + " below " + std::to_string(min));
}

}  // namespace

int nedelec_dimension(Family family, int dim, int p) {
    if (family == Family::nedelec2)
        return dim == 2 ? (p + 1) * (p + 2) : (p + 1) * (p + 2) * (p + 3) / 2;
    if (family == Family::nedelec1)
        return dim == 2 ? (p + 1) * (p + 3) : (p + 1) * (p + 3) * (p + 4) / 2;
    throw SpaceMismatch("not a Nedelec family");
}

std::vector<VectorShapeFn> nedelec2_tri(int p) {
    check_degree(p, 1);
    Builder B(2, p);
    const Vec3 half = 0.5 * (E1 - E2);
    B.templ(edge(0), B.b(0, 0), E2);
    B.templ(edge(0), B.b(0, p), E1 + E2);
    for (int j = 1; j < p; ++j) B.templ(edge(0), B.b(0, j), E2);
    B.templ(edge(1), B.b(0, 0), E1);
    B.templ(edge(1), B.b(p, 0), E1 + E2);
    for (int i = 1; i < p; ++i) B.templ(edge(1), B.b(i, 0), E1);
    B.templ(edge(2), B.b(0, p), E1);
    B.templ(edge(2), B.b(p, 0), -E2);
    for (int i = 1; i < p; ++i) B.templ(edge(2), B.b(i, p - i), half);

    for (int j = 1; j < p; ++j) B.templ(kCell, B.b(0, j), -E1);
    for (int i = 1; i < p; ++i) B.templ(kCell, B.b(i, 0), E2);
    for (int i = 1; i < p; ++i) B.templ(kCell, B.b(i, p - i), E1 + E2);
    for (int i = 1; i < p; ++i)
        for (int j = 1; i + j < p; ++j) {
            B.templ(kCell, B.b(i, j), E2);
            B.templ(kCell, B.b(i, j), E1);
        }
    return B.take();
}

std::vector<VectorShapeFn> nedelec1_tri(int p) {
    check_degree(p, 0);
    Builder B(2, p);
    const int q = p + 1;
    B.lowest(edge(0), 0);
    for (int j = 1; j < q; ++j) B.grad(edge(0), B.b(0, j, 0, 1));
    B.lowest(edge(1), 1);
    for (int i = 1; i < q; ++i) B.grad(edge(1), B.b(i, 0, 0, 1));
    B.lowest(edge(2), 2);
    for (int i = 1; i < q; ++i) B.grad(edge(2), B.b(i, q - i, 0, 1));
    if (p == 0) return B.take();

    B.templ(kCell, B.b(0, 0), th({{3, 1}}));
    B.templ(kCell, B.b(0, p), th({{2, 1}}));
    for (int j = 1; j < p; ++j) B.templ(kCell, B.b(0, j), th({{3, 1}, {2, -1}}));
    for (int i = 1; i < p; ++i) B.templ(kCell, B.b(i, 0), th({{1, 1}, {3, 1}}));
    for (int i = 1; i < p; ++i) B.templ(kCell, B.b(i, p - i), th({{1, 1}, {2, -1}}));
    for (int i = 1; i < p; ++i)
        for (int j = 1; i + j < p; ++j) B.templ(kCell, B.b(i, j), th({{1, 1}, {2, -1}, {3, 1}}));
    for (int i = 1; i < q; ++i)
        for (int j = 1; i + j < q; ++j) B.grad(kCell, B.b(i, j, 0, 1));
    return B.take();
}

std::vector<VectorShapeFn> nedelec2_tet(int p) {
    check_degree(p, 1);
    Builder B(3, p);
    // Edges: vertex-edge pair, then the pure edge functions from low to high vertex.
    B.templ(edge(0), B.b(0, 0, 0), E3);
    B.templ(edge(0), B.b(0, 0, p), S3);
    for (int k = 1; k < p; ++k) B.templ(edge(0), B.b(0, 0, k), E3);
    B.templ(edge(1), B.b(0, 0, 0), E2);
    B.templ(edge(1), B.b(0, p, 0), S3);
    for (int j = 1; j < p; ++j) B.templ(edge(1), B.b(0, j, 0), E2);
    B.templ(edge(2), B.b(0, 0, 0), E1);
    B.templ(edge(2), B.b(p, 0, 0), S3);
    for (int i = 1; i < p; ++i) B.templ(edge(2), B.b(i, 0, 0), E1);
    B.templ(edge(3), B.b(0, 0, p), E2);
    B.templ(edge(3), B.b(0, p, 0), -E3);
    for (int j = 1; j < p; ++j) B.templ(edge(3), B.b(0, j, p - j), E2);
    B.templ(edge(4), B.b(0, 0, p), E1);
    B.templ(edge(4), B.b(p, 0, 0), -E3);
    for (int i = 1; i < p; ++i) B.templ(edge(4), B.b(i, 0, p - i), E1);
    B.templ(edge(5), B.b(0, p, 0), E1);
    B.templ(edge(5), B.b(p, 0, 0), -E2);
    for (int i = 1; i < p; ++i) B.templ(edge(5), B.b(i, p - i, 0), E1);

    // Faces: three edge-face families, then two templates per face-interior index.
    for (int k = 1; k < p; ++k) B.templ(face(0), B.b(0, 0, k), -E2);
    for (int j = 1; j < p; ++j) B.templ(face(0), B.b(0, j, 0), E3);
    for (int j = 1; j < p; ++j) B.templ(face(0), B.b(0, j, p - j), S3);
    for (int j = 1; j < p; ++j)
        for (int k = 1; j + k < p; ++k) {
            B.templ(face(0), B.b(0, j, k), E3);
            B.templ(face(0), B.b(0, j, k), E2);
        }
    for (int k = 1; k < p; ++k) B.templ(face(1), B.b(0, 0, k), -E1);
    for (int i = 1; i < p; ++i) B.templ(face(1), B.b(i, 0, 0), E3);
    for (int i = 1; i < p; ++i) B.templ(face(1), B.b(i, 0, p - i), S3);
    for (int i = 1; i < p; ++i)
        for (int k = 1; i + k < p; ++k) {
            B.templ(face(1), B.b(i, 0, k), E3);
            B.templ(face(1), B.b(i, 0, k), E1);
        }
    for (int j = 1; j < p; ++j) B.templ(face(2), B.b(0, j, 0), -E1);
    for (int i = 1; i < p; ++i) B.templ(face(2), B.b(i, 0, 0), E2);
    for (int i = 1; i < p; ++i) B.templ(face(2), B.b(i, p - i, 0), S3);
    for (int i = 1; i < p; ++i)
        for (int j = 1; i + j < p; ++j) {
            B.templ(face(2), B.b(i, j, 0), E2);
            B.templ(face(2), B.b(i, j, 0), E1);
        }
    for (int j = 1; j < p; ++j) B.templ(face(3), B.b(0, j, p - j), -E1);
    for (int i = 1; i < p; ++i) B.templ(face(3), B.b(i, 0, p - i), E2);
    for (int i = 1; i < p; ++i) B.templ(face(3), B.b(i, p - i, 0), -E3);
    for (int i = 1; i < p; ++i)
        for (int j = 1; i + j < p; ++j) {
            B.templ(face(3), B.b(i, j, p - i - j), E2);
            B.templ(face(3), B.b(i, j, p - i - j), E1);
        }

    // Cell: face-cell functions, then three templates per interior index.
    for (int j = 1; j < p; ++j)
        for (int k = 1; j + k < p; ++k) B.templ(kCell, B.b(0, j, k), -E1);
    for (int i = 1; i < p; ++i)
        for (int k = 1; i + k < p; ++k) B.templ(kCell, B.b(i, 0, k), E2);
    for (int i = 1; i < p; ++i)
        for (int j = 1; i + j < p; ++j) B.templ(kCell, B.b(i, j, 0), -E3);
    for (int i = 1; i < p; ++i)
        for (int j = 1; i + j < p; ++j) B.templ(kCell, B.b(i, j, p - i - j), S3);
    for (int i = 1; i < p; ++i)
        for (int j = 1; i + j < p; ++j)
            for (int k = 1; i + j + k < p; ++k) {
                B.templ(kCell, B.b(i, j, k), E3);
                B.templ(kCell, B.b(i, j, k), E2);
                B.templ(kCell, B.b(i, j, k), E1);
            }
    return B.take();
}

std::vector<VectorShapeFn> nedelec1_tet(int p) {
    check_degree(p, 0);
    Builder B(3, p);
    const int q = p + 1;
    B.lowest(edge(0), 0);
    for (int k = 1; k < q; ++k) B.grad(edge(0), B.b(0, 0, k, 1));
    B.lowest(edge(1), 1);
    for (int j = 1; j < q; ++j) B.grad(edge(1), B.b(0, j, 0, 1));
    B.lowest(edge(2), 2);
    for (int i = 1; i < q; ++i) B.grad(edge(2), B.b(i, 0, 0, 1));
    B.lowest(edge(3), 3);
    for (int j = 1; j < q; ++j) B.grad(edge(3), B.b(0, j, q - j, 1));
    B.lowest(edge(4), 4);
    for (int i = 1; i < q; ++i) B.grad(edge(4), B.b(i, 0, q - i, 1));
    B.lowest(edge(5), 5);
    for (int i = 1; i < q; ++i) B.grad(edge(5), B.b(i, q - i, 0, 1));
    if (p == 0) return B.take();

    // Face f123.
    B.templ(face(0), B.b(0, 0, 0), th({{4, 1}}));
    B.templ(face(0), B.b(0, 0, p), th({{2, -1}}));
    for (int k = 1; k < p; ++k) B.templ(face(0), B.b(0, 0, k), th({{4, 1}, {2, -1}}));
    for (int j = 1; j < p; ++j) B.templ(face(0), B.b(0, j, 0), th({{1, 1}, {4, 1}}));
    for (int j = 1; j < p; ++j) B.templ(face(0), B.b(0, j, p - j), th({{1, 1}, {2, -1}}));
    for (int j = 1; j < p; ++j)
        for (int k = 1; j + k < p; ++k) B.templ(face(0), B.b(0, j, k), th({{1, 1}, {2, -1}, {4, 1}}));
    for (int j = 1; j < q; ++j)
        for (int k = 1; j + k < q; ++k) B.grad(face(0), B.b(0, j, k, 1));
    // Face f124.
    B.templ(face(1), B.b(0, 0, 0), th({{5, 1}}));
    B.templ(face(1), B.b(0, 0, p), th({{3, -1}}));
    for (int k = 1; k < p; ++k) B.templ(face(1), B.b(0, 0, k), th({{5, 1}, {3, -1}}));
    for (int i = 1; i < p; ++i) B.templ(face(1), B.b(i, 0, 0), th({{1, 1}, {5, 1}}));
    for (int i = 1; i < p; ++i) B.templ(face(1), B.b(i, 0, p - i), th({{1, 1}, {3, -1}}));
    for (int i = 1; i < p; ++i)
        for (int k = 1; i + k < p; ++k) B.templ(face(1), B.b(i, 0, k), th({{1, 1}, {3, -1}, {5, 1}}));
    for (int i = 1; i < q; ++i)
        for (int k = 1; i + k < q; ++k) B.grad(face(1), B.b(i, 0, k, 1));
    // Face f134.
    B.templ(face(2), B.b(0, 0, 0), th({{6, 1}}));
    B.templ(face(2), B.b(0, p, 0), th({{3, -1}}));
    for (int j = 1; j < p; ++j) B.templ(face(2), B.b(0, j, 0), th({{6, 1}, {3, -1}}));
    for (int i = 1; i < p; ++i) B.templ(face(2), B.b(i, 0, 0), th({{2, 1}, {6, 1}}));
    for (int i = 1; i < p; ++i) B.templ(face(2), B.b(i, p - i, 0), th({{2, 1}, {3, -1}}));
    for (int i = 1; i < p; ++i)
        for (int j = 1; i + j < p; ++j) B.templ(face(2), B.b(i, j, 0), th({{2, 1}, {3, -1}, {6, 1}}));
    for (int i = 1; i < q; ++i)
        for (int j = 1; i + j < q; ++j) B.grad(face(2), B.b(i, j, 0, 1));
    // Face f234.
    B.templ(face(3), B.b(0, 0, p), th({{6, 1}}));
    B.templ(face(3), B.b(0, p, 0), th({{5, -1}}));
    for (int j = 1; j < p; ++j) B.templ(face(3), B.b(0, j, p - j), th({{6, 1}, {5, -1}}));
    for (int i = 1; i < p; ++i) B.templ(face(3), B.b(i, 0, p - i), th({{4, 1}, {6, 1}}));
    for (int i = 1; i < p; ++i) B.templ(face(3), B.b(i, p - i, 0), th({{4, 1}, {5, -1}}));
    for (int i = 1; i < p; ++i)
        for (int j = 1; i + j < p; ++j)
            B.templ(face(3), B.b(i, j, p - i - j), th({{4, 1}, {5, -1}, {6, 1}}));
    for (int i = 1; i < q; ++i)
        for (int j = 1; i + j < q; ++j) B.grad(face(3), B.b(i, j, q - i - j, 1));

    // Cell: nongradient families on strict-interior indices of degree p+2, then gradients.
    const int r = p + 2;
    for (int dir = 0; dir < 2; ++dir)
        for (int i = 1; i < r; ++i)
            for (int j = 1; i + j < r; ++j)
                for (int k = 1; i + j + k < r; ++k) B.nongradient(B.b(i, j, k, 2), dir);
    for (int i = 1; i < r; ++i)
        for (int j = 1; i + j + 1 < r; ++j) B.nongradient(B.b(i, j, 1, 2), 2);
    for (int i = 1; i < q; ++i)
        for (int j = 1; i + j < q; ++j)
            for (int k = 1; i + j + k < q; ++k) B.grad(kCell, B.b(i, j, k, 1));
    return B.take();
}

const std::vector<VectorShapeFn>& nedelec_basis(const SpaceDescriptor& space) {
    static std::mutex mutex;
    static std::map<std::tuple<int, int, int>, std::vector<VectorShapeFn>> cache;
    const auto key = std::make_tuple(static_cast<int>(space.family), space.dim, space.degree);
    std::lock_guard lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<VectorShapeFn> fns;
    if (space.family == Family::nedelec1)
        fns = space.dim == 2 ? nedelec1_tri(space.degree) : nedelec1_tet(space.degree);
    else if (space.family == Family::nedelec2)
        fns = space.dim == 2 ? nedelec2_tri(space.degree) : nedelec2_tet(space.degree);
    else
        throw SpaceMismatch("H1 descriptor passed to the Nedelec basis");
    return cache.emplace(key, std::move(fns)).first->second;
}

void whitney(int dim, int e, const RefPoint& x, Vec3& value, Vec3& curl) {
    const auto [a, b] = edge_vertices(dim)[e];
    const auto lam = barycentric(dim, x);
    const Vec3 ga = barycentric_gradient(dim, a), gb = barycentric_gradient(dim, b);
    value = lam[a] * gb - lam[b] * ga;
    curl = 2.0 * cross(ga, gb);
    if (dim == 2) curl = {curl[2], 0.0, 0.0};
}

void combine_vector_shapes(const SpaceDescriptor& space, const RefPoint& x, const ShapeSet& deg_p,
                           const ShapeSet& deg_p1, const ShapeSet& deg_p2, VectorShapeSet& out) {
    const auto& fns = nedelec_basis(space);
    const int dim = space.dim;
    std::array<Vec3, 6> wv{}, wc{};
    for (int e = 0; e < num_edges(dim); ++e) whitney(dim, e, x, wv[e], wc[e]);

    // 2D rot of a field stored in slot 0; 3D curl otherwise.
    auto grad_cross = [dim](const Vec3& g, const Vec3& v) -> Vec3 {
        if (dim == 2) return {g[0] * v[1] - g[1] * v[0], 0.0, 0.0};
        return cross(g, v);
    };

    out.dim = dim;
    out.values.resize(fns.size());
    out.curls.resize(fns.size());
    for (std::size_t n = 0; n < fns.size(); ++n) {
        const auto& f = fns[n];
        Vec3 w{}, wcurl{};
        if (f.kind == ShapeKind::lowest_order || f.on_whitney)
            for (int e = 0; e < 6; ++e)
                if (f.whitney[e] != 0.0) {
                    w = w + f.whitney[e] * wv[e];
                    wcurl = wcurl + f.whitney[e] * wc[e];
                }
        switch (f.kind) {
            case ShapeKind::lowest_order:
                out.values[n] = w;
                out.curls[n] = wcurl;
                break;
            case ShapeKind::template_vector: {
                const double bv = deg_p.values[f.scalar_pos];
                const Vec3& bg = deg_p.grads[f.scalar_pos];
                if (f.on_whitney) {
                    out.values[n] = bv * w;
                    out.curls[n] = grad_cross(bg, w) + bv * wcurl;
                } else {
                    out.values[n] = bv * f.vector;
                    out.curls[n] = grad_cross(bg, f.vector);
                }
                break;
            }
            case ShapeKind::gradient:
                out.values[n] = deg_p1.grads[f.scalar_pos];
                out.curls[n] = {0.0, 0.0, 0.0};
                break;
            case ShapeKind::nongradient_cell: {
                const double scale = space.degree + 2;
                out.values[n] = (scale * deg_p1.values[f.scalar_pos]) * f.vector -
                                f.gradient_weight * deg_p2.grads[f.aux_pos];
                out.curls[n] = scale * grad_cross(deg_p1.grads[f.scalar_pos], f.vector);
                break;
            }
        }
    }
}

void eval_vector_shapes(const SpaceDescriptor& space, const CollapsedPoint& cp, VectorShapeSet& out) {
    const int p = space.degree;
    ShapeSet s0, s1, s2;
    bezier_eval(space.dim, p, cp, s0);
    bezier_eval(space.dim, p + 1, cp, s1);
    if (space.family == Family::nedelec1 && space.dim == 3 && p > 0) bezier_eval(space.dim, p + 2, cp, s2);
    combine_vector_shapes(space, duffy_forward(space.dim, cp), s0, s1, s2, out);
}

VectorShapeSet eval_vector_shapes(const SpaceDescriptor& space, const CollapsedPoint& cp) {
    VectorShapeSet out;
    eval_vector_shapes(space, cp, out);
    return out;
}

void eval_vector_shapes_closed(const SpaceDescriptor& space, const RefPoint& x, VectorShapeSet& out) {
    const int p = space.degree;
    ShapeSet s0, s1, s2;
    bezier_eval_closed(space.dim, p, x, s0);
    bezier_eval_closed(space.dim, p + 1, x, s1);
    if (space.family == Family::nedelec1 && space.dim == 3 && p > 0) bezier_eval_closed(space.dim, p + 2, x, s2);
    combine_vector_shapes(space, x, s0, s1, s2, out);
}

VectorShapeSet eval_vector_shapes_closed(const SpaceDescriptor& space, const RefPoint& x) {
    VectorShapeSet out;
    eval_vector_shapes_closed(space, x, out);
    return out;
}

}  // namespace mmfem
