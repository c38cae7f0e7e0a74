#include "mmfem/quadrature.hpp"

#include <algorithm>
#include <array>
#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <mutex>
#include <string>

#include "mmfem/errors.hpp"

namespace mmfem {

namespace {

constexpr int kMaxLinePoints = 32;

LineRule build_line(int n) {
    // Nonnegative zeros of P_n; mirror them onto [-1,1] and map to [0,1].
    const auto zeros = boost::math::legendre_p_zeros<double>(n);
    std::vector<double> x, w;
    for (double z : zeros) {
        const double dp = boost::math::legendre_p_prime(n, z);
        const double wz = 2.0 / ((1.0 - z * z) * dp * dp);
        x.push_back(z);
        w.push_back(wz);
        if (z != 0.0) {
            x.push_back(-z);
            w.push_back(wz);
        }
    }
    LineRule r;
    std::vector<std::size_t> idx(x.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return x[a] < x[b]; });
    for (auto i : idx) {
        r.points.push_back(0.5 * (x[i] + 1.0));
        r.weights.push_back(0.5 * w[i]);
    }
    return r;
}

struct Orbit {
    RefPoint x;
    double w;
};

std::vector<Orbit> symmetric_rule(int dim, int degree) {
    std::vector<Orbit> pts;
    if (dim == 2) {
        if (degree <= 1) return {{{1.0 / 3, 1.0 / 3, 0}, 0.5}};
        if (degree == 2) {
            for (auto [a, b] : {std::pair{1.0 / 6, 1.0 / 6}, {2.0 / 3, 1.0 / 6}, {1.0 / 6, 2.0 / 3}})
                pts.push_back({{a, b, 0}, 1.0 / 6});
            return pts;
        }
        if (degree <= 5) {
            // Seven-point rule, closed form.
            const double s = std::sqrt(15.0);
            pts.push_back({{1.0 / 3, 1.0 / 3, 0}, 9.0 / 80});
            for (auto [a, w] : {std::pair{(6 - s) / 21, (155 - s) / 2400}, {(6 + s) / 21, (155 + s) / 2400}}) {
                pts.push_back({{a, a, 0}, w});
                pts.push_back({{1 - 2 * a, a, 0}, w});
                pts.push_back({{a, 1 - 2 * a, 0}, w});
            }
            return pts;
        }
        return {};
    }
    if (degree <= 1) return {{{0.25, 0.25, 0.25}, 1.0 / 6}};
    if (degree == 2) {
        const double a = (5.0 - std::sqrt(5.0)) / 20, b = (5.0 + 3 * std::sqrt(5.0)) / 20;
        for (const RefPoint& x : {RefPoint{a, a, a}, RefPoint{b, a, a}, RefPoint{a, b, a}, RefPoint{a, a, b}})
            pts.push_back({x, 1.0 / 24});
        return pts;
    }
    return {};
}

QuadratureRule build_rule(int dim, int degree) {
    QuadratureRule r;
    r.dim = dim;
    r.degree = degree;
    const auto sym = symmetric_rule(dim, degree);
    if (!sym.empty()) {
        for (const auto& o : sym) {
            if (!(o.w > 0.0)) throw UnsupportedDegree("tabulated rule has a non-positive weight");
            r.simplex_points.push_back(o.x);
            r.points.push_back(duffy_inverse(dim, o.x));
            r.weights.push_back(o.w);
        }
        return r;
    }
    // Collapsed tensor Gauss-Legendre; the Duffy Jacobian raises the degree in alpha (and beta).
    const auto& la = gauss_legendre01((degree + dim + 1) / 2);
    const auto& lb = gauss_legendre01((degree + dim) / 2);
    const auto& lc = gauss_legendre01((degree + 2) / 2);
    for (std::size_t i = 0; i < la.points.size(); ++i)
        for (std::size_t j = 0; j < lb.points.size(); ++j) {
            const double a = la.points[i], b = lb.points[j];
            if (dim == 2) {
                const CollapsedPoint cp{a, b, 0};
                r.points.push_back(cp);
                r.simplex_points.push_back(duffy_forward(2, cp));
                r.weights.push_back(la.weights[i] * lb.weights[j] * (1 - a));
                continue;
            }
            for (std::size_t k = 0; k < lc.points.size(); ++k) {
                const CollapsedPoint cp{a, b, lc.points[k]};
                r.points.push_back(cp);
                r.simplex_points.push_back(duffy_forward(3, cp));
                r.weights.push_back(la.weights[i] * lb.weights[j] * lc.weights[k] * (1 - a) * (1 - a) * (1 - b));
            }
        }
    return r;
}

}  // namespace

const LineRule& gauss_legendre01(int n) {
    if (n < 1 || n > kMaxLinePoints) throw UnsupportedDegree("line rule with " + std::to_string(n) + " points");
    static std::array<LineRule, kMaxLinePoints + 1> cache;
    static std::array<std::once_flag, kMaxLinePoints + 1> flags;
    std::call_once(flags[n], [n] { cache[n] = build_line(n); });
    return cache[n];
}

const QuadratureRule& rule_for(int dim, int degree) {
    if (dim != 2 && dim != 3) throw InvalidParam("dimension must be 2 or 3");
    if (degree < 1 || degree > kMaxQuadratureDegree)
        throw UnsupportedDegree("degree " + std::to_string(degree) + " outside 1.." +
                                std::to_string(kMaxQuadratureDegree));
    static std::array<std::array<QuadratureRule, kMaxQuadratureDegree + 1>, 2> cache;
    static std::array<std::array<std::once_flag, kMaxQuadratureDegree + 1>, 2> flags;
    auto& slot = cache[dim - 2][degree];
    std::call_once(flags[dim - 2][degree], [&] { slot = build_rule(dim, degree); });
    return slot;
}

}  // namespace mmfem
