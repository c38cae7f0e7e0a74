#pragma once

#include <vector>

#include "mmfem/simplex.hpp"

namespace mmfem {

inline constexpr int kMaxQuadratureDegree = 20;

// Points live strictly inside the reference simplex; weights sum to its measure.
struct QuadratureRule {
    int dim = 2;
    int degree = 0;
    std::vector<CollapsedPoint> points;
    std::vector<RefPoint> simplex_points;
    std::vector<double> weights;

    int size() const { return static_cast<int>(weights.size()); }
};

// Cached, immutable rule exact up to `degree` on the reference triangle/tetrahedron.
const QuadratureRule& rule_for(int dim, int degree);

// Gauss-Legendre rule mapped to [0,1].
struct LineRule {
    std::vector<double> points;
    std::vector<double> weights;
};
const LineRule& gauss_legendre01(int n);

}  // namespace mmfem
