#pragma once

#include <span>
#include <vector>

#include "mmfem/dual.hpp"

namespace mmfem {

inline constexpr double kClampEps = 1e-12;

// Binomial coefficient as a double; exact for the degrees used here.
double binomial(int n, int k);

struct BernsteinEval {
    int degree = 0;
    std::vector<double> values;
    std::vector<double> derivs;
};

// All b_i^p(x), i = 0..p, with derivatives. Recursive, Dual-valued.
BernsteinEval eval_all(int p, double x);

// Allocation-free variant; both spans must hold p+1 entries.
void eval_all(int p, double x, std::span<double> values, std::span<double> derivs);

// One base function from the closed form C(p,i) x^i (1-x)^(p-i).
Dual eval_single(int p, int i, double x);

}  // namespace mmfem
