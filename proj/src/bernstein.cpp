#include "mmfem/bernstein.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mmfem {

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double c = 1.0;
    for (int m = 1; m <= k; ++m) c = c * (n - k + m) / m;
    return std::round(c);
}

namespace {

void check_domain(double x) {
    if (!(x >= 0.0 && x <= 1.0))
        throw DomainError("coordinate " + std::to_string(x) + " outside [0,1]");
}

}  // namespace

void eval_all(int p, double x, std::span<double> values, std::span<double> derivs) {
    check_domain(x);
    if (p < 0) throw DomainError("negative degree");
    if (x > 1.0 - kClampEps) {
        // The ratio x/(1-x) blows up here; use the limits at x = 1.
        for (int i = 0; i <= p; ++i) values[i] = derivs[i] = 0.0;
        values[p] = 1.0;
        if (p > 0) {
            derivs[p] = p;
            derivs[p - 1] = -p;
        }
        return;
    }
    const Dual t = seed(x);
    const Dual ratio = t / (1.0 - t);
    Dual b = pow(1.0 - t, p);
    for (int i = 0; i <= p; ++i) {
        values[i] = b.val;
        derivs[i] = b.der;
        if (i < p) b = b * (double(p - i) / double(i + 1)) * ratio;
    }
}

BernsteinEval eval_all(int p, double x) {
    BernsteinEval e;
    e.degree = p;
    e.values.resize(p + 1);
    e.derivs.resize(p + 1);
    eval_all(p, x, e.values, e.derivs);
    return e;
}

Dual eval_single(int p, int i, double x) {
    if (i < 0 || i > p)
        throw IndexError("index " + std::to_string(i) + " outside 0.." + std::to_string(p));
    check_domain(x);
    const Dual t = seed(x);
    return binomial(p, i) * pow(t, i) * pow(1.0 - t, p - i);
}

}  // namespace mmfem
