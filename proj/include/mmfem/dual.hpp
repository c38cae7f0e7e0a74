#pragma once

#include <cmath>

#include "mmfem/errors.hpp"

namespace mmfem {

// Forward-mode AD scalar with a single derivative slot: val + der*eps, eps^2 = 0.
struct Dual {
    double val = 0.0;
    double der = 0.0;

    constexpr Dual() = default;
    constexpr Dual(double v) : val(v) {}  // NOLINT: constants promote implicitly
    constexpr Dual(double v, double d) : val(v), der(d) {}

    constexpr Dual& operator+=(const Dual& o) {
        val += o.val;
        der += o.der;
        return *this;
    }
    constexpr Dual& operator-=(const Dual& o) {
        val -= o.val;
        der -= o.der;
        return *this;
    }
    constexpr Dual& operator*=(const Dual& o) {
        der = val * o.der + der * o.val;
        val *= o.val;
        return *this;
    }
    Dual& operator/=(const Dual& o);
};

constexpr Dual operator+(Dual a, const Dual& b) { return a += b; }
constexpr Dual operator-(Dual a, const Dual& b) { return a -= b; }
constexpr Dual operator*(Dual a, const Dual& b) { return a *= b; }
constexpr Dual operator-(const Dual& a) { return {-a.val, -a.der}; }

inline Dual& Dual::operator/=(const Dual& o) {
    if (o.val == 0.0) throw DivisionByZeroDual("divisor value is zero");
    der = der / o.val - val * o.der / (o.val * o.val);
    val /= o.val;
    return *this;
}

inline Dual operator/(Dual a, const Dual& b) { return a /= b; }

constexpr bool operator==(const Dual& a, const Dual& b) {
    return a.val == b.val && a.der == b.der;
}

// Marks x as the active variable.
constexpr Dual seed(double x) { return {x, 1.0}; }

// Integer power by repeated multiplication.
constexpr Dual pow(Dual base, int n) {
    if (n < 0) throw DomainError("negative exponent");
    Dual result{1.0, 0.0};
    for (; n > 0; n >>= 1) {
        if (n & 1) result *= base;
        base *= base;
    }
    return result;
}

// Elementary functions needed for analytic boundary data.
inline Dual sin(const Dual& a) { return {std::sin(a.val), a.der * std::cos(a.val)}; }
inline Dual cos(const Dual& a) { return {std::cos(a.val), -a.der * std::sin(a.val)}; }
inline Dual exp(const Dual& a) {
    const double e = std::exp(a.val);
    return {e, a.der * e};
}
inline Dual sinh(const Dual& a) { return {std::sinh(a.val), a.der * std::cosh(a.val)}; }
inline Dual cosh(const Dual& a) { return {std::cosh(a.val), a.der * std::sinh(a.val)}; }
inline Dual sqrt(const Dual& a) {
    if (a.val < 0.0) throw DomainError("square root of a negative value");
    const double r = std::sqrt(a.val);
    if (r == 0.0 && a.der != 0.0) throw DivisionByZeroDual("derivative of sqrt at zero");
    return {r, r == 0.0 ? 0.0 : a.der / (2 * r)};
}

}  // namespace mmfem
