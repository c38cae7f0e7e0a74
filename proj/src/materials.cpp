#include "mmfem/materials.hpp"

#include <cmath>

#include "mmfem/errors.hpp"

namespace mmfem {

namespace {

// 2 mu + 3 lambda, the bulk-type combination entering the harmonic relation.
double bulk(const LamePair& c) { return 2 * c.mu + 3 * c.lambda; }

double harmonic(double a, double b) {
    if (a + b == 0.0) throw SingularLimit("moduli sum to zero");
    return a * b / (a + b);
}

double inverse_harmonic(double macro, double micro) {
    if (micro == macro) throw SingularLimit("micro modulus equals the macro modulus");
    return macro * micro / (micro - macro);
}

}  // namespace

void MaterialParams::validate() const {
    if (!(mu_e > 0)) throw InvalidParam("mu_e must be positive");
    if (!(mu_micro > 0)) throw InvalidParam("mu_micro must be positive");
    if (!(mu_c >= 0)) throw InvalidParam("mu_c must be nonnegative");
    if (!(Lc >= 0)) throw InvalidParam("Lc must be nonnegative");
    if (!(mu_macro >= 0)) throw InvalidParam("mu_macro must be nonnegative");
}

LamePair macro_from(const LamePair& meso, const LamePair& micro) {
    const double mu = harmonic(meso.mu, micro.mu);
    const double k = harmonic(bulk(meso), bulk(micro));
    return {mu, (k - 2 * mu) / 3};
}

LamePair meso_from(const LamePair& macro, const LamePair& micro) {
    const double mu = inverse_harmonic(macro.mu, micro.mu);
    const double k = inverse_harmonic(bulk(macro), bulk(micro));
    return {mu, (k - 2 * mu) / 3};
}

MaterialParams with_macro(MaterialParams params) {
    const auto m = macro_from({params.mu_e, params.lambda_e}, {params.mu_micro, params.lambda_micro});
    params.mu_macro = m.mu;
    params.lambda_macro = m.lambda;
    return params;
}

MaterialParams with_meso(MaterialParams params) {
    const auto e = meso_from({params.mu_macro, params.lambda_macro}, {params.mu_micro, params.lambda_micro});
    params.mu_e = e.mu;
    params.lambda_e = e.lambda;
    return params;
}

Eigen::Matrix3d sym(const Eigen::Matrix3d& A) { return 0.5 * (A + A.transpose()); }
Eigen::Matrix3d skw(const Eigen::Matrix3d& A) { return 0.5 * (A - A.transpose()); }

Eigen::Matrix3d apply_isotropic(const LamePair& c, const Eigen::Matrix3d& S) {
    return c.lambda * S.trace() * Eigen::Matrix3d::Identity() + 2 * c.mu * sym(S);
}

Eigen::Matrix3d apply_cosserat(double mu_c, const Eigen::Matrix3d& A) { return 2 * mu_c * skw(A); }

}  // namespace mmfem
