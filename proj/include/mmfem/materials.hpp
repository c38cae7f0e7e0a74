#pragma once

#include <Eigen/Dense>

namespace mmfem {

// Isotropic relaxed micromorphic parameters. The curvature term uses mu_macro directly.
struct MaterialParams {
    double lambda_e = 0, mu_e = 1;
    double lambda_micro = 0, mu_micro = 1;
    double mu_c = 0;
    double lambda_macro = 0, mu_macro = 1;
    double Lc = 0;

    // Throws InvalidParam unless mu_e, mu_micro > 0 and mu_c, Lc, mu_macro >= 0.
    void validate() const;
};

struct LamePair {
    double mu = 0;
    double lambda = 0;
};

// Harmonic-mean relations between meso, micro and macro moduli.
LamePair macro_from(const LamePair& meso, const LamePair& micro);
LamePair meso_from(const LamePair& macro, const LamePair& micro);

// Fills mu_macro/lambda_macro from the meso and micro moduli.
MaterialParams with_macro(MaterialParams params);
// Fills mu_e/lambda_e from the macro and micro moduli.
MaterialParams with_meso(MaterialParams params);

// lambda tr(S) 1 + 2 mu sym(S).
Eigen::Matrix3d apply_isotropic(const LamePair& c, const Eigen::Matrix3d& S);
// 2 mu_c skw(A).
Eigen::Matrix3d apply_cosserat(double mu_c, const Eigen::Matrix3d& A);

Eigen::Matrix3d sym(const Eigen::Matrix3d& A);
Eigen::Matrix3d skw(const Eigen::Matrix3d& A);

}  // namespace mmfem
