#include "mmfem/solver.hpp"

#include <Eigen/CholmodSupport>
#include <Eigen/IterativeLinearSolvers>
#include <sstream>
#include <vector>

#include "mmfem/errors.hpp"

namespace mmfem {

namespace {

using Cholesky = Eigen::CholmodSupernodalLLT<SpMat, Eigen::Lower>;

// b - K x with only the lower triangle of K stored, accumulated in extended precision.
// Large curl coefficients make K x cancel heavily, so a double residual would stall refinement.
Eigen::VectorXd residual(const SpMat& K, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
    std::vector<long double> r(b.data(), b.data() + b.size());
    for (Eigen::Index j = 0; j < K.outerSize(); ++j) {
        for (SpMat::InnerIterator it(K, j); it; ++it) {
            const Eigen::Index i = it.row();
            if (i < j) continue;
            const long double v = it.value();
            r[i] -= v * x(j);
            if (i != j) r[j] -= v * x(i);
        }
    }
    Eigen::VectorXd out(b.size());
    for (Eigen::Index i = 0; i < b.size(); ++i) out(i) = static_cast<double>(r[i]);
    return out;
}

double relative_residual(const SpMat& K, const Eigen::VectorXd& x, const Eigen::VectorXd& b, double bnorm) {
    return residual(K, x, b).norm() / bnorm;
}

// Factorized solve with iterative refinement, then diagonally preconditioned CG if still short.
Eigen::VectorXd finish_solve(Cholesky& chol, const SpMat& K, const Eigen::VectorXd& b, SolveStats& st) {
    st.free_dofs = static_cast<int>(b.size());
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        st.residual = 0.0;
        return Eigen::VectorXd::Zero(b.size());
    }
    chol.factorize(K);
    if (chol.info() != Eigen::Success) throw NotPositiveDefinite("Cholesky factorization failed");
    Eigen::VectorXd x = chol.solve(b);
    st.residual = relative_residual(K, x, b, bnorm);
    for (int step = 0; step < 3 && st.residual > 1e-2 * kResidualTolerance; ++step) {
        const Eigen::VectorXd x1 = x + chol.solve(residual(K, x, b));
        const double r1 = relative_residual(K, x1, b, bnorm);
        if (!(r1 < st.residual)) break;
        x = x1;
        st.residual = r1;
        ++st.refinement_steps;
    }
    if (st.residual <= kResidualTolerance) return x;

    Eigen::ConjugateGradient<SpMat, Eigen::Lower, Eigen::DiagonalPreconditioner<double>> cg;
    cg.setTolerance(0.5 * kResidualTolerance);
    cg.setMaxIterations(std::max<Eigen::Index>(1000, 20 * b.size()));
    cg.compute(K);
    const Eigen::VectorXd y = cg.solveWithGuess(b, x);
    st.used_cg = true;
    st.cg_iterations = static_cast<int>(cg.iterations());
    const double ry = relative_residual(K, y, b, bnorm);
    if (ry < st.residual) {
        x = y;
        st.residual = ry;
    }
    if (st.residual > kResidualTolerance) {
        std::ostringstream msg;
        msg << "relative residual " << std::scientific << st.residual << " above tolerance";
        throw NonConvergence(msg.str());
    }
    return x;
}

}  // namespace

struct ReducedSolver::Impl {
    std::vector<int> free;       // reduced -> full
    SpMat K0, Kc;                // reduced lower triangles, identical patterns
    Eigen::VectorXd b0, kc_lift;  // b_F - K0_FC g, and Kc_FC g
    Eigen::VectorXd lift;        // full vector with the prescribed values
    Cholesky chol;
    bool analyzed = false;
};

ReducedSolver::ReducedSolver(const SparseSystem& system, const ConstraintSet& constraints)
    : curl_coefficient_(system.curl_coefficient), impl_(std::make_unique<Impl>()) {
    const int n = static_cast<int>(system.K0.rows());
    const bool has_curl = system.Kc.nonZeros() > 0;
    if (has_curl && system.Kc.nonZeros() != system.K0.nonZeros()) throw SpaceMismatch("curl matrix pattern differs");
    Impl& m = *impl_;
    m.lift = constraints.lift(n);
    std::vector<int> full_to_free(n, -1);
    for (int i = 0; i < n; ++i)
        if (!constraints.contains(i)) {
            full_to_free[i] = static_cast<int>(m.free.size());
            m.free.push_back(i);
        }
    const int nf = static_cast<int>(m.free.size());

    std::vector<int> outer(nf + 1, 0), inner;
    std::vector<double> v0, vc;
    for (int jf = 0; jf < nf; ++jf) {
        const int j = m.free[jf];
        for (int k = system.K0.outerIndexPtr()[j]; k < system.K0.outerIndexPtr()[j + 1]; ++k) {
            const int i = full_to_free[system.K0.innerIndexPtr()[k]];
            if (i < jf) continue;  // constrained rows are negative, so this keeps the free lower triangle
            inner.push_back(i);
            v0.push_back(system.K0.valuePtr()[k]);
            vc.push_back(has_curl ? system.Kc.valuePtr()[k] : 0.0);
        }
        outer[jf + 1] = static_cast<int>(inner.size());
    }
    auto make = [&](const std::vector<double>& values) {
        return SpMat(Eigen::Map<const SpMat>(nf, nf, static_cast<Eigen::Index>(inner.size()), outer.data(), inner.data(),
                                             values.data()));
    };
    m.K0 = make(v0);
    m.Kc = make(vc);

    const Eigen::VectorXd k0g = system.K0 * m.lift;
    const Eigen::VectorXd kcg = has_curl ? Eigen::VectorXd(system.Kc * m.lift) : Eigen::VectorXd::Zero(n);
    m.b0.resize(nf);
    m.kc_lift.resize(nf);
    for (int i = 0; i < nf; ++i) {
        m.b0(i) = system.rhs(m.free[i]) - k0g(m.free[i]);
        m.kc_lift(i) = kcg(m.free[i]);
    }
}

ReducedSolver::~ReducedSolver() = default;

Eigen::VectorXd ReducedSolver::solve(double curl_coefficient, SolveStats* stats) {
    Impl& m = *impl_;
    SolveStats st;
    Eigen::VectorXd x = m.lift;
    if (!m.free.empty()) {
        SpMat K = m.K0;
        if (curl_coefficient != 0.0) {
            Eigen::Map<Eigen::VectorXd>(K.valuePtr(), K.nonZeros()) +=
                curl_coefficient * Eigen::Map<const Eigen::VectorXd>(m.Kc.valuePtr(), m.Kc.nonZeros());
        }
        if (!m.analyzed) {
            m.chol.analyzePattern(K);
            m.analyzed = true;
        }
        const Eigen::VectorXd b = m.b0 - curl_coefficient * m.kc_lift;
        const Eigen::VectorXd xf = finish_solve(m.chol, K, b, st);
        for (std::size_t i = 0; i < m.free.size(); ++i) x(m.free[i]) = xf(i);
    }
    if (stats) *stats = st;
    return x;
}

Eigen::VectorXd solve_spd(const SpMat& K, const Eigen::VectorXd& b, SolveStats* stats) {
    if (K.rows() != K.cols() || K.rows() != b.size()) throw InvalidParam("matrix and right-hand side sizes differ");
    SolveStats st;
    Cholesky chol;
    chol.analyzePattern(K);
    Eigen::VectorXd x = finish_solve(chol, K, b, st);
    if (stats) *stats = st;
    return x;
}

FieldSolution solve(const Layout& layout, const SparseSystem& system, const ConstraintSet& constraints) {
    FieldSolution sol;
    sol.layout = &layout;
    ReducedSolver rs(system, constraints);
    sol.coefficients = rs.solve(&sol.stats);
    return sol;
}

PointFields eval_field(const FieldSolution& sol, const Point& x) {
    const Layout& layout = *sol.layout;
    const Mesh& mesh = layout.mesh();
    const int cell = locate(mesh, x);
    if (cell < 0) throw PointOutsideMesh("no cell contains the point");
    const RefPoint ref = pull_back(mesh, cell, x);
    const std::array<RefPoint, 1> pts{ref};
    const RefTable ut = tabulate_at(layout.problem().u_space, pts);
    RefTable pt;
    if (layout.has_p()) pt = tabulate_at(layout.problem().p_space, pts);
    return evaluate(layout, sol.coefficients, cell, ut, layout.has_p() ? &pt : nullptr, 0, ref);
}

}  // namespace mmfem
