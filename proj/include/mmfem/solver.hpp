#pragma once

#include <memory>

#include "mmfem/assembly.hpp"
#include "mmfem/dirichlet.hpp"

namespace mmfem {

inline constexpr double kResidualTolerance = 1e-10;

struct SolveStats {
    double residual = 0.0;  // ||K_FF x - b_F|| / ||b_F|| on the reduced system
    int refinement_steps = 0;
    bool used_cg = false;
    int cg_iterations = 0;
    int free_dofs = 0;
};

// Reduced system K_FF x = b_F - K_FC g over the unconstrained dofs.
// The symbolic factorization is shared by every curl coefficient on the same system.
// The solver keeps its own reduced copy; the system may be released after construction.
class ReducedSolver {
public:
    ReducedSolver(const SparseSystem& system, const ConstraintSet& constraints);
    ~ReducedSolver();
    ReducedSolver(const ReducedSolver&) = delete;
    ReducedSolver& operator=(const ReducedSolver&) = delete;

    // Full solution vector for K0 + coefficient * Kc. Throws NotPositiveDefinite or NonConvergence.
    Eigen::VectorXd solve(double curl_coefficient, SolveStats* stats = nullptr);
    Eigen::VectorXd solve(SolveStats* stats = nullptr) { return solve(curl_coefficient_, stats); }

private:
    struct Impl;
    double curl_coefficient_;
    std::unique_ptr<Impl> impl_;
};

// Symmetric positive definite solve of a plain sparse system, same contract.
Eigen::VectorXd solve_spd(const SpMat& K, const Eigen::VectorXd& b, SolveStats* stats = nullptr);

struct FieldSolution {
    const Layout* layout = nullptr;
    Eigen::VectorXd coefficients;
    SolveStats stats;
};

FieldSolution solve(const Layout& layout, const SparseSystem& system, const ConstraintSet& constraints);

// Fields at a physical point; the lowest-id containing cell wins. Throws PointOutsideMesh.
PointFields eval_field(const FieldSolution& sol, const Point& x);

}  // namespace mmfem
