#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "mmfem/solver.hpp"

namespace mmfem::bench {

// Order p pairs the Bezier degree p with the Nedelec index p - 1.
struct BenchConfig {
    std::string benchmark;  // antiplane | bending | lc-sweep
    int p = 2;
    std::optional<int> refine;  // benchmark-specific default when unset
    Family family = Family::nedelec1;
    std::vector<double> lc;     // lc-sweep grid; default 16 log-spaced values in [1e-4, 1e3]
    std::string mesh_path;      // optional JSON mesh replacing the generated one
    int threads = 0;            // 0: OpenMP default
};

// Throws ConfigError for unknown benchmarks, invalid orders or family/order pairs.
void validate(const BenchConfig& cfg);
std::vector<double> default_lc_grid();
// Least-squares slope of log(err) against log(h) over the last three points.
double fitted_slope(const std::vector<double>& h, const std::vector<double>& err);

// Manufactured antiplane data on the disk of radius 10.
double antiplane_u(const Point& x);
Vec3 antiplane_p(const Point& x);
double antiplane_force(const Point& x);
Vec3 antiplane_moment(const Point& x);

struct AntiplaneRow {
    int level = 0;
    int rings = 0;
    double h = 0;
    int cells = 0;
    int dofs = 0;
    double err_u = 0, err_p = 0;
    double residual = 0;
};
struct AntiplaneResult {
    std::vector<AntiplaneRow> rows;
    double slope_u = 0, slope_p = 0;
};
// Ladder of disk meshes with 12 * 2^level rings, level = 0..refine (default 3).
// Six rings (h near 3) do not resolve the field, whose radial wavelength is about 1.6 at the rim.
AntiplaneResult run_antiplane(const BenchConfig& cfg);

// Cylindrical bending of a plate.
inline constexpr double kBendingKappa = 14.0 / 200.0;
MaterialParams bending_params();
Vec3 bending_u(const Point& x);
Eigen::Matrix3d bending_P(const Point& x);
double bending_P11(double z);

struct BendingResult {
    int cells = 0;
    int dofs = 0;
    std::vector<double> z, p11, exact;
    double amplitude = 0;      // max |exact P11| on the profile
    double max_deviation = 0;  // max |p11 - exact|
    double err_u = 0, err_p = 0;
    double residual = 0;
    bool used_cg = false;
};
// Box of 5(k+1) x 5(k+1) x 6(k+1) hexahedra split into tetrahedra, k = refine (default 0).
// Six layers through the thickness resolve the sinh boundary layer of P11; one layer does not.
BendingResult run_bending(const BenchConfig& cfg);

struct LcRow {
    double lc = 0;
    double energy = 0;
    double residual = 0;
};
struct LcSweepResult {
    int cells = 0;
    int dofs = 0;
    std::vector<LcRow> rows;
    double energy_macro = 0, energy_micro = 0;
    double residual_macro = 0, residual_micro = 0;
};
MaterialParams lc_sweep_params();
// Face data of the cube [-1, 1]^3, written over any scalar type; zero off the boundary.
template <class T>
std::array<T, 3> lc_sweep_displacement(const std::array<T, 3>& x) {
    using std::sin;
    const auto on = [&](int d) {
        double v;
        if constexpr (std::is_same_v<T, double>) v = x[d];
        else v = x[d].val;
        return std::abs(std::abs(v) - 1.0) < 1e-12;
    };
    constexpr double pi = std::numbers::pi;
    const T zero(0.0);
    if (on(0)) return {(1.0 - x[1] * x[1]) * sin(pi * (1.0 - x[2] * x[2])) / 10.0, zero, zero};
    if (on(1)) return {zero, (1.0 - x[0] * x[0]) * sin(pi * (1.0 - x[2] * x[2])) / 10.0, zero};
    if (on(2)) return {zero, zero, (1.0 - x[1] * x[1]) * sin(pi * (1.0 - x[0] * x[0])) / 10.0};
    return {zero, zero, zero};
}
// Cube with 2^(k+1) hexahedra per side, k = refine (default 0), 6 tetrahedra each.
LcSweepResult run_lc_sweep(const BenchConfig& cfg);
// Cauchy energy of the cube problem with the given Lame pair and Bezier degree.
double cauchy_energy(const Mesh& mesh, const LamePair& lame, int degree, int threads, double* residual = nullptr);

// CSV table and JSON summary into dir; returns the paths written.
std::vector<std::string> write_outputs(const BenchConfig& cfg, const AntiplaneResult& r, const std::string& dir);
std::vector<std::string> write_outputs(const BenchConfig& cfg, const BendingResult& r, const std::string& dir);
std::vector<std::string> write_outputs(const BenchConfig& cfg, const LcSweepResult& r, const std::string& dir);

}  // namespace mmfem::bench
