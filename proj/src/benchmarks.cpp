#include "mmfem/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "mmfem/errors.hpp"

namespace mmfem::bench {

namespace {

const char* family_name(Family f) {
    switch (f) {
        case Family::nedelec1: return "nedelec1";
        case Family::nedelec2: return "nedelec2";
        case Family::h1: return "h1";
    }
    return "?";
}

int default_refine(const BenchConfig& cfg) {
    if (cfg.refine) return *cfg.refine;
    return cfg.benchmark == "antiplane" ? 3 : 0;
}

double max_edge_length(const Mesh& mesh) {
    double h = 0;
    for (const auto& e : mesh.edges) {
        const auto& a = mesh.vertices[e[0]];
        const auto& b = mesh.vertices[e[1]];
        h = std::max(h, std::hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]));
    }
    return h;
}

Mesh load_mesh(const BenchConfig& cfg, int dim) {
    Mesh m = read_json(cfg.mesh_path);
    if (m.dim != dim) throw ConfigError("mesh dimension does not fit the benchmark");
    return m;
}

std::string stem(const BenchConfig& cfg) {
    return cfg.benchmark + "_p" + std::to_string(cfg.p) + "_" + family_name(cfg.family);
}

nlohmann::json config_json(const BenchConfig& cfg) {
    return {{"benchmark", cfg.benchmark},
            {"p", cfg.p},
            {"refine", default_refine(cfg)},
            {"family", family_name(cfg.family)},
            {"mesh", cfg.mesh_path},
            {"threads", cfg.threads}};
}

std::vector<std::string> write_files(const BenchConfig& cfg, const std::string& dir, const std::string& csv,
                                     const nlohmann::json& summary) {
    std::filesystem::create_directories(dir);
    const std::string base = (std::filesystem::path(dir) / stem(cfg)).string();
    std::ofstream c(base + ".csv");
    c << csv;
    std::ofstream j(base + ".json");
    j << summary.dump(2) << '\n';
    if (!c || !j) throw ConfigError("cannot write outputs to " + dir);
    return {base + ".csv", base + ".json"};
}

std::ostringstream csv_stream() {
    std::ostringstream s;
    s << std::setprecision(12);
    return s;
}

}  // namespace

void validate(const BenchConfig& cfg) {
    if (cfg.benchmark != "antiplane" && cfg.benchmark != "bending" && cfg.benchmark != "lc-sweep")
        throw ConfigError("unknown benchmark '" + cfg.benchmark + "'");
    if (cfg.p < 1) throw ConfigError("order must be at least 1");
    if (cfg.p > 10) throw ConfigError("order above 10 is not supported");
    if (cfg.family == Family::h1) throw ConfigError("family must be nedelec1 or nedelec2");
    if (cfg.family == Family::nedelec2 && cfg.p < 2) throw ConfigError("the second family needs order 2 or more");
    const int r = default_refine(cfg);
    if (r < 0 || r > 6) throw ConfigError("refine must lie in [0, 6]");
    for (double l : cfg.lc)
        if (!(l >= 0) || !std::isfinite(l)) throw ConfigError("Lc values must be finite and nonnegative");
    if (cfg.threads < 0) throw ConfigError("thread count must be nonnegative");
}

std::vector<double> default_lc_grid() {
    std::vector<double> g(16);
    for (int i = 0; i < 16; ++i) g[i] = std::pow(10.0, -4.0 + 7.0 * i / 15.0);
    return g;
}

double fitted_slope(const std::vector<double>& h, const std::vector<double>& err) {
    const std::size_t n = std::min(h.size(), err.size());
    if (n < 2) return 0.0;
    const std::size_t first = n >= 3 ? n - 3 : 0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(n - first);
    for (std::size_t i = first; i < n; ++i) {
        const double x = std::log(h[i]), y = std::log(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

// ---------------------------------------------------------------- antiplane

double antiplane_u(const Point& x) { return std::sin((x[0] * x[0] + x[1] * x[1]) / 5.0); }

Vec3 antiplane_p(const Point& x) {
    const double c = std::cos((x[0] * x[0] + x[1] * x[1]) / 5.0) / 5.0 - 0.1;
    return {c * x[0], c * x[1], 0.0};
}

double antiplane_force(const Point& x) {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    return (2 * r2 * std::sin(r2 / 5.0) - 10 * std::cos(r2 / 5.0) - 5) / 25.0;
}

Vec3 antiplane_moment(const Point& x) { return {-x[0] / 5.0, -x[1] / 5.0, 0.0}; }

AntiplaneResult run_antiplane(const BenchConfig& cfg) {
    validate(cfg);
    std::vector<Mesh> meshes;
    if (!cfg.mesh_path.empty()) {
        meshes.push_back(load_mesh(cfg, 2));
    } else {
        for (int level = 0; level <= default_refine(cfg); ++level) meshes.push_back(generate_disk(10.0, 12 << level));
    }
    const auto data = boundary_data([](auto x) {
        using std::sin;
        return std::array{sin((x[0] * x[0] + x[1] * x[1]) / 5.0), x[0] * 0.0, x[0] * 0.0};
    });
    AntiplaneResult res;
    std::vector<double> hs, eu, ep;
    for (std::size_t level = 0; level < meshes.size(); ++level) {
        const Mesh& mesh = meshes[level];
        Problem pb;
        pb.model = Model::antiplane;
        pb.mesh = &mesh;
        pb.params = {.lambda_e = 0, .mu_e = 1, .lambda_micro = 0, .mu_micro = 1, .mu_c = 0,
                     .lambda_macro = 0, .mu_macro = 1, .Lc = 1};
        pb.u_space = {Family::h1, cfg.p, 2};
        pb.p_space = {cfg.family, cfg.p - 1, 2};
        pb.loads.f_scalar = antiplane_force;
        pb.loads.m = antiplane_moment;
        pb.quad_degree = std::min(2 * cfg.p + 2, kMaxQuadratureDegree);
        const Layout layout(pb);
        const SparseSystem sys = assemble(layout, cfg.threads);
        const ConstraintSet cs = build_constraints(layout, data);
        const FieldSolution sol = solve(layout, sys, cs);

        const int qd = std::min(2 * cfg.p + 6, kMaxQuadratureDegree);
        AntiplaneRow row;
        row.level = static_cast<int>(level);
        row.rings = cfg.mesh_path.empty() ? 12 << level : 0;
        row.h = max_edge_length(mesh);
        row.cells = mesh.num_cells();
        row.dofs = layout.size();
        row.err_u = l2_error(layout, sol.coefficients, FieldKind::u,
                             [](const Point& x) {
                                 Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
                                 m(0, 0) = antiplane_u(x);
                                 return m;
                             },
                             qd);
        row.err_p = l2_error(layout, sol.coefficients, FieldKind::p,
                             [](const Point& x) {
                                 Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
                                 const Vec3 p = antiplane_p(x);
                                 m(0, 0) = p[0];
                                 m(0, 1) = p[1];
                                 return m;
                             },
                             qd);
        row.residual = sol.stats.residual;
        res.rows.push_back(row);
        hs.push_back(row.h);
        eu.push_back(row.err_u);
        ep.push_back(row.err_p);
    }
    res.slope_u = fitted_slope(hs, eu);
    res.slope_p = fitted_slope(hs, ep);
    return res;
}

// ---------------------------------------------------------------- bending

MaterialParams bending_params() {
    return {.lambda_e = 0, .mu_e = 0.5, .lambda_micro = 0, .mu_micro = 20, .mu_c = 0,
            .lambda_macro = 0, .mu_macro = 0.5, .Lc = 1};
}

Vec3 bending_u(const Point& x) {
    const double k = kBendingKappa;
    return {-k * x[0] * x[2], 0.0, k * x[0] * x[0] / 2};
}

double bending_P11(double z) {
    const double s82 = std::sqrt(82.0);
    return -kBendingKappa * (41 * z + 20 * s82 / std::cosh(std::sqrt(41.0 / 2.0)) * std::sinh(s82 * z)) / 1681.0;
}

Eigen::Matrix3d bending_P(const Point& x) {
    const double k = kBendingKappa;
    Eigen::Matrix3d P = Eigen::Matrix3d::Zero();
    P(0, 0) = bending_P11(x[2]);
    P(0, 2) = -k * x[0];
    P(2, 0) = k * x[0];
    return P;
}

BendingResult run_bending(const BenchConfig& cfg) {
    validate(cfg);
    const int k = default_refine(cfg) + 1;
    const Mesh mesh =
        cfg.mesh_path.empty() ? generate_box(3, {-10, -10, -0.5}, {10, 10, 0.5}, {5 * k, 5 * k, 6 * k}) : load_mesh(cfg, 3);
    Problem pb;
    pb.model = Model::full3d;
    pb.mesh = &mesh;
    pb.params = bending_params();
    pb.u_space = {Family::h1, cfg.p, 3};
    pb.p_space = {cfg.family, cfg.p - 1, 3};
    const Layout layout(pb);
    const SparseSystem sys = assemble(layout, cfg.threads);
    constexpr double shift = 3.5;
    const auto data = boundary_data([](auto x) {
        const double kk = kBendingKappa;
        return std::array{-kk * x[0] * x[2], x[0] * 0.0, kk * x[0] * x[0] / 2.0 - shift};
    });
    const ConstraintSet cs = build_constraints(layout, data, {"xmin", "xmax"});
    const FieldSolution sol = solve(layout, sys, cs);

    BendingResult res;
    res.cells = mesh.num_cells();
    res.dofs = layout.size();
    res.residual = sol.stats.residual;
    res.used_cg = sol.stats.used_cg;
    for (int i = 0; i <= 100; ++i) {
        const double z = -0.5 + i / 100.0;
        const PointFields f = eval_field(sol, {0.0, 0.0, z});
        res.z.push_back(z);
        res.p11.push_back(f.P(0, 0));
        res.exact.push_back(bending_P11(z));
        res.amplitude = std::max(res.amplitude, std::abs(res.exact.back()));
        res.max_deviation = std::max(res.max_deviation, std::abs(res.p11.back() - res.exact.back()));
    }
    const int qd = std::min(2 * cfg.p + 6, kMaxQuadratureDegree);
    res.err_u = l2_error(layout, sol.coefficients, FieldKind::u,
                         [](const Point& x) {
                             const Vec3 u = bending_u(x);
                             Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
                             m.col(0) << u[0], u[1], u[2] - shift;
                             return m;
                         },
                         qd);
    res.err_p = l2_error(layout, sol.coefficients, FieldKind::p, bending_P, qd);
    return res;
}

// ---------------------------------------------------------------- Lc sweep

MaterialParams lc_sweep_params() {
    MaterialParams mp{.lambda_e = 0, .mu_e = 0, .lambda_micro = 10, .mu_micro = 5, .mu_c = 1,
                      .lambda_macro = 2, .mu_macro = 1, .Lc = 1};
    return with_meso(mp);
}

double cauchy_energy(const Mesh& mesh, const LamePair& lame, int degree, int threads, double* residual) {
    Problem pb;
    pb.model = Model::cauchy;
    pb.mesh = &mesh;
    pb.cauchy = lame;
    pb.u_space = {Family::h1, degree, 3};
    const Layout layout(pb);
    const SparseSystem sys = assemble(layout, threads);
    const auto data = boundary_data([](auto x) { return lc_sweep_displacement(x); });
    const ConstraintSet cs = build_constraints(layout, data);
    const FieldSolution sol = solve(layout, sys, cs);
    if (residual) *residual = sol.stats.residual;
    return compute_energy(layout, sol.coefficients);
}

LcSweepResult run_lc_sweep(const BenchConfig& cfg) {
    validate(cfg);
    const int n = 2 << default_refine(cfg);
    const Mesh mesh = cfg.mesh_path.empty() ? generate_box(3, {-1, -1, -1}, {1, 1, 1}, {n, n, n}) : load_mesh(cfg, 3);
    const std::vector<double> grid = cfg.lc.empty() ? default_lc_grid() : cfg.lc;
    Problem pb;
    pb.model = Model::full3d;
    pb.mesh = &mesh;
    pb.params = lc_sweep_params();
    pb.u_space = {Family::h1, cfg.p, 3};
    pb.p_space = {cfg.family, cfg.p - 1, 3};
    const Layout layout(pb);
    auto sys = std::make_unique<const SparseSystem>(assemble(layout, cfg.threads));
    const auto data = boundary_data([](auto x) { return lc_sweep_displacement(x); });

    LcSweepResult res;
    res.cells = mesh.num_cells();
    res.dofs = layout.size();
    // Constraints on P exist only with a curvature term, so Lc = 0 gets its own reduction.
    std::unique_ptr<ConstraintSet> cs_curl, cs_flat;
    std::unique_ptr<ReducedSolver> curl_solver, flat_solver;
    for (const bool curved : {true, false}) {
        if (std::none_of(grid.begin(), grid.end(), [&](double lc) { return (lc > 0) == curved; })) continue;
        auto& cs = curved ? cs_curl : cs_flat;
        cs = std::make_unique<ConstraintSet>(build_constraints(layout, data, {}, curved));
        (curved ? curl_solver : flat_solver) = std::make_unique<ReducedSolver>(*sys, *cs);
    }
    sys.reset();  // the reduced copies are all the sweep needs
    for (double lc : grid) {
        auto& rs = lc > 0 ? curl_solver : flat_solver;
        SolveStats st;
        const Eigen::VectorXd x = rs->solve(pb.params.mu_macro * lc * lc, &st);
        res.rows.push_back({lc, compute_energy(layout, x, lc), st.residual});
    }
    const MaterialParams& mp = pb.params;
    res.energy_macro = cauchy_energy(mesh, {mp.mu_macro, mp.lambda_macro}, cfg.p, cfg.threads, &res.residual_macro);
    res.energy_micro = cauchy_energy(mesh, {mp.mu_micro, mp.lambda_micro}, cfg.p, cfg.threads, &res.residual_micro);
    return res;
}

// ---------------------------------------------------------------- outputs

std::vector<std::string> write_outputs(const BenchConfig& cfg, const AntiplaneResult& r, const std::string& dir) {
    auto csv = csv_stream();
    csv << "level,rings,h,cells,dofs,err_u,err_p,residual\n";
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& x : r.rows) {
        csv << x.level << ',' << x.rings << ',' << x.h << ',' << x.cells << ',' << x.dofs << ',' << x.err_u << ','
            << x.err_p << ',' << x.residual << '\n';
        rows.push_back({{"level", x.level}, {"h", x.h}, {"dofs", x.dofs}, {"err_u", x.err_u}, {"err_p", x.err_p},
                        {"residual", x.residual}});
    }
    nlohmann::json s = {{"config", config_json(cfg)}, {"slope_u", r.slope_u}, {"slope_p", r.slope_p}, {"rows", rows}};
    return write_files(cfg, dir, csv.str(), s);
}

std::vector<std::string> write_outputs(const BenchConfig& cfg, const BendingResult& r, const std::string& dir) {
    auto csv = csv_stream();
    csv << "z,p11,exact,deviation\n";
    for (std::size_t i = 0; i < r.z.size(); ++i)
        csv << r.z[i] << ',' << r.p11[i] << ',' << r.exact[i] << ',' << r.p11[i] - r.exact[i] << '\n';
    nlohmann::json s = {{"config", config_json(cfg)},
                        {"cells", r.cells},
                        {"dofs", r.dofs},
                        {"amplitude", r.amplitude},
                        {"max_deviation", r.max_deviation},
                        {"relative_deviation", r.max_deviation / r.amplitude},
                        {"err_u", r.err_u},
                        {"err_p", r.err_p},
                        {"residual", r.residual}};
    return write_files(cfg, dir, csv.str(), s);
}

std::vector<std::string> write_outputs(const BenchConfig& cfg, const LcSweepResult& r, const std::string& dir) {
    auto csv = csv_stream();
    csv << "lc,energy,residual\n";
    nlohmann::json rows = nlohmann::json::array();
    bool monotone = true;
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        const auto& x = r.rows[i];
        csv << x.lc << ',' << x.energy << ',' << x.residual << '\n';
        rows.push_back({{"lc", x.lc}, {"energy", x.energy}, {"residual", x.residual}});
        if (i > 0 && x.lc > r.rows[i - 1].lc && x.energy < r.rows[i - 1].energy) monotone = false;
    }
    nlohmann::json s = {{"config", config_json(cfg)},
                        {"cells", r.cells},
                        {"dofs", r.dofs},
                        {"energy_macro", r.energy_macro},
                        {"energy_micro", r.energy_micro},
                        {"monotone", monotone},
                        {"rows", rows}};
    return write_files(cfg, dir, csv.str(), s);
}

}  // namespace mmfem::bench
