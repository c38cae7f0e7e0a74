#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include "mmfem/benchmarks.hpp"
#include "mmfem/errors.hpp"

using namespace mmfem;

namespace {

int threads_from_env() {
    const char* v = std::getenv("MM_FEM_THREADS");
    if (!v || !*v) return 0;
    try {
        std::size_t used = 0;
        const int n = std::stoi(v, &used);
        if (used != std::string(v).size() || n < 1) throw std::invalid_argument(v);
        return n;
    } catch (const std::exception&) {
        throw ConfigError(std::string("MM_FEM_THREADS must be a positive integer, got '") + v + "'");
    }
}

void report(const bench::AntiplaneResult& r) {
    for (const auto& row : r.rows)
        std::printf("level %d  h %.4g  dofs %d  err_u %.6e  err_p %.6e  residual %.2e\n", row.level, row.h, row.dofs,
                    row.err_u, row.err_p, row.residual);
    std::printf("slope_u %.3f  slope_p %.3f\n", r.slope_u, r.slope_p);
}

void report(const bench::BendingResult& r) {
    std::printf("cells %d  dofs %d  P11 deviation %.4e of amplitude %.4e (%.2f%%)  residual %.2e\n", r.cells, r.dofs,
                r.max_deviation, r.amplitude, 100 * r.max_deviation / r.amplitude, r.residual);
}

void report(const bench::LcSweepResult& r) {
    for (const auto& row : r.rows) std::printf("Lc %.4e  energy %.8f  residual %.2e\n", row.lc, row.energy, row.residual);
    std::printf("macro bound %.8f  micro bound %.8f\n", r.energy_macro, r.energy_micro);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Relaxed micromorphic benchmarks"};
    app.require_subcommand(1);
    bench::BenchConfig cfg;
    std::string family = "nedelec1";
    std::string out = "bench_out";
    int refine = -1;
    for (const char* name : {"antiplane", "bending", "lc-sweep"}) {
        CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " benchmark");
        sub->add_option("--p", cfg.p, "polynomial order (Bezier degree; Nedelec index p-1)")->capture_default_str();
        sub->add_option("--refine", refine, "refinement level (benchmark default when omitted)");
        sub->add_option("--family", family, "Nedelec family")
            ->check(CLI::IsMember({"nedelec1", "nedelec2"}))
            ->capture_default_str();
        sub->add_option("--lc", cfg.lc, "Lc values, comma separated")->delimiter(',');
        sub->add_option("--out", out, "output directory")->capture_default_str();
        sub->add_option("--mesh", cfg.mesh_path, "JSON mesh replacing the generated one");
    }
    CLI11_PARSE(app, argc, argv);

    try {
        cfg.benchmark = app.get_subcommands().front()->get_name();
        cfg.family = family == "nedelec2" ? Family::nedelec2 : Family::nedelec1;
        if (refine >= 0) cfg.refine = refine;
        else if (app.get_subcommands().front()->count("--refine")) throw ConfigError("refine must be nonnegative");
        cfg.threads = threads_from_env();
        bench::validate(cfg);

        std::vector<std::string> files;
        if (cfg.benchmark == "antiplane") {
            const auto r = bench::run_antiplane(cfg);
            report(r);
            files = bench::write_outputs(cfg, r, out);
        } else if (cfg.benchmark == "bending") {
            const auto r = bench::run_bending(cfg);
            report(r);
            files = bench::write_outputs(cfg, r, out);
        } else {
            const auto r = bench::run_lc_sweep(cfg);
            report(r);
            files = bench::write_outputs(cfg, r, out);
        }
        for (const auto& f : files) std::printf("wrote %s\n", f.c_str());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
