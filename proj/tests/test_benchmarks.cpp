#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "mmfem/benchmarks.hpp"
#include "mmfem/errors.hpp"

using namespace mmfem;
using namespace mmfem::bench;

namespace {

BenchConfig config(const std::string& name, int p = 2, Family f = Family::nedelec1) {
    BenchConfig c;
    c.benchmark = name;
    c.p = p;
    c.family = f;
    return c;
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("mmfem_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

int run_cli(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " + BENCH_EXE + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Central second difference.
template <class F>
double second_derivative(F f, double z, double h = 1e-4) {
    return (f(z + h) - 2 * f(z) + f(z - h)) / (h * h);
}

}  // namespace

TEST(Config, RejectsBadInput) {
    EXPECT_NO_THROW(validate(config("antiplane")));
    EXPECT_THROW(validate(config("torsion")), ConfigError);
    EXPECT_THROW(validate(config("bending", 0)), ConfigError);
    EXPECT_THROW(validate(config("bending", 11)), ConfigError);
    EXPECT_THROW(validate(config("bending", 1, Family::nedelec2)), ConfigError);
    EXPECT_THROW(validate(config("bending", 2, Family::h1)), ConfigError);
    auto c = config("lc-sweep");
    c.lc = {1.0, -1.0};
    EXPECT_THROW(validate(c), ConfigError);
    c.lc = {std::nan("")};
    EXPECT_THROW(validate(c), ConfigError);
    c.lc = {};
    c.refine = 7;
    EXPECT_THROW(validate(c), ConfigError);
}

TEST(Config, DefaultGridSpansSevenDecades) {
    const auto g = default_lc_grid();
    ASSERT_EQ(g.size(), 16u);
    EXPECT_NEAR(g.front(), 1e-4, 1e-18);
    EXPECT_NEAR(g.back(), 1e3, 1e-9);
    for (std::size_t i = 1; i < g.size(); ++i) EXPECT_NEAR(std::log10(g[i] / g[i - 1]), 7.0 / 15.0, 1e-12);
}

TEST(Slope, RecoversPowerLawFromLastThreePoints) {
    // The first point is off the power law and must be ignored.
    const std::vector<double> h = {8, 4, 2, 1};
    std::vector<double> e = {1.0};
    for (std::size_t i = 1; i < h.size(); ++i) e.push_back(0.3 * std::pow(h[i], 2.5));
    EXPECT_NEAR(fitted_slope(h, e), 2.5, 1e-12);
    EXPECT_EQ(fitted_slope({1.0}, {1.0}), 0.0);
}

TEST(AntiplaneData, MomentAndForceMatchFiniteDifferences) {
    const double r = 1e-6;
    for (const Point x : {Point{1.0, 2.0, 0.0}, Point{-3.0, 0.5, 0.0}, Point{6.0, -6.0, 0.0}}) {
        const double dux = (antiplane_u({x[0] + r, x[1], 0}) - antiplane_u({x[0] - r, x[1], 0})) / (2 * r);
        const double duy = (antiplane_u({x[0], x[1] + r, 0}) - antiplane_u({x[0], x[1] - r, 0})) / (2 * r);
        const Vec3 p = antiplane_p(x);
        const Vec3 m = antiplane_moment(x);
        // p + x/10 is half the gradient of u; the moment is -x/5.
        EXPECT_NEAR(p[0] + x[0] / 10.0, dux / 2.0, 1e-7);
        EXPECT_NEAR(p[1] + x[1] / 10.0, duy / 2.0, 1e-7);
        EXPECT_DOUBLE_EQ(m[0], -x[0] / 5.0);
        EXPECT_DOUBLE_EQ(m[1], -x[1] / 5.0);
    }
    EXPECT_DOUBLE_EQ(antiplane_u({0, 0, 0}), 0.0);
    EXPECT_NEAR(antiplane_force({0, 0, 0}), -15.0 / 25.0, 1e-15);
}

TEST(BendingData, ExactFieldsAtKnownPoints) {
    const Vec3 u = bending_u({1, 0, 0});
    EXPECT_DOUBLE_EQ(u[0], 0.0);
    EXPECT_DOUBLE_EQ(u[1], 0.0);
    EXPECT_NEAR(u[2], 0.035, 1e-15);
    EXPECT_DOUBLE_EQ(bending_P11(0.0), 0.0);
    for (double z : {0.1, 0.27, 0.5}) EXPECT_NEAR(bending_P11(-z), -bending_P11(z), 1e-16);
}

TEST(BendingData, ProfileSolvesTheThicknessEquation) {
    // 41 g - g''/2 = s z with g'(+-1/2) = s, where s = -kappa.
    const double s = -kBendingKappa;
    for (double z : {-0.45, -0.2, 0.1, 0.4}) {
        const double lhs = 41 * bending_P11(z) - second_derivative(bending_P11, z) / 2;
        EXPECT_NEAR(lhs, s * z, 1e-7);
    }
    const double h = 1e-6;
    for (double z : {-0.5, 0.5}) {
        const double d = (bending_P11(z + h) - bending_P11(z - h)) / (2 * h);
        EXPECT_NEAR(d, s, 1e-8);
    }
}

TEST(LcData, FaceFormulasAgreeOnCubeEdges) {
    for (double t : {-0.7, 0.0, 0.4}) {
        for (double a : {-1.0, 1.0}) {
            for (double b : {-1.0, 1.0}) {
                for (const auto& x : {std::array<double, 3>{a, b, t}, std::array<double, 3>{a, t, b},
                                      std::array<double, 3>{t, a, b}}) {
                    const auto v = lc_sweep_displacement(x);
                    EXPECT_NEAR(std::hypot(v[0], v[1], v[2]), 0.0, 1e-15);
                }
            }
        }
    }
    const auto mid = lc_sweep_displacement(std::array<double, 3>{1.0, 0.0, 0.0});
    EXPECT_NEAR(mid[0], 0.0, 1e-15);  // sin(pi) at the face centre
    const auto q = lc_sweep_displacement(std::array<double, 3>{1.0, 0.5, 0.5});
    EXPECT_NEAR(q[0], 0.75 * std::sin(0.75 * std::numbers::pi) / 10.0, 1e-15);
}

TEST(LcSweep, EnergiesAreMonotoneAndBounded) {
    auto c = config("lc-sweep", 3);
    c.lc = {0.0, 1e-2, 0.3, 1.0, 3.0, 30.0, 1e3};
    const LcSweepResult r = run_lc_sweep(c);
    EXPECT_EQ(r.cells, 48);
    ASSERT_EQ(r.rows.size(), c.lc.size());
    for (std::size_t i = 1; i < r.rows.size(); ++i) EXPECT_GE(r.rows[i].energy, r.rows[i - 1].energy * (1 - 1e-12));
    for (const auto& row : r.rows) {
        EXPECT_GE(row.energy, (1 - 1e-3) * r.energy_macro);
        EXPECT_LE(row.energy, (1 + 1e-3) * r.energy_micro);
        EXPECT_LE(row.residual, kResidualTolerance);
    }
    EXPECT_NEAR(r.rows.back().energy, r.energy_micro, 1e-4 * r.energy_micro);
    EXPECT_NEAR(r.energy_micro / r.energy_macro, 5.0, 1e-9);  // the micro pair is five times the macro pair
}

TEST(Bending, QuadraticPairStaysNearTheProfile) {
    const BendingResult r = run_bending(config("bending", 2));
    ASSERT_EQ(r.z.size(), 101u);
    EXPECT_NEAR(r.amplitude, std::abs(bending_P11(0.5)), 1e-15);
    EXPECT_LE(r.max_deviation, 0.05 * r.amplitude);
    EXPECT_FALSE(r.used_cg);
    EXPECT_LE(r.residual, kResidualTolerance);
}

TEST(Outputs, CsvAndJsonAreWritten) {
    auto c = config("lc-sweep", 2);
    c.lc = {0.5, 2.0};
    const LcSweepResult r = run_lc_sweep(c);
    const auto dir = scratch("outputs");
    const auto files = write_outputs(c, r, dir.string());
    ASSERT_EQ(files.size(), 2u);
    EXPECT_EQ(std::filesystem::path(files[0]).filename(), "lc-sweep_p2_nedelec1.csv");
    std::ifstream csv(files[0]);
    int lines = 0;
    for (std::string s; std::getline(csv, s);) ++lines;
    EXPECT_EQ(lines, 3);
    std::ifstream js(files[1]);
    const auto j = nlohmann::json::parse(js);
    EXPECT_EQ(j["config"]["benchmark"], "lc-sweep");
    EXPECT_NEAR(j["energy_macro"].get<double>(), r.energy_macro, 1e-15);
}

TEST(Cli, ExitCodes) {
    const auto dir = scratch("cli");
    EXPECT_EQ(run_cli("lc-sweep --p 2 --lc 1 --out " + dir.string()), 0);
    EXPECT_TRUE(std::filesystem::exists(dir / "lc-sweep_p2_nedelec1.json"));
    EXPECT_NE(run_cli(""), 0);
    EXPECT_NE(run_cli("torsion"), 0);
    EXPECT_NE(run_cli("bending --family nedelec3"), 0);
    EXPECT_NE(run_cli("bending --p 1 --family nedelec2"), 0);
    EXPECT_NE(run_cli("lc-sweep --lc -1"), 0);
    EXPECT_NE(run_cli("lc-sweep --refine -2"), 0);
    EXPECT_NE(run_cli("bending --mesh /nonexistent.json"), 0);
    EXPECT_NE(run_cli("lc-sweep --lc 1", "MM_FEM_THREADS=zero"), 0);
    EXPECT_EQ(run_cli("lc-sweep --p 2 --lc 1 --out " + dir.string(), "MM_FEM_THREADS=1"), 0);
}
