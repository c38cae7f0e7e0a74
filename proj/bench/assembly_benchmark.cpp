#include <benchmark/benchmark.h>

#include <omp.h>

#include "mmfem/assembly.hpp"
#include "mmfem/benchmarks.hpp"

using namespace mmfem;

namespace {

// Cube of 384 tetrahedra with the sweep material; args are the order and, for the parallel run, threads.
struct Fixture {
    Mesh mesh = generate_box(3, {-1, -1, -1}, {1, 1, 1}, {4, 4, 4});
    Problem pb;
    explicit Fixture(int p) {
        pb.model = Model::full3d;
        pb.mesh = &mesh;
        pb.params = bench::lc_sweep_params();
        pb.u_space = {Family::h1, p, 3};
        pb.p_space = {Family::nedelec1, p - 1, 3};
    }
};

void BM_AssembleSerial(benchmark::State& state) {
    const Fixture f(static_cast<int>(state.range(0)));
    const Layout layout(f.pb);
    for (auto _ : state) benchmark::DoNotOptimize(assemble_serial(layout));
    state.counters["dofs"] = layout.size();
}

void BM_AssembleParallel(benchmark::State& state) {
    const Fixture f(static_cast<int>(state.range(0)));
    const Layout layout(f.pb);
    const int threads = static_cast<int>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(assemble(layout, threads));
    state.counters["dofs"] = layout.size();
    state.counters["threads"] = threads;
}

void thread_args(benchmark::internal::Benchmark* b) {
    for (int p : {2, 3})
        for (int t = 1; t <= omp_get_max_threads(); t *= 2) b->Args({p, t});
}

}  // namespace

BENCHMARK(BM_AssembleSerial)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleParallel)->Apply(thread_args)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
