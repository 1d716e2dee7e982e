// Microbenchmarks for the series algebra hot paths: product, Poisson
// bracket, majorant norm, homological solve and Lie pullback.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "bnf/engine.hpp"
#include "bnf/homology.hpp"
#include "bnf/lie.hpp"
#include "bnf/tf_series.hpp"

using namespace bnf;

namespace {

TFSeries random_series(std::mt19937& rng, int dim, int cap, int max_mode,
                       int terms, double amp) {
    std::uniform_int_distribution<int> edist(0, cap);
    std::uniform_int_distribution<int> kdist(-max_mode, max_mode);
    std::uniform_real_distribution<double> cdist(-amp, amp);
    TFSeries f(dim, cap);
    int placed = 0;
    while (placed < terms) {
        std::vector<int> j(dim), k(dim);
        int tot = 0;
        for (int& e : j) {
            e = edist(rng);
            tot += e;
        }
        if (tot < 2 || tot > cap) continue;
        bool zero = true;
        for (int& kk : k) {
            kk = kdist(rng);
            if (kk) zero = false;
        }
        if (zero) continue;
        Complex c{cdist(rng), cdist(rng)};
        TermKey key{MultiDegree{j}, WaveVector{k}};
        f.set(key.j, key.k, f.coeff(key) + c);
        TermKey mir{key.j, key.k.negated()};
        f.set(mir.j, mir.k, f.coeff(mir) + std::conj(c));
        ++placed;
    }
    return f;
}

}  // namespace

static void BM_mul(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    const int terms = static_cast<int>(state.range(1));
    std::mt19937 rng(17);
    TFSeries f = random_series(rng, dim, 17, 3, terms, 1.0);
    TFSeries g = random_series(rng, dim, 17, 3, terms, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(mul(f, g, 17));
    state.SetItemsProcessed(state.iterations() *
                            static_cast<long long>(terms) * terms);
}
BENCHMARK(BM_mul)->Args({1, 64})->Args({2, 256})->Args({3, 256});

static void BM_poisson_bracket(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    std::mt19937 rng(29);
    TFSeries f = random_series(rng, dim, 17, 3, 256, 1.0);
    TFSeries g = random_series(rng, dim, 17, 3, 256, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(poisson_bracket(f, g, 17));
}
BENCHMARK(BM_poisson_bracket)->Arg(1)->Arg(2)->Arg(3);

static void BM_majorant_norm(benchmark::State& state) {
    std::mt19937 rng(31);
    TFSeries f = random_series(rng, 2, 17, 4, 2048, 1.0);
    DomainBox box(0.5, 0.25);
    for (auto _ : state) benchmark::DoNotOptimize(majorant_norm(f, box));
}
BENCHMARK(BM_majorant_norm);

static void BM_solve_homological(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    std::mt19937 rng(37);
    QuadraticForm q(Eigen::MatrixXd::Identity(dim, dim));
    TFSeries F = random_series(rng, dim, 9, 4, 128, 1.0);
    TFSeries Q = poisson_bracket(q.n0(9), F, 9);
    for (auto _ : state) benchmark::DoNotOptimize(solve_homological(q, Q));
}
BENCHMARK(BM_solve_homological)->Arg(1)->Arg(2)->Arg(3);

static void BM_lie_pullback(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    std::mt19937 rng(41);
    TFSeries H = random_series(rng, dim, 17, 3, 256, 1.0);
    TFSeries F = random_series(rng, dim, 17, 2, 32, 0.01);
    // Generators need lowest degree >= 2 and zero average.
    F = project_nonzero_modes(project_degrees(F, 3, 17));
    for (auto _ : state) benchmark::DoNotOptimize(lie_pullback(H, F, 17));
}
BENCHMARK(BM_lie_pullback)->Arg(1)->Arg(2);

static void BM_newton_run(benchmark::State& state) {
    // A full 2-step normalization of a planted d=1 instance at cap 9.
    std::mt19937 rng(43);
    QuadraticForm q(Eigen::MatrixXd::Identity(1, 1));
    NormalFormProfile prof{q, {0.05, -0.03}};
    TFSeries G = random_series(rng, 1, 9, 2, 6, 0.005);
    G = project_nonzero_modes(project_degrees(G, 3, 9));
    TFSeries H = make_instance(prof, G, 9);
    EngineOptions opts;
    for (auto _ : state) benchmark::DoNotOptimize(run(H, q, 2, 9, opts));
}
BENCHMARK(BM_newton_run);

BENCHMARK_MAIN();
