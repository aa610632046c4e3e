#include "curvebound/effective1d.hpp"
#include "curvebound/eigensolver.hpp"
#include "curvebound/linalg.hpp"
#include "curvebound/tubular2d.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <map>

using namespace curvebound;

namespace {

const CurvatureProfile& profile(int n_s) {
    static std::map<int, CurvatureProfile> cache;
    auto it = cache.find(n_s);
    if (it == cache.end()) {
        CurveSpec spec;
        spec.kind = EllipseSpec{2.0, 1.0};
        it = cache.emplace(n_s, make_profile(spec, n_s)).first;
    }
    return it->second;
}

RobinOperator2D sector(int n_s, int n_tau) {
    GridDims d;
    d.n_tau = n_tau;
    d.D = 8.0;
    return assemble(profile(n_s), 0.14, d, Domain::even_sector());
}

template <class Real>
BlockTridiagonal<Real> blocks_as(const BlockTridiagonal<quad>& q) {
    BlockTridiagonal<Real> b(q.blocks(), q.width());
    for (int k = 0; k < q.blocks(); ++k)
        for (int i = 0; i < q.width(); ++i) {
            b.diag(k, i) = static_cast<Real>(q.diag(k, i));
            b.inner(k, i) = static_cast<Real>(q.inner(k, i));
            b.coupling(k, i) = static_cast<Real>(q.coupling(k, i));
            b.mass(k, i) = static_cast<Real>(q.mass(k, i));
        }
    return b;
}

template <class Real>
void BM_BlockFactor(benchmark::State& state) {
    BlockTridiagonal<Real> b = blocks_as<Real>(sector(256, static_cast<int>(state.range(0))).to_block_quad());
    for (auto _ : state) benchmark::DoNotOptimize(b.factor(-1.2));
    state.SetComplexityN(state.range(0));
}

template <class Real>
void BM_BlockSolve(benchmark::State& state) {
    BlockTridiagonal<Real> b = blocks_as<Real>(sector(256, static_cast<int>(state.range(0))).to_block_quad());
    b.factor(-1.2);
    const std::vector<Real> rhs(b.size(), Real(1));
    for (auto _ : state) benchmark::DoNotOptimize(b.solve(rhs));
}

void BM_Assemble(benchmark::State& state) {
    const int n_s = static_cast<int>(state.range(0));
    GridDims d;
    d.n_tau = 48;
    d.D = 8.0;
    profile(n_s);
    for (auto _ : state) benchmark::DoNotOptimize(assemble(profile(n_s), 0.14, d, Domain::full()));
}

void BM_SparseLowest(benchmark::State& state) {
    GridDims d;
    d.n_tau = static_cast<int>(state.range(0));
    d.D = 8.0;
    const RobinOperator2D op = assemble(profile(256), 0.2, d, Domain::full());
    for (auto _ : state) benchmark::DoNotOptimize(solve_lowest(op, 2));
}

void BM_Inertia(benchmark::State& state) {
    GridDims d{static_cast<int>(state.range(0)), {TauMap::Kind::uniform, 2.0}, 8.0};
    const RobinOperator2D op = assemble(profile(512), std::pow(0.01, 0.25), d, Domain::full());
    for (auto _ : state) benchmark::DoNotOptimize(count_below(op.K, op.M, -0.5));
}

void BM_TunnelingSplitting(benchmark::State& state) {
    const EffectivePotential pot = effective_potential(profile(1024));
    const int n_s = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(tunneling_splitting(pot, 0.1, n_s));
}

}  // namespace

BENCHMARK(BM_BlockFactor<double>)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BlockFactor<quad>)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BlockSolve<double>)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BlockSolve<quad>)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Assemble)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SparseLowest)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Inertia)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TunnelingSplitting)->Arg(2048)->Arg(8192)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
