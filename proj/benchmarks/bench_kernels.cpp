// Microbenchmarks for the hot kernels: cover construction, the smoothness
// estimators, net selection, and the two extension operators.  Domain
// construction stays outside the timed loops.
#include <benchmark/benchmark.h>

#include "bvlab/cover.hpp"
#include "bvlab/experiments.hpp"
#include "bvlab/extension.hpp"
#include "bvlab/norms.hpp"
#include "bvlab/space.hpp"

namespace {

using namespace bvlab;

space::Discretization make(space::Shape shape, double h) {
  space::DomainSpec spec;
  spec.shape = shape;
  spec.h = h;
  return space::build_domain(spec);
}

void bench_whitney_cover(benchmark::State& state) {
  const auto d =
      make(space::Shape::unit_square, 1.0 / static_cast<double>(state.range(0)));
  for (auto _ : state) {
    auto cov = cover::whitney_cover(d);
    benchmark::DoNotOptimize(cov.balls.data());
  }
}
BENCHMARK(bench_whitney_cover)->Arg(32)->Arg(64)->Arg(128);

void bench_partition_of_unity(benchmark::State& state) {
  const auto d = make(space::Shape::unit_square, 1.0 / 64);
  const auto cov = cover::whitney_cover(d);
  for (auto _ : state) {
    auto pou = cover::partition_of_unity(d, cov);
    benchmark::DoNotOptimize(pou.tent_sum.data());
  }
}
BENCHMARK(bench_partition_of_unity);

void bench_greedy_net(benchmark::State& state) {
  const auto d = make(space::Shape::disc, 1.0 / 128);
  for (auto _ : state) {
    auto net = cover::greedy_net(d.boundary_points, 1.0 / 32, 2.0);
    benchmark::DoNotOptimize(net.centers.data());
  }
}
BENCHMARK(bench_greedy_net);

void bench_besov_kernel(benchmark::State& state) {
  const auto d = make(space::Shape::disc, 1.0 / 64);
  const auto f = lab::fixture_field(d, "coordinate");
  for (auto _ : state) {
    auto rep = norms::besov_seminorm(d, f, 0.5, 1.0, norms::BesovMethod::kernel);
    benchmark::DoNotOptimize(rep.value);
  }
}
BENCHMARK(bench_besov_kernel);

void bench_extend_besov(benchmark::State& state) {
  const auto d = make(space::Shape::unit_square, 1.0 / 64);
  const auto cov = cover::whitney_cover(d);
  const auto pou = cover::partition_of_unity(d, cov);
  const auto f = lab::fixture_field(d, "coordinate");
  for (auto _ : state) {
    auto E = ext::extend_besov(d, cov, pou, f);
    benchmark::DoNotOptimize(E.F.values.data());
  }
}
BENCHMARK(bench_extend_besov);

void bench_extend_l1(benchmark::State& state) {
  const auto d = make(space::Shape::unit_square, 1.0 / 64);
  const auto f = lab::fixture_field(d, "step");
  for (auto _ : state) {
    auto E = ext::extend_l1(d, f, 20);
    benchmark::DoNotOptimize(E.F.values.data());
  }
}
BENCHMARK(bench_extend_l1);

void bench_bv_energy(benchmark::State& state) {
  const auto d = make(space::Shape::unit_square, 1.0 / 64);
  const auto cov = cover::whitney_cover(d);
  const auto pou = cover::partition_of_unity(d, cov);
  const auto E = ext::extend_besov(d, cov, pou,
                                   lab::fixture_field(d, "coordinate"));
  for (auto _ : state) {
    benchmark::DoNotOptimize(norms::bv_energy(d, E.F));
  }
}
BENCHMARK(bench_bv_energy);

}  // namespace

BENCHMARK_MAIN();
