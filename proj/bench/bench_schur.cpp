/*
 * Copyright 2026 The tester-bounds authors.
 *
 * Licensed under the Apache License, Version 2.0. See the LICENSE file in the
 * root directory of this source tree or http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <array>
#include <memory>
#include <random>

#include <benchmark/benchmark.h>
#include <omp.h>

#include "qtb/bounds.hpp"
#include "qtb/ipm.hpp"

namespace {

using namespace qtb;

struct Fixture {
  sdp::SdpData data;
  std::vector<RealMatrix> x, zinv;
};

RealMatrix random_pd(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  RealMatrix a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int k = 0; k < dim; ++k) a(i, k) = g(rng);
  return a * a.transpose() / dim + RealMatrix::Identity(dim, dim);
}

// Upper-bound program for the three-axis field with N = 2 and m vectors.
std::unique_ptr<Fixture> make_fixture(int m) {
  const auto fam = magnetic_field_family(1.0, 0.0);
  const std::array<double, 3> theta{0.5, 0.5, 0.7071067811865476};
  const ProcessData pd = process_data(fam, theta, 2);
  UpperBoundConfig cfg;
  cfg.m = m;
  cfg.strategy = StrategyClass(StrategyKind::parallel, 2);
  const auto vectors = sample_unit_vectors(m, 4, 1);
  const ConicProgram p = build_upper_program(pd, WeightMatrix::identity(3), cfg, vectors);
  auto f = std::make_unique<Fixture>();
  f->data = sdp::lower_program(real_embed(p)).data;
  std::mt19937_64 rng(11);
  for (const auto& b : f->data.blocks) {
    f->x.push_back(random_pd(b.dim, rng));
    f->zinv.push_back(random_pd(b.dim, rng));
  }
  return f;
}

const Fixture& fixture(int m) {
  static std::unique_ptr<Fixture> small = make_fixture(25);
  static std::unique_ptr<Fixture> large = make_fixture(125);
  return m == 25 ? *small : *large;
}

void BM_SchurReference(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sdp::schur_matrix_reference(f.data, f.x, f.zinv));
  state.counters["rows"] = f.data.num_rows();
}

void BM_SchurParallel(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(sdp::schur_matrix(f.data, f.x, f.zinv, threads));
  state.counters["rows"] = f.data.num_rows();
  state.counters["threads"] = threads;
}

void thread_args(benchmark::internal::Benchmark* b) {
  const int max_threads = omp_get_max_threads();
  for (int m : {25, 125})
    for (int t = 1; t <= max_threads; t *= 2) b->Args({m, t});
}

}  // namespace

BENCHMARK(BM_SchurReference)->Arg(25)->Arg(125)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SchurParallel)->Apply(thread_args)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
