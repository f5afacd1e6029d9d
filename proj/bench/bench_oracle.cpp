#include <benchmark/benchmark.h>
#include <omp.h>

#include "hullcert/oracle.hpp"

using namespace hullcert;

namespace {

Qcqp two_constraint_instance() {
  Matrix A1(3, 3), A2(3, 3);
  A1 << 1, 0, 0, 0, -1, 0, 0, 0, 0.5;
  A2 << -1, 0, 0, 0, 3, 0, 0, 0, 0.5;
  return Qcqp(QuadraticForm::zero(3), {QuadraticForm(A1, Vector::Zero(3), -1),
                                       QuadraticForm(A2, Vector::Zero(3), -1)});
}

void run(benchmark::State& state, oracle::Exec exec) {
  const Qcqp p = two_constraint_instance();
  const oracle::Box box = oracle::Box::cube(3, 3.0);
  const int res = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle::feasible_sample(p, box, res, exec).points.size());
  }
  state.SetItemsProcessed(state.iterations() * res * res * res);
}

void gap(benchmark::State& state, oracle::Exec exec) {
  const Qcqp p = two_constraint_instance();
  oracle::GapOptions opts;
  opts.box = oracle::Box::cube(3, 3.0);
  opts.resolution = static_cast<int>(state.range(0));
  const auto dirs = oracle::default_directions(3, 16, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle::hull_support_gap(p, dirs, opts, exec).max_gap);
  }
}

void BM_FeasibleSampleSerial(benchmark::State& s) { run(s, oracle::Exec::Serial); }
void BM_FeasibleSampleParallel(benchmark::State& s) { run(s, oracle::Exec::Parallel); }
void BM_SupportGapSerial(benchmark::State& s) { gap(s, oracle::Exec::Serial); }
void BM_SupportGapParallel(benchmark::State& s) { gap(s, oracle::Exec::Parallel); }

}  // namespace

BENCHMARK(BM_FeasibleSampleSerial)->Arg(41)->Arg(101)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FeasibleSampleParallel)->Arg(41)->Arg(101)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SupportGapSerial)->Arg(41)->Arg(101)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SupportGapParallel)->Arg(41)->Arg(101)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
