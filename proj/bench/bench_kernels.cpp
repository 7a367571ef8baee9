// Serial versus OpenMP comparisons for the data-parallel kernels.

#include <benchmark/benchmark.h>

#include "nesslab/fock.hpp"
#include "nesslab/linops.hpp"

using namespace nesslab;

namespace {

Matrix test_matrix(int n) { return random_matrix(n, 42); }

void bm_contour_serial(benchmark::State& state) {
  const Matrix a = test_matrix(8);
  linops::Contour c{40.0, 2.0, static_cast<int>(state.range(0))};
  auto f = [&](Complex z) { return linops::resolvent(a, z); };
  for (auto _ : state) {
    Matrix p = linops::contour_integral_serial(f, c);
    benchmark::DoNotOptimize(p.data());
  }
}

void bm_contour_omp(benchmark::State& state) {
  const Matrix a = test_matrix(8);
  linops::Contour c{40.0, 2.0, static_cast<int>(state.range(0))};
  auto f = [&](Complex z) { return linops::resolvent(a, z); };
  for (auto _ : state) {
    Matrix p = linops::contour_integral(f, c);
    benchmark::DoNotOptimize(p.data());
  }
}

void bm_kron_serial(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix a = random_matrix(n, 7), b = random_matrix(n, 8);
  for (auto _ : state) {
    Matrix k = fock::kron_serial(a, b);
    benchmark::DoNotOptimize(k.data());
  }
}

void bm_kron_omp(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix a = random_matrix(n, 7), b = random_matrix(n, 8);
  for (auto _ : state) {
    Matrix k = fock::kron(a, b);
    benchmark::DoNotOptimize(k.data());
  }
}

void bm_smeared_field(benchmark::State& state) {
  fock::FockSpace f(fock::ModeGrid::symmetric(static_cast<int>(state.range(0)), 4.0, 2.0));
  Vector fn = random_vector(f.modes(), 3);
  for (auto _ : state) {
    Matrix a = f.a(fn);
    benchmark::DoNotOptimize(a.data());
  }
}

}  // namespace

BENCHMARK(bm_contour_serial)->Arg(64)->Arg(256);
BENCHMARK(bm_contour_omp)->Arg(64)->Arg(256);
BENCHMARK(bm_kron_serial)->Arg(16)->Arg(32)->Arg(48);
BENCHMARK(bm_kron_omp)->Arg(16)->Arg(32)->Arg(48);
BENCHMARK(bm_smeared_field)->Arg(8)->Arg(10);

BENCHMARK_MAIN();
