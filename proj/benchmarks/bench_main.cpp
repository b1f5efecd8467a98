#include <benchmark/benchmark.h>

#include "phigamma/local_field.hpp"

using namespace phigamma;

static void BM_ol_mul(benchmark::State& state) {
    auto F = LocalField::make(FieldParams{3, 2, 1, {}, {}});
    OLElement a = OLElement::from_int(F, 1234567, 4);
    OLElement b = OLElement::from_int(F, 7654321, 4);
    for (auto _ : state) benchmark::DoNotOptimize(a * b);
}
BENCHMARK(BM_ol_mul);

BENCHMARK_MAIN();
