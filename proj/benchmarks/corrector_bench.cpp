#include <benchmark/benchmark.h>

#include "dglod/lod.hpp"

namespace {

using namespace dglod;

// Corrector solves for one coarse element at growing patch size.
void BM_ElementCorrectors(benchmark::State& state) {
  const MeshHierarchy hier(8, 64);
  const CoefficientField field{make_constant(1.0), {32.0, 0.0}};
  const FineProblem problem =
      assemble_fine_problem(hier, field, {}, [](double, double) { return 1.0; });
  const CoarseProjection proj = build_projection(hier);
  const int element = hier.coarse().element_index(3, 3);
  const int elements[] = {element};
  const int layers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_element_correctors(
        hier, problem, proj, elements, layers, CorrectorMode::kConvective));
  }
}
BENCHMARK(BM_ElementCorrectors)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

void BM_AllCorrectors(benchmark::State& state) {
  const MeshHierarchy hier(8, 32);
  const CoefficientField field{make_layered(32, 1.0, 0.01), {1.0, 0.0}};
  const FineProblem problem =
      assemble_fine_problem(hier, field, {}, [](double, double) { return 1.0; });
  const CoarseProjection proj = build_projection(hier);
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_correctors(hier, problem, proj,
                                                static_cast<int>(state.range(0)),
                                                CorrectorMode::kConvective));
  }
}
BENCHMARK(BM_AllCorrectors)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace
