#include <benchmark/benchmark.h>

#include "qbounds/liouvillian.hpp"
#include "qbounds/monitoring.hpp"
#include "qbounds/statistics.hpp"
#include "qbounds/trajectory.hpp"

using namespace qbounds;

namespace {

LindbladModel maser() { return build_three_level_maser({0.0, 1.0, 1.0, 1.0, 5.0, 0.01}); }

StateVector excited2() {
  StateVector psi = StateVector::Zero(3);
  psi(1) = 1.0;
  return psi;
}

}  // namespace

static void BM_PropagatorDerivative(benchmark::State& state) {
  const auto m = maser();
  const auto scheme = make_scheme(m, BoundKind::kur);
  std::vector<Operator> d;
  for (const auto& p : scheme.params) d.push_back(p.heff_derivative);
  const Operator heff = m.effective_hamiltonian();
  for (auto _ : state) benchmark::DoNotOptimize(propagator_and_derivative(heff, d, 0.37));
}
BENCHMARK(BM_PropagatorDerivative);

static void BM_SampleTrajectory(benchmark::State& state) {
  const auto m = maser();
  const SamplerConfig config;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_trajectory(m, excited2(), 10.0, ++seed, config));
}
BENCHMARK(BM_SampleTrajectory);

static void BM_Scores(benchmark::State& state) {
  const auto m = maser();
  const auto records = run_ensemble(m, InitialCondition::basis(3, 1), 10.0, 64, 1);
  const FisherMonitor monitor(m, make_scheme(m, BoundKind::kur));
  for (auto _ : state) benchmark::DoNotOptimize(ensemble_scores(monitor, records, 1));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(records.size()));
}
BENCHMARK(BM_Scores);

static void BM_Bootstrap(benchmark::State& state) {
  const Eigen::MatrixXd rows = Eigen::MatrixXd::Random(state.range(0), 5);
  const Bootstrap bootstrap(200, 7);
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap.replicate_means(rows));
}
BENCHMARK(BM_Bootstrap)->Arg(10000)->Arg(50000);

BENCHMARK_MAIN();
