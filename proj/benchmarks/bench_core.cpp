#include <benchmark/benchmark.h>

#include <random>

#include "lpvsdr/manipulator.hpp"
#include "lpvsdr/simulation.hpp"

using namespace lpvsdr;

namespace {

Eigen::Vector4d random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  return {dist(rng), dist(rng), dist(rng), dist(rng)};
}

void SchedulingMap(benchmark::State& state) {
  const ManipulatorParams params = ManipulatorParams::nominal();
  std::mt19937_64 rng(1);
  const Eigen::Vector4d x = random_state(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(scheduling_map(params, x));
  }
}
BENCHMARK(SchedulingMap);

void ModelEval(benchmark::State& state) {
  const ManipulatorParams params = ManipulatorParams::nominal();
  const AffineLpvModel model = build_lpv_model(params);
  std::mt19937_64 rng(2);
  const Eigen::VectorXd rho = scheduling_map(params, random_state(rng));
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.eval(rho));
  }
}
BENCHMARK(ModelEval);

void Rk4ManipulatorStep(benchmark::State& state) {
  const ManipulatorParams params = ManipulatorParams::nominal();
  const Dynamics field = [&params](const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& u) {
    return Eigen::VectorXd(dynamics(params, x, u));
  };
  const InputSignal input = [](double) {
    return Eigen::VectorXd(Eigen::Vector2d{0.5, -0.5});
  };
  std::mt19937_64 rng(3);
  const Eigen::VectorXd x0 = random_state(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate_rk4(field, x0, input, 0.01, 0.1));
  }
}
BENCHMARK(Rk4ManipulatorStep);

void LpvSimulation(benchmark::State& state) {
  const ManipulatorParams params = ManipulatorParams::nominal();
  const AffineLpvModel model = build_lpv_model(params);
  ReferenceSpec spec = ReferenceSpec::reference1();
  spec.duration = static_cast<double>(state.range(0)) * spec.sample_time;
  const TrajectoryDataset dataset =
      generate_scheduling_data(params, generate_reference(spec));
  const Eigen::MatrixXd input = Eigen::MatrixXd::Constant(2, dataset.samples(), 0.2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_lpv(model, dataset.gamma, input,
                                          Eigen::VectorXd::Zero(4),
                                          dataset.sample_time));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(LpvSimulation)->RangeMultiplier(4)->Range(64, 1024)->Complexity();

}  // namespace
