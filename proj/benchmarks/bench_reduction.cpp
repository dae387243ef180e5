#include <benchmark/benchmark.h>

#include "lpvsdr/dnn.hpp"
#include "lpvsdr/kpca.hpp"
#include "lpvsdr/manipulator.hpp"
#include "lpvsdr/nn.hpp"
#include "lpvsdr/pca.hpp"
#include "lpvsdr/simulation.hpp"

using namespace lpvsdr;

namespace {

TrajectoryDataset dataset_of(int samples) {
  ReferenceSpec spec = ReferenceSpec::reference1();
  spec.duration = (samples - 1) * spec.sample_time;
  return generate_scheduling_data(ManipulatorParams::nominal(),
                                  generate_reference(spec));
}

void FitPca(benchmark::State& state) {
  const TrajectoryDataset dataset = dataset_of(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_pca(dataset, 3));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(FitPca)->RangeMultiplier(4)->Range(128, 2048)->Complexity();

void FitKpca(benchmark::State& state) {
  const TrajectoryDataset dataset = dataset_of(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_kpca(dataset, KernelSpec{}, 3));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(FitKpca)->RangeMultiplier(2)->Range(64, 512)->Complexity();

// One full-batch forward/backward pass of the default architecture.
void TrainingEpoch(benchmark::State& state) {
  const AffineLpvModel model = build_lpv_model(ManipulatorParams::nominal());
  const TrajectoryDataset dataset = dataset_of(static_cast<int>(state.range(0)));
  const Normalizer nrm = Normalizer::fit(dataset.gamma);
  const Eigen::MatrixXd inputs = nrm.apply_cols(dataset.gamma);
  const Eigen::MatrixXd targets = build_targets(model, dataset);

  nn::FeedforwardNet net = nn::FeedforwardNet::make(
      10, {5, 2, 36},
      {nn::Activation::relu, nn::Activation::relu, nn::Activation::linear}, 1);
  nn::TrainConfig cfg = default_dnn_train_config();
  nn::NetGradients grads;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        nn::loss_and_gradients(net, inputs, targets, cfg, grads));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(TrainingEpoch)->RangeMultiplier(4)->Range(128, 2048)->Complexity();

}  // namespace

BENCHMARK_MAIN();
