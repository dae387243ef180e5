#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "lpvsdr/autoencoder.hpp"
#include "test_helpers.hpp"

using namespace lpvsdr;

namespace {

// Low-complexity two-channel sinusoidal samples.
TrajectoryDataset sinusoid_dataset(int samples = 200) {
  TrajectoryDataset dataset;
  dataset.gamma.resize(2, samples);
  for (int k = 0; k < samples; ++k) {
    const double t = 0.1 * k;
    dataset.gamma(0, k) = std::sin(0.5 * t);
    dataset.gamma(1, k) = 0.5 * std::sin(0.9 * t + 0.3);
  }
  dataset.sample_time = 0.1;
  return dataset;
}

}  // namespace

TEST_SUITE_BEGIN("autoencoder");

TEST_CASE("full-width autoencoder reconstructs a simple dataset") {
  const TrajectoryDataset dataset = sinusoid_dataset();
  nn::TrainConfig cfg;
  cfg.optimizer = nn::Optimizer::adam;
  cfg.learning_rate = 1e-2;
  cfg.epochs = 4000;
  cfg.weight_decay = 0.0;
  cfg.sparsity_weight = 0.0;
  cfg.rng_seed = 1;
  const AeReducer reducer = fit_ae(dataset, 2, cfg);
  CHECK(reducer.trace().final_mse() <= 1e-3);

  // Round trip through the fitted maps stays close on the training data.
  const Eigen::MatrixXd recon =
      reducer.inverse_cols(reducer.map_cols(dataset.gamma));
  const double rms = std::sqrt((recon - dataset.gamma).squaredNorm() /
                               static_cast<double>(dataset.samples()));
  CHECK(rms < 0.2);
}

TEST_CASE("full-batch training with a small rate is almost monotone") {
  const TrajectoryDataset dataset = sinusoid_dataset(100);
  nn::TrainConfig cfg;
  cfg.optimizer = nn::Optimizer::sgd;
  cfg.learning_rate = 0.02;
  cfg.epochs = 500;
  cfg.weight_decay = 0.0;
  cfg.sparsity_weight = 0.0;
  cfg.rng_seed = 2;
  const AeReducer reducer = fit_ae(dataset, 1, cfg);
  const auto& loss = reducer.trace().loss;
  int increases = 0;
  for (std::size_t e = 1; e < loss.size(); ++e) {
    if (loss[e] > loss[e - 1]) ++increases;
  }
  CHECK(increases <= static_cast<int>(loss.size()) / 20);
}

TEST_CASE("a constant dataset trains to the bias solution") {
  TrajectoryDataset dataset;
  dataset.gamma = Eigen::MatrixXd::Constant(3, 20, 1.7);
  dataset.sample_time = 1.0;
  nn::TrainConfig cfg;
  cfg.optimizer = nn::Optimizer::adam;
  cfg.learning_rate = 1e-2;
  cfg.epochs = 1500;
  cfg.weight_decay = 0.0;
  cfg.sparsity_weight = 0.0;
  cfg.rng_seed = 3;
  const AeReducer reducer = fit_ae(dataset, 1, cfg);
  CHECK(reducer.trace().final_mse() < 1e-8);

  const Eigen::MatrixXd phi = reducer.map_cols(dataset.gamma);
  for (Eigen::Index j = 1; j < phi.cols(); ++j) {
    CHECK(phi.col(j) == phi.col(0));
  }
}

TEST_CASE("latent values live strictly inside the unit interval") {
  const TrajectoryDataset dataset = sinusoid_dataset(60);
  nn::TrainConfig cfg = default_ae_train_config();
  cfg.epochs = 200;
  const AeReducer reducer = fit_ae(dataset, 2, cfg);
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd phi =
        reducer.map(testutil::random_vector(2, rng, -2.0, 2.0));
    CHECK(phi.minCoeff() > 0.0);
    CHECK(phi.maxCoeff() < 1.0);
  }
  // Deterministic mapping.
  const Eigen::VectorXd probe = testutil::random_vector(2, rng);
  CHECK(reducer.map(probe) == reducer.map(probe));
}

TEST_CASE("reconstructions stay inside the rescale image") {
  const TrajectoryDataset dataset = sinusoid_dataset(60);
  nn::TrainConfig cfg = default_ae_train_config();
  cfg.epochs = 100;
  const AeReducer reducer = fit_ae(dataset, 1, cfg);
  std::mt19937_64 rng(62);
  const Normalizer& nrm = reducer.normalizer();
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd rho_hat =
        reducer.inverse(testutil::random_vector(1, rng, 0.01, 0.99));
    const Eigen::VectorXd back = nrm.apply(rho_hat);
    // logsig output in (0,1) unrescales into (-1.25, 1.25)
    CHECK(back.cwiseAbs().maxCoeff() < 1.25);
  }
}

TEST_CASE("latent size bounds are enforced") {
  const TrajectoryDataset dataset = sinusoid_dataset(30);
  nn::TrainConfig cfg = default_ae_train_config();
  cfg.epochs = 1;
  CHECK_THROWS_AS(fit_ae(dataset, 0, cfg), std::invalid_argument);
  CHECK_THROWS_AS(fit_ae(dataset, 3, cfg), std::invalid_argument);
}

TEST_CASE("mismatched encoder and decoder shapes are rejected") {
  std::mt19937_64 rng(63);
  nn::DenseLayer enc = nn::make_layer(3, 2, nn::Activation::logsig, rng);
  nn::DenseLayer bad_dec = nn::make_layer(3, 3, nn::Activation::logsig, rng);
  CHECK_THROWS_AS(AeReducer(enc, bad_dec, RangeRescaler{},
                            Normalizer(Eigen::VectorXd::Zero(3),
                                       Eigen::VectorXd::Ones(3))),
                  std::invalid_argument);
}

TEST_SUITE_END();
