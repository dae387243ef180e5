#include "lpvsdr/autoencoder.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace lpvsdr {

AeReducer::AeReducer(nn::DenseLayer encoder, nn::DenseLayer decoder,
                     RangeRescaler rescaler, Normalizer normalizer,
                     nn::TrainTrace trace)
    : encoder_(std::move(encoder)),
      decoder_(std::move(decoder)),
      rescaler_(rescaler),
      normalizer_(std::move(normalizer)),
      trace_(std::move(trace)) {
  if (encoder_.in_dim() != decoder_.out_dim() ||
      encoder_.out_dim() != decoder_.in_dim()) {
    throw std::invalid_argument("encoder and decoder shapes do not match");
  }
  if (encoder_.in_dim() != normalizer_.dim()) {
    throw std::invalid_argument("encoder input must match the normalizer");
  }
  if (rescaler_.gain == 0.0) {
    throw std::invalid_argument("rescaler gain must be nonzero");
  }
}

Eigen::VectorXd AeReducer::map(const Eigen::VectorXd& rho) const {
  return encoder_.apply(rescaler_.apply(normalizer_.apply(rho)));
}

Eigen::MatrixXd AeReducer::map_cols(const Eigen::MatrixXd& gamma) const {
  return encoder_.apply(rescaler_.apply(normalizer_.apply_cols(gamma)));
}

Eigen::VectorXd AeReducer::inverse(const Eigen::VectorXd& phi) const {
  return normalizer_.invert(rescaler_.invert(decoder_.apply(phi)));
}

Eigen::MatrixXd AeReducer::inverse_cols(const Eigen::MatrixXd& phi) const {
  return normalizer_.invert_cols(rescaler_.invert(decoder_.apply(phi)));
}

nn::TrainConfig default_ae_train_config() {
  nn::TrainConfig cfg;
  cfg.optimizer = nn::Optimizer::adam;
  cfg.learning_rate = 5e-3;
  cfg.epochs = 4000;
  cfg.weight_decay = 1e-5;
  cfg.sparsity_weight = 0.5;
  cfg.sparsity_target = 0.05;
  cfg.plateau_epochs = 400;
  cfg.plateau_tol = 1e-10;
  return cfg;
}

AeReducer fit_ae(const TrajectoryDataset& dataset, int n_phi,
                 const nn::TrainConfig& cfg) {
  dataset.check();
  const int n_rho = static_cast<int>(dataset.n_rho());
  if (n_phi < 1 || n_phi > n_rho) {
    throw std::invalid_argument("n_phi must lie in [1, n_rho], got " +
                                std::to_string(n_phi));
  }

  Normalizer normalizer = Normalizer::fit(dataset.gamma);
  RangeRescaler rescaler;
  const Eigen::MatrixXd targets =
      rescaler.apply(normalizer.apply_cols(dataset.gamma));

  nn::FeedforwardNet net = nn::FeedforwardNet::make(
      n_rho, {n_phi, n_rho},
      {nn::Activation::logsig, nn::Activation::logsig}, cfg.rng_seed);
  nn::TrainTrace trace = nn::train(net, targets, targets, cfg);

  return AeReducer(net.layers()[0], net.layers()[1], rescaler,
                   std::move(normalizer), std::move(trace));
}

}  // namespace lpvsdr
