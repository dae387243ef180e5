#pragma once

#include <Eigen/Dense>

#include "lpvsdr/dataset.hpp"
#include "lpvsdr/nn.hpp"

namespace lpvsdr {

// Fixed affine map between the [-1, 1] normalized range and [0.1, 0.9], so
// logsig outputs can actually reach the training targets.
struct RangeRescaler {
  double gain = 0.4;
  double offset = 0.5;

  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const {
    return (gain * x).array() + offset;
  }
  Eigen::MatrixXd invert(const Eigen::MatrixXd& y) const {
    return (y.array() - offset) / gain;
  }
};

// Two-layer autoencoder: logsig encoder rho -> phi and logsig decoder
// phi -> rho^, trained on reconstruction of the rescaled normalized data.
class AeReducer {
 public:
  AeReducer(nn::DenseLayer encoder, nn::DenseLayer decoder,
            RangeRescaler rescaler, Normalizer normalizer,
            nn::TrainTrace trace = {});

  Eigen::VectorXd map(const Eigen::VectorXd& rho) const;
  Eigen::MatrixXd map_cols(const Eigen::MatrixXd& gamma) const;
  Eigen::VectorXd inverse(const Eigen::VectorXd& phi) const;
  Eigen::MatrixXd inverse_cols(const Eigen::MatrixXd& phi) const;

  int n_phi() const { return static_cast<int>(encoder_.out_dim()); }
  const nn::DenseLayer& encoder() const { return encoder_; }
  const nn::DenseLayer& decoder() const { return decoder_; }
  const RangeRescaler& rescaler() const { return rescaler_; }
  const Normalizer& normalizer() const { return normalizer_; }
  const nn::TrainTrace& trace() const { return trace_; }

 private:
  nn::DenseLayer encoder_;
  nn::DenseLayer decoder_;
  RangeRescaler rescaler_;
  Normalizer normalizer_;
  nn::TrainTrace trace_;
};

nn::TrainConfig default_ae_train_config();

AeReducer fit_ae(const TrajectoryDataset& dataset, int n_phi,
                 const nn::TrainConfig& cfg);

}  // namespace lpvsdr
