#pragma once

#include <Eigen/Dense>
#include <vector>

#include "lpvsdr/dataset.hpp"
#include "lpvsdr/lpv_model.hpp"
#include "lpvsdr/nn.hpp"

namespace lpvsdr {

// Output data matrix: column j is the vectorized matrix variation at the
// (unnormalized) scheduling sample j.
Eigen::MatrixXd build_targets(const AffineLpvModel& model,
                              const TrajectoryDataset& dataset);

// ReLU encoder rho -> phi composed with an activation-free matrix-mapping
// layer whose weight columns are the vectorized reduced coefficient matrices
// and whose bias shifts the constant matrix. The reduced model is read
// directly off that layer; no refit step is needed.
class DnnReducer {
 public:
  DnnReducer(nn::FeedforwardNet encoder, nn::DenseLayer matrix_layer,
             Normalizer normalizer, Eigen::MatrixXd base_m0, int nx, int nu,
             int ny, bool warm_started = false, nn::TrainTrace trace = {});

  Eigen::VectorXd map(const Eigen::VectorXd& rho) const;
  Eigen::MatrixXd map_cols(const Eigen::MatrixXd& gamma) const;

  AffineLpvModel reduced_model() const;

  int n_phi() const { return static_cast<int>(matrix_layer_.in_dim()); }
  const nn::FeedforwardNet& encoder() const { return encoder_; }
  const nn::DenseLayer& matrix_layer() const { return matrix_layer_; }
  const Normalizer& normalizer() const { return normalizer_; }
  const Eigen::MatrixXd& base_m0() const { return base_m0_; }
  int nx() const { return nx_; }
  int nu() const { return nu_; }
  int ny() const { return ny_; }
  bool warm_started() const { return warm_started_; }
  const nn::TrainTrace& trace() const { return trace_; }

 private:
  nn::FeedforwardNet encoder_;
  nn::DenseLayer matrix_layer_;  // variation_size x n_phi, linear
  Normalizer normalizer_;
  Eigen::MatrixXd base_m0_;
  int nx_ = 0;
  int nu_ = 0;
  int ny_ = 0;
  bool warm_started_ = false;
  nn::TrainTrace trace_;
};

nn::TrainConfig default_dnn_train_config();

// Trains encoder and matrix layer end to end on the mean squared Frobenius
// objective over the dataset. With warm_start the network is initialized to
// replicate the PCA reduced model (shifted-relu pass-through of the linear
// map), so the starting cost matches PCA's; if the requested latent size
// exceeds a hidden width the warm start is infeasible and a random init is
// used with warm_started() reporting false.
DnnReducer fit_dnn(const AffineLpvModel& model, const TrajectoryDataset& dataset,
                   int n_phi, const std::vector<int>& hidden_widths,
                   const nn::TrainConfig& cfg, bool warm_start = false);

}  // namespace lpvsdr
