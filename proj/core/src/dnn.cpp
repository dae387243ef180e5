#include "lpvsdr/dnn.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

#include "lpvsdr/pca.hpp"

namespace lpvsdr {

Eigen::MatrixXd build_targets(const AffineLpvModel& model,
                              const TrajectoryDataset& dataset) {
  if (dataset.n_rho() != model.n_rho()) {
    throw std::invalid_argument("dataset dimension does not match the model");
  }
  Eigen::MatrixXd targets(model.variation_size(), dataset.samples());
  for (Eigen::Index j = 0; j < dataset.samples(); ++j) {
    targets.col(j) = model.variation_vec(dataset.gamma.col(j));
  }
  return targets;
}

DnnReducer::DnnReducer(nn::FeedforwardNet encoder, nn::DenseLayer matrix_layer,
                       Normalizer normalizer, Eigen::MatrixXd base_m0, int nx,
                       int nu, int ny, bool warm_started, nn::TrainTrace trace)
    : encoder_(std::move(encoder)),
      matrix_layer_(std::move(matrix_layer)),
      normalizer_(std::move(normalizer)),
      base_m0_(std::move(base_m0)),
      nx_(nx),
      nu_(nu),
      ny_(ny),
      warm_started_(warm_started),
      trace_(std::move(trace)) {
  if (matrix_layer_.activation != nn::Activation::linear) {
    throw std::invalid_argument("the matrix-mapping layer must be linear");
  }
  if (matrix_layer_.out_dim() != base_m0_.size()) {
    throw std::invalid_argument(
        "matrix layer output must match the vectorized model size");
  }
  if (encoder_.output_dim() != matrix_layer_.in_dim()) {
    throw std::invalid_argument("encoder output must feed the matrix layer");
  }
  if (encoder_.input_dim() != normalizer_.dim()) {
    throw std::invalid_argument("encoder input must match the normalizer");
  }
}

Eigen::VectorXd DnnReducer::map(const Eigen::VectorXd& rho) const {
  return encoder_.forward(normalizer_.apply(rho));
}

Eigen::MatrixXd DnnReducer::map_cols(const Eigen::MatrixXd& gamma) const {
  return encoder_.forward(normalizer_.apply_cols(gamma));
}

AffineLpvModel DnnReducer::reduced_model() const {
  const Eigen::Index rows = base_m0_.rows();
  const Eigen::Index cols = base_m0_.cols();
  Eigen::MatrixXd m0 =
      base_m0_ + Eigen::Map<const Eigen::MatrixXd>(matrix_layer_.bias.data(),
                                                   rows, cols);
  std::vector<Eigen::MatrixXd> coeffs;
  coeffs.reserve(static_cast<std::size_t>(matrix_layer_.in_dim()));
  for (Eigen::Index i = 0; i < matrix_layer_.in_dim(); ++i) {
    const Eigen::VectorXd col = matrix_layer_.weights.col(i);
    coeffs.emplace_back(
        Eigen::Map<const Eigen::MatrixXd>(col.data(), rows, cols));
  }
  return AffineLpvModel(std::move(m0), std::move(coeffs), nx_, nu_, ny_);
}

nn::TrainConfig default_dnn_train_config() {
  nn::TrainConfig cfg;
  cfg.optimizer = nn::Optimizer::adabound;
  cfg.learning_rate = 1e-3;
  cfg.final_lr = 0.1;
  cfg.epochs = 5000;
  cfg.weight_decay = 1e-6;
  cfg.plateau_epochs = 500;
  cfg.plateau_tol = 1e-10;
  return cfg;
}

namespace {

// Loads the PCA solution into the network: the first layer computes the
// shifted linear map relu(U' x + c) with c large enough to keep every
// preactivation positive over the normalized data, deeper layers pass it
// through, and the matrix layer removes the shift again. Returns false when
// a positive margin cannot be established.
bool load_warm_start(nn::FeedforwardNet& net, const PcaReducer& pca,
                     const AffineLpvModel& reduced_pca,
                     const AffineLpvModel& model,
                     const Eigen::MatrixXd& normalized_data) {
  const Eigen::Index n_phi = pca.basis().cols();
  auto& layers = net.layers();
  for (std::size_t k = 0; k + 1 < layers.size(); ++k) {
    if (layers[k].out_dim() < n_phi) return false;
  }

  Eigen::VectorXd shift(n_phi);
  for (Eigen::Index j = 0; j < n_phi; ++j) {
    shift[j] = pca.basis().col(j).cwiseAbs().sum() + 1.0;
  }
  {
    // Preactivation margin on the actual data.
    const Eigen::MatrixXd pre =
        (pca.basis().transpose() * normalized_data).colwise() + shift;
    if (pre.minCoeff() <= 0.0) return false;
  }

  auto& first = layers.front();
  first.weights.setZero();
  first.weights.topRows(n_phi) = pca.basis().transpose();
  first.bias.setZero();
  first.bias.head(n_phi) = shift;
  for (std::size_t k = 1; k + 1 < layers.size(); ++k) {
    layers[k].weights.setZero();
    layers[k].weights.topLeftCorner(n_phi, n_phi).setIdentity();
    layers[k].bias.setZero();
  }

  auto& last = layers.back();
  for (Eigen::Index j = 0; j < n_phi; ++j) {
    const auto& mj = reduced_pca.coeffs()[static_cast<std::size_t>(j)];
    last.weights.col(j) = Eigen::Map<const Eigen::VectorXd>(mj.data(), mj.size());
  }
  const Eigen::MatrixXd m0_delta = reduced_pca.m0() - model.m0();
  last.bias = Eigen::Map<const Eigen::VectorXd>(m0_delta.data(),
                                                m0_delta.size()) -
              last.weights * shift;
  return true;
}

}  // namespace

DnnReducer fit_dnn(const AffineLpvModel& model, const TrajectoryDataset& dataset,
                   int n_phi, const std::vector<int>& hidden_widths,
                   const nn::TrainConfig& cfg, bool warm_start) {
  dataset.check();
  if (n_phi < 1) {
    throw std::invalid_argument("n_phi must be at least 1");
  }
  if (hidden_widths.empty()) {
    throw std::invalid_argument("at least one hidden layer width is required");
  }
  if (dataset.n_rho() != model.n_rho()) {
    throw std::invalid_argument("dataset dimension does not match the model");
  }

  Normalizer normalizer = Normalizer::fit(dataset.gamma);
  const Eigen::MatrixXd inputs = normalizer.apply_cols(dataset.gamma);
  const Eigen::MatrixXd targets = build_targets(model, dataset);
  const int nv = static_cast<int>(model.variation_size());

  std::vector<int> widths = hidden_widths;
  widths.push_back(n_phi);
  std::vector<nn::Activation> acts(widths.size(), nn::Activation::relu);
  widths.push_back(nv);
  acts.push_back(nn::Activation::linear);

  nn::FeedforwardNet net = nn::FeedforwardNet::make(
      static_cast<int>(model.n_rho()), widths, acts, cfg.rng_seed);

  bool warm_started = false;
  if (warm_start) {
    const PcaReducer pca = fit_pca(dataset, n_phi);
    const AffineLpvModel reduced_pca = pca.reduced_model(model);
    warm_started = load_warm_start(net, pca, reduced_pca, model, inputs);
  }

  nn::TrainTrace trace = nn::train(net, inputs, targets, cfg);

  std::vector<nn::DenseLayer> encoder_layers(net.layers().begin(),
                                             net.layers().end() - 1);
  nn::DenseLayer matrix_layer = net.layers().back();
  return DnnReducer(nn::FeedforwardNet(std::move(encoder_layers)),
                    std::move(matrix_layer), std::move(normalizer), model.m0(),
                    model.nx(), model.nu(), model.ny(), warm_started,
                    std::move(trace));
}

}  // namespace lpvsdr
