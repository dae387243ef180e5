#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

namespace lpvsdr::nn {

enum class Activation { relu, logsig, tanh_fn, linear };

Eigen::MatrixXd activate(Activation act, const Eigen::MatrixXd& z);
// Derivative of the activation expressed through its own output value.
// relu uses a subgradient of 0 at the kink.
Eigen::MatrixXd activation_grad(Activation act, const Eigen::MatrixXd& output);

struct DenseLayer {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd bias;     // out
  Activation activation = Activation::linear;

  Eigen::Index in_dim() const { return weights.cols(); }
  Eigen::Index out_dim() const { return weights.rows(); }
  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
};

// Uniform init in +-sqrt(6 / (fan_in + fan_out)), four times wider for
// logsig; biases start at zero.
DenseLayer make_layer(int in_dim, int out_dim, Activation act,
                      std::mt19937_64& rng);

class FeedforwardNet {
 public:
  FeedforwardNet() = default;
  explicit FeedforwardNet(std::vector<DenseLayer> layers);

  static FeedforwardNet make(int input_dim, const std::vector<int>& widths,
                             const std::vector<Activation>& activations,
                             std::uint64_t seed);

  Eigen::Index input_dim() const;
  Eigen::Index output_dim() const;
  std::size_t depth() const { return layers_.size(); }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }

  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;
  // activations[0] is the input batch; activations[k + 1] the output of
  // layer k.
  std::vector<Eigen::MatrixXd> forward_all(const Eigen::MatrixXd& x) const;

 private:
  std::vector<DenseLayer> layers_;
};

enum class Optimizer { sgd, adam, adabound };

struct TrainConfig {
  Optimizer optimizer = Optimizer::adam;
  double learning_rate = 1e-3;
  double final_lr = 0.1;  // adabound asymptotic step size
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int epochs = 1000;
  int batch_size = 0;  // 0 = full batch
  double weight_decay = 0.0;
  double sparsity_weight = 0.0;
  double sparsity_target = 0.05;
  double dropout_rate = 0.0;  // hidden layers, training passes only
  std::uint64_t rng_seed = 1;
  bool monotone = false;  // full batch only: reject cost-increasing steps
  int plateau_epochs = 0;  // 0 = no early stop
  double plateau_tol = 1e-10;

  void check() const;
};

struct LossParts {
  double total = 0.0;
  double mse = 0.0;  // mean over samples of the squared residual norm
  double weight_penalty = 0.0;
  double sparsity_penalty = 0.0;
};

struct NetGradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> bias;
};

// sum_j  t log(t/q_j) + (1-t) log((1-t)/(1-q_j)); nonnegative, zero iff
// every mean activation equals the target.
double kl_sparsity_penalty(const Eigen::ArrayXd& mean_activation,
                           double target);

LossParts evaluate_loss(const FeedforwardNet& net, const Eigen::MatrixXd& inputs,
                        const Eigen::MatrixXd& targets, const TrainConfig& cfg);

// Reverse-mode gradients of the full objective (data term, weight decay,
// sparsity) with respect to every weight and bias.
LossParts loss_and_gradients(const FeedforwardNet& net,
                             const Eigen::MatrixXd& inputs,
                             const Eigen::MatrixXd& targets,
                             const TrainConfig& cfg, NetGradients& grads);

// First and second moment accumulators for one flattened parameter tensor.
struct MomentState {
  Eigen::ArrayXd m;
  Eigen::ArrayXd v;

  static MomentState zeros(Eigen::Index n);
};

void sgd_step(Eigen::Ref<Eigen::ArrayXd> params,
              const Eigen::Ref<const Eigen::ArrayXd>& grad,
              const TrainConfig& cfg, double scale = 1.0);

void adam_step(Eigen::Ref<Eigen::ArrayXd> params,
               const Eigen::Ref<const Eigen::ArrayXd>& grad, MomentState& state,
               long t, const TrainConfig& cfg, double scale = 1.0);

// Adam moments with bias correction; the per-coordinate step factor
// lr / sqrt(v^) is clipped between bounds that pinch to final_lr:
//   lower(t) = final_lr * (1 - 1 / ((1 - beta2) t + 1))
//   upper(t) = final_lr * (1 + 1 / ((1 - beta2) t))
void adabound_step(Eigen::Ref<Eigen::ArrayXd> params,
                   const Eigen::Ref<const Eigen::ArrayXd>& grad,
                   MomentState& state, long t, const TrainConfig& cfg,
                   double scale = 1.0);

double adabound_lower_bound(long t, const TrainConfig& cfg);
double adabound_upper_bound(long t, const TrainConfig& cfg);

struct TrainTrace {
  // loss[0] is the objective before any update, then one entry per epoch.
  std::vector<double> loss;
  std::vector<double> mse;
  int epochs_run = 0;
  bool early_stopped = false;

  double final_loss() const { return loss.empty() ? 0.0 : loss.back(); }
  double final_mse() const { return mse.empty() ? 0.0 : mse.back(); }
};

// Deterministic given the seed. Throws on non-finite loss, naming the epoch.
TrainTrace train(FeedforwardNet& net, const Eigen::MatrixXd& inputs,
                 const Eigen::MatrixXd& targets, const TrainConfig& cfg);

}  // namespace lpvsdr::nn
