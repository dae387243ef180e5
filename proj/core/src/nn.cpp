#include "lpvsdr/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

namespace lpvsdr::nn {

namespace {

constexpr double kMeanClamp = 1e-12;

Eigen::Map<Eigen::ArrayXd> flat(Eigen::MatrixXd& m) {
  return {m.data(), m.size()};
}
Eigen::Map<Eigen::ArrayXd> flat(Eigen::VectorXd& v) {
  return {v.data(), v.size()};
}
Eigen::Map<const Eigen::ArrayXd> flat(const Eigen::MatrixXd& m) {
  return {m.data(), m.size()};
}
Eigen::Map<const Eigen::ArrayXd> flat(const Eigen::VectorXd& v) {
  return {v.data(), v.size()};
}

}  // namespace

Eigen::MatrixXd activate(Activation act, const Eigen::MatrixXd& z) {
  switch (act) {
    case Activation::relu:
      return z.cwiseMax(0.0);
    case Activation::logsig:
      return (1.0 / (1.0 + (-z.array()).exp())).matrix();
    case Activation::tanh_fn:
      return z.array().tanh().matrix();
    case Activation::linear:
      return z;
  }
  throw std::invalid_argument("unknown activation");
}

Eigen::MatrixXd activation_grad(Activation act, const Eigen::MatrixXd& output) {
  switch (act) {
    case Activation::relu:
      return (output.array() > 0.0).cast<double>().matrix();
    case Activation::logsig:
      return (output.array() * (1.0 - output.array())).matrix();
    case Activation::tanh_fn:
      return (1.0 - output.array().square()).matrix();
    case Activation::linear:
      return Eigen::MatrixXd::Ones(output.rows(), output.cols());
  }
  throw std::invalid_argument("unknown activation");
}

Eigen::MatrixXd DenseLayer::apply(const Eigen::MatrixXd& x) const {
  if (x.rows() != in_dim()) {
    throw std::invalid_argument("layer expects input dimension " +
                                std::to_string(in_dim()) + ", got " +
                                std::to_string(x.rows()));
  }
  return activate(activation, (weights * x).colwise() + bias);
}

DenseLayer make_layer(int in_dim, int out_dim, Activation act,
                      std::mt19937_64& rng) {
  if (in_dim < 1 || out_dim < 1) {
    throw std::invalid_argument("layer dimensions must be positive");
  }
  double limit = std::sqrt(6.0 / (in_dim + out_dim));
  if (act == Activation::logsig) limit *= 4.0;
  std::uniform_real_distribution<double> dist(-limit, limit);

  DenseLayer layer;
  layer.activation = act;
  layer.weights.resize(out_dim, in_dim);
  for (Eigen::Index j = 0; j < layer.weights.cols(); ++j) {
    for (Eigen::Index i = 0; i < layer.weights.rows(); ++i) {
      layer.weights(i, j) = dist(rng);
    }
  }
  layer.bias = Eigen::VectorXd::Zero(out_dim);
  return layer;
}

FeedforwardNet::FeedforwardNet(std::vector<DenseLayer> layers)
    : layers_(std::move(layers)) {
  for (std::size_t k = 1; k < layers_.size(); ++k) {
    if (layers_[k].in_dim() != layers_[k - 1].out_dim()) {
      throw std::invalid_argument("layer " + std::to_string(k) +
                                  " input does not match the previous output");
    }
  }
}

FeedforwardNet FeedforwardNet::make(int input_dim,
                                    const std::vector<int>& widths,
                                    const std::vector<Activation>& activations,
                                    std::uint64_t seed) {
  if (widths.empty() || widths.size() != activations.size()) {
    throw std::invalid_argument("widths and activations must match, nonempty");
  }
  std::mt19937_64 rng(seed);
  std::vector<DenseLayer> layers;
  layers.reserve(widths.size());
  int in = input_dim;
  for (std::size_t k = 0; k < widths.size(); ++k) {
    layers.push_back(make_layer(in, widths[k], activations[k], rng));
    in = widths[k];
  }
  return FeedforwardNet(std::move(layers));
}

Eigen::Index FeedforwardNet::input_dim() const {
  return layers_.empty() ? 0 : layers_.front().in_dim();
}

Eigen::Index FeedforwardNet::output_dim() const {
  return layers_.empty() ? 0 : layers_.back().out_dim();
}

Eigen::MatrixXd FeedforwardNet::forward(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd a = x;
  for (const auto& layer : layers_) a = layer.apply(a);
  return a;
}

std::vector<Eigen::MatrixXd> FeedforwardNet::forward_all(
    const Eigen::MatrixXd& x) const {
  std::vector<Eigen::MatrixXd> acts;
  acts.reserve(layers_.size() + 1);
  acts.push_back(x);
  for (const auto& layer : layers_) acts.push_back(layer.apply(acts.back()));
  return acts;
}

void TrainConfig::check() const {
  if (!(learning_rate > 0.0)) {
    throw std::invalid_argument("learning_rate must be positive");
  }
  if (!(final_lr > 0.0)) {
    throw std::invalid_argument("final_lr must be positive");
  }
  if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
    throw std::invalid_argument("betas must lie in [0, 1)");
  }
  if (epochs < 0 || batch_size < 0) {
    throw std::invalid_argument("epochs and batch_size must be nonnegative");
  }
  if (weight_decay < 0.0 || sparsity_weight < 0.0) {
    throw std::invalid_argument("regularization weights must be nonnegative");
  }
  if (sparsity_target <= 0.0 || sparsity_target >= 1.0) {
    throw std::invalid_argument("sparsity_target must lie in (0, 1)");
  }
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
    throw std::invalid_argument("dropout_rate must lie in [0, 1)");
  }
  if (monotone && batch_size != 0) {
    throw std::invalid_argument("monotone descent requires full batches");
  }
}

double kl_sparsity_penalty(const Eigen::ArrayXd& mean_activation,
                           double target) {
  const Eigen::ArrayXd q =
      mean_activation.max(kMeanClamp).min(1.0 - kMeanClamp);
  return (target * (target / q).log() +
          (1.0 - target) * ((1.0 - target) / (1.0 - q)).log())
      .sum();
}

namespace {

struct ForwardPass {
  std::vector<Eigen::MatrixXd> raw;  // raw[k+1]: output of layer k, pre-mask
  std::vector<Eigen::MatrixXd> eff;  // post-dropout, feeds the next layer
};

ForwardPass run_forward(const FeedforwardNet& net, const Eigen::MatrixXd& x,
                        const std::vector<Eigen::ArrayXXd>* masks) {
  ForwardPass fp;
  fp.raw.reserve(net.depth() + 1);
  fp.eff.reserve(net.depth() + 1);
  fp.raw.push_back(x);
  fp.eff.push_back(x);
  for (std::size_t k = 0; k < net.depth(); ++k) {
    Eigen::MatrixXd a = net.layers()[k].apply(fp.eff.back());
    if (masks && k + 1 < net.depth()) {
      fp.raw.push_back(a);
      fp.eff.push_back(((*masks)[k] * a.array()).matrix());
    } else {
      fp.raw.push_back(a);
      fp.eff.push_back(std::move(a));
    }
  }
  return fp;
}

LossParts loss_impl(const FeedforwardNet& net, const Eigen::MatrixXd& inputs,
                    const Eigen::MatrixXd& targets, const TrainConfig& cfg,
                    const std::vector<Eigen::ArrayXXd>* masks,
                    NetGradients* grads) {
  if (inputs.rows() != net.input_dim()) {
    throw std::invalid_argument("input dimension does not match the network");
  }
  if (targets.rows() != net.output_dim() || targets.cols() != inputs.cols()) {
    throw std::invalid_argument("target shape does not match the network");
  }
  const double batch = static_cast<double>(inputs.cols());
  const std::size_t depth = net.depth();

  const ForwardPass fp = run_forward(net, inputs, masks);
  const Eigen::MatrixXd residual = fp.eff.back() - targets;

  LossParts parts;
  parts.mse = residual.squaredNorm() / batch;
  for (const auto& layer : net.layers()) {
    parts.weight_penalty += cfg.weight_decay * layer.weights.squaredNorm();
  }
  std::vector<Eigen::ArrayXd> hidden_means(depth);
  if (cfg.sparsity_weight > 0.0) {
    for (std::size_t k = 0; k + 1 < depth; ++k) {
      hidden_means[k] = fp.raw[k + 1]
                            .rowwise()
                            .mean()
                            .array()
                            .max(kMeanClamp)
                            .min(1.0 - kMeanClamp);
      parts.sparsity_penalty +=
          cfg.sparsity_weight *
          kl_sparsity_penalty(hidden_means[k], cfg.sparsity_target);
    }
  }
  parts.total = parts.mse + parts.weight_penalty + parts.sparsity_penalty;
  if (!grads) return parts;

  grads->weights.assign(depth, {});
  grads->bias.assign(depth, {});

  Eigen::MatrixXd d_eff = (2.0 / batch) * residual;
  for (std::size_t k = depth; k-- > 0;) {
    Eigen::MatrixXd d_raw;
    if (masks && k + 1 < depth) {
      d_raw = ((*masks)[k] * d_eff.array()).matrix();
    } else {
      d_raw = std::move(d_eff);
    }
    if (cfg.sparsity_weight > 0.0 && k + 1 < depth) {
      const Eigen::ArrayXd& q = hidden_means[k];
      const Eigen::VectorXd kl_grad =
          (cfg.sparsity_weight / batch) *
          (-cfg.sparsity_target / q + (1.0 - cfg.sparsity_target) / (1.0 - q))
              .matrix();
      d_raw.colwise() += kl_grad;
    }
    const Eigen::MatrixXd d_z =
        d_raw.cwiseProduct(activation_grad(net.layers()[k].activation,
                                           fp.raw[k + 1]));
    grads->weights[k].noalias() = d_z * fp.eff[k].transpose();
    if (cfg.weight_decay > 0.0) {
      grads->weights[k] += 2.0 * cfg.weight_decay * net.layers()[k].weights;
    }
    grads->bias[k] = d_z.rowwise().sum();
    if (k > 0) d_eff.noalias() = net.layers()[k].weights.transpose() * d_z;
  }
  return parts;
}

}  // namespace

LossParts evaluate_loss(const FeedforwardNet& net, const Eigen::MatrixXd& inputs,
                        const Eigen::MatrixXd& targets, const TrainConfig& cfg) {
  return loss_impl(net, inputs, targets, cfg, nullptr, nullptr);
}

LossParts loss_and_gradients(const FeedforwardNet& net,
                             const Eigen::MatrixXd& inputs,
                             const Eigen::MatrixXd& targets,
                             const TrainConfig& cfg, NetGradients& grads) {
  return loss_impl(net, inputs, targets, cfg, nullptr, &grads);
}

MomentState MomentState::zeros(Eigen::Index n) {
  return {Eigen::ArrayXd::Zero(n), Eigen::ArrayXd::Zero(n)};
}

void sgd_step(Eigen::Ref<Eigen::ArrayXd> params,
              const Eigen::Ref<const Eigen::ArrayXd>& grad,
              const TrainConfig& cfg, double scale) {
  params -= (scale * cfg.learning_rate) * grad;
}

void adam_step(Eigen::Ref<Eigen::ArrayXd> params,
               const Eigen::Ref<const Eigen::ArrayXd>& grad, MomentState& state,
               long t, const TrainConfig& cfg, double scale) {
  state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grad;
  state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * grad.square();
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  params -= (scale * cfg.learning_rate) *
            (state.m / c1) / ((state.v / c2).sqrt() + cfg.epsilon);
}

double adabound_lower_bound(long t, const TrainConfig& cfg) {
  return cfg.final_lr * (1.0 - 1.0 / ((1.0 - cfg.beta2) * t + 1.0));
}

double adabound_upper_bound(long t, const TrainConfig& cfg) {
  return cfg.final_lr * (1.0 + 1.0 / ((1.0 - cfg.beta2) * t));
}

void adabound_step(Eigen::Ref<Eigen::ArrayXd> params,
                   const Eigen::Ref<const Eigen::ArrayXd>& grad,
                   MomentState& state, long t, const TrainConfig& cfg,
                   double scale) {
  state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grad;
  state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * grad.square();
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  const Eigen::ArrayXd step =
      (cfg.learning_rate / ((state.v / c2).sqrt() + cfg.epsilon))
          .min(adabound_upper_bound(t, cfg))
          .max(adabound_lower_bound(t, cfg));
  params -= scale * (step * (state.m / c1));
}

namespace {

struct OptimizerBank {
  std::vector<MomentState> weights;
  std::vector<MomentState> bias;
  long t = 0;

  explicit OptimizerBank(const FeedforwardNet& net) {
    for (const auto& layer : net.layers()) {
      weights.push_back(MomentState::zeros(layer.weights.size()));
      bias.push_back(MomentState::zeros(layer.bias.size()));
    }
  }
};

void apply_update(FeedforwardNet& net, const NetGradients& grads,
                  OptimizerBank& bank, const TrainConfig& cfg, double scale) {
  ++bank.t;
  for (std::size_t k = 0; k < net.depth(); ++k) {
    auto& layer = net.layers()[k];
    auto w = flat(layer.weights);
    auto b = flat(layer.bias);
    switch (cfg.optimizer) {
      case Optimizer::sgd:
        sgd_step(w, flat(grads.weights[k]), cfg, scale);
        sgd_step(b, flat(grads.bias[k]), cfg, scale);
        break;
      case Optimizer::adam:
        adam_step(w, flat(grads.weights[k]), bank.weights[k], bank.t, cfg,
                  scale);
        adam_step(b, flat(grads.bias[k]), bank.bias[k], bank.t, cfg, scale);
        break;
      case Optimizer::adabound:
        adabound_step(w, flat(grads.weights[k]), bank.weights[k], bank.t, cfg,
                      scale);
        adabound_step(b, flat(grads.bias[k]), bank.bias[k], bank.t, cfg, scale);
        break;
    }
  }
}

std::vector<Eigen::ArrayXXd> sample_dropout_masks(const FeedforwardNet& net,
                                                  Eigen::Index batch,
                                                  const TrainConfig& cfg,
                                                  std::mt19937_64& rng) {
  std::vector<Eigen::ArrayXXd> masks;
  if (cfg.dropout_rate <= 0.0 || net.depth() < 2) return masks;
  std::bernoulli_distribution keep(1.0 - cfg.dropout_rate);
  const double boost = 1.0 / (1.0 - cfg.dropout_rate);
  masks.resize(net.depth() - 1);
  for (std::size_t k = 0; k + 1 < net.depth(); ++k) {
    auto& mask = masks[k];
    mask.resize(net.layers()[k].out_dim(), batch);
    for (Eigen::Index j = 0; j < mask.cols(); ++j) {
      for (Eigen::Index i = 0; i < mask.rows(); ++i) {
        mask(i, j) = keep(rng) ? boost : 0.0;
      }
    }
  }
  return masks;
}

}  // namespace

TrainTrace train(FeedforwardNet& net, const Eigen::MatrixXd& inputs,
                 const Eigen::MatrixXd& targets, const TrainConfig& cfg) {
  cfg.check();
  std::mt19937_64 rng(cfg.rng_seed);
  OptimizerBank bank(net);
  NetGradients grads;
  TrainTrace trace;

  LossParts cur = evaluate_loss(net, inputs, targets, cfg);
  trace.loss.push_back(cur.total);
  trace.mse.push_back(cur.mse);
  if (!std::isfinite(cur.total)) {
    throw std::runtime_error("objective is non-finite before training");
  }

  const bool full_batch =
      cfg.batch_size == 0 || cfg.batch_size >= inputs.cols();
  double scale = 1.0;
  bool have_grads = false;
  std::vector<Eigen::MatrixXd> saved_w(net.depth());
  std::vector<Eigen::VectorXd> saved_b(net.depth());
  std::vector<Eigen::Index> order(static_cast<std::size_t>(inputs.cols()));
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    if (full_batch) {
      if (!have_grads) {
        const auto masks = sample_dropout_masks(net, inputs.cols(), cfg, rng);
        cur = loss_impl(net, inputs, targets, cfg,
                        masks.empty() ? nullptr : &masks, &grads);
      }
      if (cfg.monotone) {
        for (std::size_t k = 0; k < net.depth(); ++k) {
          saved_w[k] = net.layers()[k].weights;
          saved_b[k] = net.layers()[k].bias;
        }
      }
      apply_update(net, grads, bank, cfg, cfg.monotone ? scale : 1.0);
      if (cfg.monotone) {
        const LossParts next = evaluate_loss(net, inputs, targets, cfg);
        if (next.total > cur.total) {
          for (std::size_t k = 0; k < net.depth(); ++k) {
            net.layers()[k].weights = saved_w[k];
            net.layers()[k].bias = saved_b[k];
          }
          scale *= 0.5;
          have_grads = true;  // params unchanged, gradients still valid
        } else {
          cur = next;
          scale = std::min(1.0, 2.0 * scale);
          have_grads = false;
        }
        trace.loss.push_back(cur.total);
        trace.mse.push_back(cur.mse);
      } else {
        const auto masks = sample_dropout_masks(net, inputs.cols(), cfg, rng);
        cur = loss_impl(net, inputs, targets, cfg,
                        masks.empty() ? nullptr : &masks, &grads);
        have_grads = true;
        trace.loss.push_back(cur.total);
        trace.mse.push_back(cur.mse);
      }
    } else {
      std::shuffle(order.begin(), order.end(), rng);
      for (Eigen::Index start = 0; start < inputs.cols();
           start += cfg.batch_size) {
        const Eigen::Index count =
            std::min<Eigen::Index>(cfg.batch_size, inputs.cols() - start);
        Eigen::MatrixXd bx(inputs.rows(), count);
        Eigen::MatrixXd bt(targets.rows(), count);
        for (Eigen::Index j = 0; j < count; ++j) {
          bx.col(j) = inputs.col(order[static_cast<std::size_t>(start + j)]);
          bt.col(j) = targets.col(order[static_cast<std::size_t>(start + j)]);
        }
        const auto masks = sample_dropout_masks(net, count, cfg, rng);
        loss_impl(net, bx, bt, cfg, masks.empty() ? nullptr : &masks, &grads);
        apply_update(net, grads, bank, cfg, 1.0);
      }
      cur = evaluate_loss(net, inputs, targets, cfg);
      trace.loss.push_back(cur.total);
      trace.mse.push_back(cur.mse);
    }

    trace.epochs_run = epoch;
    if (!std::isfinite(trace.loss.back())) {
      throw std::runtime_error("training diverged at epoch " +
                               std::to_string(epoch) + " (loss non-finite)");
    }
    if (cfg.plateau_epochs > 0 && epoch >= cfg.plateau_epochs) {
      const double ref =
          trace.loss[static_cast<std::size_t>(epoch - cfg.plateau_epochs)];
      const double improvement = ref - trace.loss.back();
      if (improvement < cfg.plateau_tol * std::max(std::abs(ref), 1e-300)) {
        trace.early_stopped = true;
        break;
      }
    }
  }
  return trace;
}

}  // namespace lpvsdr::nn
