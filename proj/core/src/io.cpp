#include "lpvsdr/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lpvsdr::io {

using nlohmann::json;

namespace {

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open '" + path + "'");
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

void save_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) {
    throw std::invalid_argument("cannot write '" + path + "'");
  }
  out << j.dump(2) << '\n';
}

template <typename T>
T get_field(const json& j, const std::string& key, const T& fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

template <typename T>
T require_field(const json& j, const std::string& key,
                const std::string& where) {
  if (!j.contains(key)) {
    throw std::invalid_argument(where + ": missing field '" + key + "'");
  }
  return j.at(key).get<T>();
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    throw std::invalid_argument(where + ": expected a nested array of rows");
  }
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j.front().size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw std::invalid_argument(where + ": ragged rows");
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      m(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
    }
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) {
    throw std::invalid_argument(where + ": expected an array");
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v[i] = j.at(static_cast<std::size_t>(i)).get<double>();
  }
  return v;
}

json normalizer_to_json(const Normalizer& n) {
  return {{"offset", vector_to_json(n.offset())},
          {"scale", vector_to_json(n.scale())}};
}

Normalizer normalizer_from_json(const json& j) {
  return Normalizer(vector_from_json(j.at("offset"), "normalizer.offset"),
                    vector_from_json(j.at("scale"), "normalizer.scale"));
}

std::string activation_name(nn::Activation a) {
  switch (a) {
    case nn::Activation::relu:
      return "relu";
    case nn::Activation::logsig:
      return "logsig";
    case nn::Activation::tanh_fn:
      return "tanh";
    case nn::Activation::linear:
      return "linear";
  }
  return "?";
}

nn::Activation activation_from_name(const std::string& s) {
  if (s == "relu") return nn::Activation::relu;
  if (s == "logsig") return nn::Activation::logsig;
  if (s == "tanh") return nn::Activation::tanh_fn;
  if (s == "linear") return nn::Activation::linear;
  throw std::invalid_argument("unknown activation '" + s + "'");
}

json layer_to_json(const nn::DenseLayer& layer) {
  json flat = json::array();
  for (Eigen::Index i = 0; i < layer.weights.size(); ++i) {
    flat.push_back(layer.weights.data()[i]);  // column-major
  }
  return {{"rows", layer.weights.rows()},
          {"cols", layer.weights.cols()},
          {"weights", std::move(flat)},
          {"bias", vector_to_json(layer.bias)},
          {"activation", activation_name(layer.activation)}};
}

nn::DenseLayer layer_from_json(const json& j) {
  nn::DenseLayer layer;
  const auto rows = require_field<Eigen::Index>(j, "rows", "layer");
  const auto cols = require_field<Eigen::Index>(j, "cols", "layer");
  const auto& flat = j.at("weights");
  if (static_cast<Eigen::Index>(flat.size()) != rows * cols) {
    throw std::invalid_argument("layer weights length does not match shape");
  }
  layer.weights.resize(rows, cols);
  for (Eigen::Index i = 0; i < rows * cols; ++i) {
    layer.weights.data()[i] = flat.at(static_cast<std::size_t>(i)).get<double>();
  }
  layer.bias = vector_from_json(j.at("bias"), "layer.bias");
  layer.activation =
      activation_from_name(require_field<std::string>(j, "activation", "layer"));
  return layer;
}

std::string kernel_kind_name(KernelKind k) {
  switch (k) {
    case KernelKind::sigmoid:
      return "sigmoid";
    case KernelKind::rbf:
      return "rbf";
    case KernelKind::polynomial:
      return "polynomial";
  }
  return "?";
}

KernelKind kernel_kind_from_name(const std::string& s) {
  if (s == "sigmoid") return KernelKind::sigmoid;
  if (s == "rbf") return KernelKind::rbf;
  if (s == "polynomial") return KernelKind::polynomial;
  throw std::invalid_argument("unknown kernel kind '" + s + "'");
}

json kernel_to_json(const KernelSpec& spec) {
  return {{"kind", kernel_kind_name(spec.kind)},
          {"kappa", spec.kappa},
          {"iota", spec.iota}};
}

KernelSpec kernel_from_json(const json& j) {
  KernelSpec spec;
  spec.kind = kernel_kind_from_name(require_field<std::string>(j, "kind", "kernel"));
  spec.kappa = get_field(j, "kappa", spec.kappa);
  spec.iota = get_field(j, "iota", spec.iota);
  spec.check();
  return spec;
}

std::string optimizer_name(nn::Optimizer o) {
  switch (o) {
    case nn::Optimizer::sgd:
      return "sgd";
    case nn::Optimizer::adam:
      return "adam";
    case nn::Optimizer::adabound:
      return "adabound";
  }
  return "?";
}

nn::Optimizer optimizer_from_name(const std::string& s) {
  if (s == "sgd") return nn::Optimizer::sgd;
  if (s == "adam") return nn::Optimizer::adam;
  if (s == "adabound") return nn::Optimizer::adabound;
  throw std::invalid_argument("unknown optimizer '" + s + "'");
}

nn::TrainConfig train_config_from_json(const json& j,
                                       nn::TrainConfig defaults) {
  nn::TrainConfig cfg = defaults;
  if (j.contains("optimizer")) {
    cfg.optimizer = optimizer_from_name(j.at("optimizer").get<std::string>());
  }
  cfg.learning_rate = get_field(j, "learning_rate", cfg.learning_rate);
  cfg.final_lr = get_field(j, "final_lr", cfg.final_lr);
  cfg.beta1 = get_field(j, "beta1", cfg.beta1);
  cfg.beta2 = get_field(j, "beta2", cfg.beta2);
  cfg.epsilon = get_field(j, "epsilon", cfg.epsilon);
  cfg.epochs = get_field(j, "epochs", cfg.epochs);
  cfg.batch_size = get_field(j, "batch_size", cfg.batch_size);
  cfg.weight_decay = get_field(j, "weight_decay", cfg.weight_decay);
  cfg.sparsity_weight = get_field(j, "sparsity_weight", cfg.sparsity_weight);
  cfg.sparsity_target = get_field(j, "sparsity_target", cfg.sparsity_target);
  cfg.dropout_rate = get_field(j, "dropout_rate", cfg.dropout_rate);
  cfg.rng_seed = get_field(j, "rng_seed", cfg.rng_seed);
  cfg.monotone = get_field(j, "monotone", cfg.monotone);
  cfg.plateau_epochs = get_field(j, "plateau_epochs", cfg.plateau_epochs);
  cfg.plateau_tol = get_field(j, "plateau_tol", cfg.plateau_tol);
  cfg.check();
  return cfg;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_model_json(const std::string& path, const AffineLpvModel& model) {
  json j;
  j["nx"] = model.nx();
  j["nu"] = model.nu();
  j["ny"] = model.ny();
  j["m0"] = matrix_to_json(model.m0());
  json coeffs = json::array();
  for (const auto& mi : model.coeffs()) coeffs.push_back(matrix_to_json(mi));
  j["coeffs"] = std::move(coeffs);
  if (model.sched_box()) {
    json box = json::array();
    for (const auto& iv : *model.sched_box()) {
      box.push_back(json::array({iv.lo, iv.hi}));
    }
    j["sched_box"] = std::move(box);
  }
  save_json(path, j);
}

AffineLpvModel read_model_json(const std::string& path) {
  const json j = load_json(path);
  const int nx = require_field<int>(j, "nx", path);
  const int nu = require_field<int>(j, "nu", path);
  const int ny = require_field<int>(j, "ny", path);
  Eigen::MatrixXd m0 = matrix_from_json(j.at("m0"), path + ": m0");
  std::vector<Eigen::MatrixXd> coeffs;
  for (const auto& c : j.at("coeffs")) {
    coeffs.push_back(matrix_from_json(c, path + ": coeffs"));
  }
  std::optional<Box> box;
  if (j.contains("sched_box") && !j.at("sched_box").is_null()) {
    Box b;
    for (const auto& iv : j.at("sched_box")) {
      b.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
    }
    box = std::move(b);
  }
  return AffineLpvModel(std::move(m0), std::move(coeffs), nx, nu, ny,
                        std::move(box));
}

void write_dataset_csv(const std::string& csv_path,
                       const std::string& sidecar_path,
                       const TrajectoryDataset& dataset) {
  std::ofstream out(csv_path);
  if (!out) {
    throw std::invalid_argument("cannot write '" + csv_path + "'");
  }
  for (Eigen::Index i = 0; i < dataset.gamma.rows(); ++i) {
    for (Eigen::Index j = 0; j < dataset.gamma.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(dataset.gamma(i, j));
    }
    out << '\n';
  }
  json sidecar;
  sidecar["sample_time"] = dataset.sample_time;
  sidecar["n_rho"] = dataset.gamma.rows();
  sidecar["samples"] = dataset.gamma.cols();
  save_json(sidecar_path, sidecar);
}

TrajectoryDataset read_dataset_csv(const std::string& csv_path,
                                   const std::string& sidecar_path) {
  std::ifstream in(csv_path);
  if (!in) {
    throw std::invalid_argument("cannot open '" + csv_path + "'");
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string token;
    bool numeric = true;
    while (std::getline(ss, token, ',')) {
      char* end = nullptr;
      const double v = std::strtod(token.c_str(), &end);
      if (end == token.c_str()) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;  // header line
      }
      throw std::invalid_argument(csv_path + ": non-numeric data row");
    }
    first = false;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::invalid_argument(csv_path + ": ragged rows");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw std::invalid_argument(csv_path + ": no data");
  }
  TrajectoryDataset dataset;
  dataset.gamma.resize(static_cast<Eigen::Index>(rows.size()),
                       static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < dataset.gamma.rows(); ++i) {
    for (Eigen::Index j = 0; j < dataset.gamma.cols(); ++j) {
      dataset.gamma(i, j) =
          rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  const json sidecar = load_json(sidecar_path);
  dataset.sample_time = require_field<double>(sidecar, "sample_time", sidecar_path);
  dataset.check();
  return dataset;
}

void write_trajectory_csv(
    const std::string& path, const Eigen::VectorXd& time,
    const std::vector<std::pair<std::string, Eigen::MatrixXd>>& channels) {
  std::ofstream out(path);
  if (!out) {
    throw std::invalid_argument("cannot write '" + path + "'");
  }
  out << "time";
  for (const auto& [name, data] : channels) {
    if (data.cols() != time.size()) {
      throw std::invalid_argument("channel '" + name +
                                  "' length does not match the time axis");
    }
    for (Eigen::Index r = 0; r < data.rows(); ++r) {
      out << ',' << name;
      if (data.rows() > 1) out << '_' << (r + 1);
    }
  }
  out << '\n';
  for (Eigen::Index k = 0; k < time.size(); ++k) {
    out << format_double(time[k]);
    for (const auto& [name, data] : channels) {
      for (Eigen::Index r = 0; r < data.rows(); ++r) {
        out << ',' << format_double(data(r, k));
      }
    }
    out << '\n';
  }
}

void write_params_json(const std::string& path, const ManipulatorParams& p) {
  save_json(path, json{{"a", p.a()},
                       {"b", p.b()},
                       {"c", p.c()},
                       {"d", p.d()},
                       {"e", p.e()},
                       {"f", p.f()},
                       {"n", p.gear()}});
}

ManipulatorParams read_params_json(const std::string& path) {
  const json j = load_json(path);
  const ManipulatorParams nominal = ManipulatorParams::nominal();
  return ManipulatorParams(
      get_field(j, "a", nominal.a()), get_field(j, "b", nominal.b()),
      get_field(j, "c", nominal.c()), get_field(j, "d", nominal.d()),
      get_field(j, "e", nominal.e()), get_field(j, "f", nominal.f()),
      get_field(j, "n", nominal.gear()));
}

namespace {

ReferenceKind reference_kind_from_name(const std::string& s) {
  if (s == "sinusoid-sum") return ReferenceKind::sinusoid_sum;
  if (s == "square-wave") return ReferenceKind::square_wave;
  if (s == "piecewise-linear") return ReferenceKind::piecewise_linear;
  throw std::invalid_argument("unknown reference kind '" + s + "'");
}

ReferenceSpec reference_from_json(const json& j) {
  ReferenceSpec spec = ReferenceSpec::reference1();
  if (j.contains("kind")) {
    spec.kind = reference_kind_from_name(j.at("kind").get<std::string>());
    spec.channels.clear();
  }
  spec.duration = get_field(j, "duration", spec.duration);
  spec.sample_time = get_field(j, "sample_time", spec.sample_time);
  if (j.contains("channels")) {
    spec.channels.clear();
    for (const auto& cj : j.at("channels")) {
      ReferenceChannel ch;
      if (cj.contains("terms")) {
        for (const auto& tj : cj.at("terms")) {
          ch.terms.push_back({get_field(tj, "amplitude", 0.0),
                              get_field(tj, "frequency", 0.0),
                              get_field(tj, "phase", 0.0)});
        }
      }
      ch.period = get_field(cj, "period", 0.0);
      ch.amplitude = get_field(cj, "amplitude", 0.0);
      if (cj.contains("times")) {
        ch.times = cj.at("times").get<std::vector<double>>();
        ch.values = require_field<std::vector<double>>(cj, "values", "channel");
      }
      spec.channels.push_back(std::move(ch));
    }
  }
  spec.check();
  return spec;
}

}  // namespace

GenerateConfig read_generate_config(const std::string& path) {
  const json j = load_json(path);
  GenerateConfig cfg;
  if (j.contains("params")) {
    const json& p = j.at("params");
    const ManipulatorParams nominal = ManipulatorParams::nominal();
    cfg.params = ManipulatorParams(
        get_field(p, "a", nominal.a()), get_field(p, "b", nominal.b()),
        get_field(p, "c", nominal.c()), get_field(p, "d", nominal.d()),
        get_field(p, "e", nominal.e()), get_field(p, "f", nominal.f()),
        get_field(p, "n", nominal.gear()));
  }
  if (j.contains("reference")) {
    cfg.reference = reference_from_json(j.at("reference"));
  }
  return cfg;
}

ReduceConfig read_reduce_config(const std::string& path) {
  const json j = load_json(path);
  ReduceConfig cfg;
  if (j.contains("kernel")) cfg.kernel = kernel_from_json(j.at("kernel"));
  if (j.contains("ae")) {
    cfg.ae_train = train_config_from_json(j.at("ae"), cfg.ae_train);
  }
  if (j.contains("dnn")) {
    const json& d = j.at("dnn");
    cfg.dnn_train = train_config_from_json(d, cfg.dnn_train);
    if (d.contains("arch")) cfg.dnn_arch = d.at("arch").get<std::vector<int>>();
    cfg.dnn_warm_start = get_field(d, "warm_start", cfg.dnn_warm_start);
  }
  cfg.refit_intercept = get_field(j, "refit_intercept", cfg.refit_intercept);
  return cfg;
}

void write_pca_json(const std::string& path, const PcaReducer& reducer) {
  save_json(path, json{{"type", "pca"},
                       {"basis", matrix_to_json(reducer.basis())},
                       {"singular_values",
                        vector_to_json(reducer.singular_values())},
                       {"normalizer", normalizer_to_json(reducer.normalizer())}});
}

PcaReducer read_pca_json(const std::string& path) {
  const json j = load_json(path);
  return PcaReducer(matrix_from_json(j.at("basis"), path + ": basis"),
                    vector_from_json(j.at("singular_values"),
                                     path + ": singular_values"),
                    normalizer_from_json(j.at("normalizer")));
}

void write_kpca_json(const std::string& path, const KpcaReducer& reducer) {
  save_json(path,
            json{{"type", "kpca"},
                 {"kernel", kernel_to_json(reducer.kernel())},
                 {"training_points", matrix_to_json(reducer.training_points())},
                 {"alphas", matrix_to_json(reducer.alphas())},
                 {"eigenvalues", vector_to_json(reducer.eigenvalues())},
                 {"row_means", vector_to_json(reducer.row_means())},
                 {"grand_mean", reducer.grand_mean()},
                 {"discarded_negative", reducer.discarded_negative()},
                 {"normalizer", normalizer_to_json(reducer.normalizer())}});
}

KpcaReducer read_kpca_json(const std::string& path) {
  const json j = load_json(path);
  return KpcaReducer(
      kernel_from_json(j.at("kernel")),
      matrix_from_json(j.at("training_points"), path + ": training_points"),
      matrix_from_json(j.at("alphas"), path + ": alphas"),
      vector_from_json(j.at("eigenvalues"), path + ": eigenvalues"),
      vector_from_json(j.at("row_means"), path + ": row_means"),
      require_field<double>(j, "grand_mean", path),
      get_field(j, "discarded_negative", 0),
      normalizer_from_json(j.at("normalizer")));
}

void write_ae_json(const std::string& path, const AeReducer& reducer) {
  save_json(path, json{{"type", "ae"},
                       {"encoder", layer_to_json(reducer.encoder())},
                       {"decoder", layer_to_json(reducer.decoder())},
                       {"rescale",
                        json{{"gain", reducer.rescaler().gain},
                             {"offset", reducer.rescaler().offset}}},
                       {"normalizer", normalizer_to_json(reducer.normalizer())},
                       {"final_loss", reducer.trace().final_loss()},
                       {"final_mse", reducer.trace().final_mse()}});
}

AeReducer read_ae_json(const std::string& path) {
  const json j = load_json(path);
  RangeRescaler rescaler;
  if (j.contains("rescale")) {
    rescaler.gain = get_field(j.at("rescale"), "gain", rescaler.gain);
    rescaler.offset = get_field(j.at("rescale"), "offset", rescaler.offset);
  }
  return AeReducer(layer_from_json(j.at("encoder")),
                   layer_from_json(j.at("decoder")), rescaler,
                   normalizer_from_json(j.at("normalizer")));
}

void write_dnn_json(const std::string& path, const DnnReducer& reducer) {
  json layers = json::array();
  for (const auto& layer : reducer.encoder().layers()) {
    layers.push_back(layer_to_json(layer));
  }
  save_json(path, json{{"type", "dnn"},
                       {"encoder", json{{"layers", std::move(layers)}}},
                       {"matrix_layer", layer_to_json(reducer.matrix_layer())},
                       {"normalizer", normalizer_to_json(reducer.normalizer())},
                       {"m0", matrix_to_json(reducer.base_m0())},
                       {"nx", reducer.nx()},
                       {"nu", reducer.nu()},
                       {"ny", reducer.ny()},
                       {"warm_started", reducer.warm_started()},
                       {"final_loss", reducer.trace().final_loss()},
                       {"final_mse", reducer.trace().final_mse()}});
}

DnnReducer read_dnn_json(const std::string& path) {
  const json j = load_json(path);
  std::vector<nn::DenseLayer> layers;
  for (const auto& lj : j.at("encoder").at("layers")) {
    layers.push_back(layer_from_json(lj));
  }
  return DnnReducer(nn::FeedforwardNet(std::move(layers)),
                    layer_from_json(j.at("matrix_layer")),
                    normalizer_from_json(j.at("normalizer")),
                    matrix_from_json(j.at("m0"), path + ": m0"),
                    require_field<int>(j, "nx", path),
                    require_field<int>(j, "nu", path),
                    require_field<int>(j, "ny", path),
                    get_field(j, "warm_started", false));
}

void write_net_json(const std::string& path, const nn::FeedforwardNet& net) {
  json layers = json::array();
  for (const auto& layer : net.layers()) layers.push_back(layer_to_json(layer));
  save_json(path, json{{"layers", std::move(layers)}});
}

nn::FeedforwardNet read_net_json(const std::string& path) {
  const json j = load_json(path);
  std::vector<nn::DenseLayer> layers;
  for (const auto& lj : j.at("layers")) layers.push_back(layer_from_json(lj));
  return nn::FeedforwardNet(std::move(layers));
}

namespace {

json cell_to_json(const SweepCell& cell) {
  json j{{"method", cell.method},
         {"n_phi", cell.n_phi},
         {"ok", cell.ok},
         {"costs", cell.costs},
         {"cost_min", cell.cost_min},
         {"cost_median", cell.cost_median},
         {"wall_seconds", cell.wall_seconds},
         {"kpca_discarded_negative", cell.kpca_discarded_negative},
         {"rank_deficient_refit", cell.rank_deficient_refit},
         {"warm_started", cell.warm_started},
         {"trace_epochs", cell.trace_epochs},
         {"trace_loss", cell.trace_loss},
         {"has_simulation", cell.has_simulation}};
  if (!cell.ok) j["error"] = cell.error;
  if (cell.has_simulation) {
    j["sim_rms_output"] = cell.sim_rms_output;
    j["sim_peak_output"] = cell.sim_peak_output;
    j["gain_ratio"] = cell.gain_ratio;
  }
  return j;
}

SweepCell cell_from_json(const json& j) {
  SweepCell cell;
  cell.method = require_field<std::string>(j, "method", "cell");
  cell.n_phi = require_field<int>(j, "n_phi", "cell");
  cell.ok = require_field<bool>(j, "ok", "cell");
  cell.error = get_field<std::string>(j, "error", "");
  cell.costs = get_field(j, "costs", std::vector<double>{});
  cell.cost_min = get_field(j, "cost_min", 0.0);
  cell.cost_median = get_field(j, "cost_median", 0.0);
  cell.wall_seconds = get_field(j, "wall_seconds", 0.0);
  cell.kpca_discarded_negative = get_field(j, "kpca_discarded_negative", 0);
  cell.rank_deficient_refit = get_field(j, "rank_deficient_refit", false);
  cell.warm_started = get_field(j, "warm_started", false);
  cell.trace_epochs = get_field(j, "trace_epochs", std::vector<int>{});
  cell.trace_loss = get_field(j, "trace_loss", std::vector<double>{});
  cell.has_simulation = get_field(j, "has_simulation", false);
  cell.sim_rms_output = get_field(j, "sim_rms_output", 0.0);
  cell.sim_peak_output = get_field(j, "sim_peak_output", 0.0);
  cell.gain_ratio = get_field(j, "gain_ratio", 0.0);
  return cell;
}

}  // namespace

void write_report_json(const std::string& path, const EvaluationReport& report) {
  json cells = json::array();
  for (const auto& cell : report.cells) cells.push_back(cell_to_json(cell));
  save_json(path, json{{"cells", std::move(cells)},
                       {"baseline_mean_sq_norm", report.baseline_mean_sq_norm},
                       {"dataset_hash", report.dataset_hash},
                       {"base_seed", report.base_seed},
                       {"n_rho", report.n_rho},
                       {"samples", report.samples},
                       {"sample_time", report.sample_time}});
}

EvaluationReport read_report_json(const std::string& path) {
  const json j = load_json(path);
  EvaluationReport report;
  for (const auto& cj : j.at("cells")) report.cells.push_back(cell_from_json(cj));
  report.baseline_mean_sq_norm = get_field(j, "baseline_mean_sq_norm", 0.0);
  report.dataset_hash = get_field<std::string>(j, "dataset_hash", "");
  report.base_seed = get_field<std::uint64_t>(j, "base_seed", 0);
  report.n_rho = get_field(j, "n_rho", 0);
  report.samples = get_field(j, "samples", 0);
  report.sample_time = get_field(j, "sample_time", 0.0);
  return report;
}

void write_report_csv(const std::string& path, const EvaluationReport& report) {
  std::ofstream out(path);
  if (!out) {
    throw std::invalid_argument("cannot write '" + path + "'");
  }
  out << "method,n_phi,status,seeds,cost_min,cost_median,baseline,"
         "sim_rms_output,gain_ratio,kpca_discarded_negative\n";
  for (const auto& cell : report.cells) {
    out << cell.method << ',' << cell.n_phi << ','
        << (cell.ok ? "ok" : "error") << ',' << cell.costs.size() << ',';
    if (cell.ok) {
      out << format_double(cell.cost_min) << ','
          << format_double(cell.cost_median);
    } else {
      out << ',';
    }
    out << ',' << format_double(report.baseline_mean_sq_norm) << ',';
    if (cell.has_simulation) out << format_double(cell.sim_rms_output);
    out << ',';
    if (cell.has_simulation) out << format_double(cell.gain_ratio);
    out << ',' << cell.kpca_discarded_negative << '\n';
  }
}

std::string resolve_config_path(const std::string& path) {
  namespace fs = std::filesystem;
  if (fs::exists(path)) return path;
  const fs::path p(path);
  if (p.is_relative()) {
    if (const char* dir = std::getenv("LPVSDR_CONFIG_DIR")) {
      const fs::path candidate = fs::path(dir) / p;
      if (fs::exists(candidate)) return candidate.string();
    }
  }
  return path;
}

}  // namespace lpvsdr::io
