// Command-line front end: dataset generation, single reductions, method
// sweeps, self checks, and the end-to-end benchmark reproduction.
//
// Exit codes: 0 ok, 2 usage or config error, 3 fit failure, 4 every sweep
// cell failed, 5 self-check failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "lpvsdr/affine_refit.hpp"
#include "lpvsdr/autoencoder.hpp"
#include "lpvsdr/dnn.hpp"
#include "lpvsdr/evaluation.hpp"
#include "lpvsdr/io.hpp"
#include "lpvsdr/kpca.hpp"
#include "lpvsdr/manipulator.hpp"
#include "lpvsdr/pca.hpp"
#include "lpvsdr/simulation.hpp"

namespace {

namespace fs = std::filesystem;
using namespace lpvsdr;

constexpr int kExitConfig = 2;
constexpr int kExitFit = 3;
constexpr int kExitSweepAllFailed = 4;
constexpr int kExitCheckFailed = 5;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

io::GenerateConfig load_generate_config(const std::string& path) {
  if (path.empty()) return io::GenerateConfig{};
  try {
    return io::read_generate_config(io::resolve_config_path(path));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

io::ReduceConfig load_reduce_config(const std::string& path) {
  if (path.empty()) return io::ReduceConfig{};
  try {
    return io::read_reduce_config(io::resolve_config_path(path));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

AffineLpvModel load_model(const std::string& path) {
  if (path.empty()) return build_lpv_model(ManipulatorParams::nominal());
  try {
    return io::read_model_json(io::resolve_config_path(path));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

TrajectoryDataset load_dataset(const std::string& prefix) {
  try {
    return io::read_dataset_csv(prefix + ".csv", prefix + ".json");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::vector<int> parse_nphi_range(const std::string& text) {
  const auto sep = text.find("..");
  std::vector<int> values;
  try {
    if (sep == std::string::npos) {
      values.push_back(std::stoi(text));
    } else {
      const int lo = std::stoi(text.substr(0, sep));
      const int hi = std::stoi(text.substr(sep + 2));
      for (int v = lo; v <= hi; ++v) values.push_back(v);
    }
  } catch (const std::exception&) {
    throw ConfigError("cannot parse n_phi range '" + text + "'");
  }
  if (values.empty() || values.front() < 1) {
    throw ConfigError("n_phi range '" + text + "' is empty or not positive");
  }
  return values;
}

int run_generate(const std::string& config_path, const std::string& out_prefix,
                 const std::string& trajectory_out) {
  const io::GenerateConfig cfg = load_generate_config(config_path);
  const ReferenceTrajectory ref = generate_reference(cfg.reference);
  const TrajectoryDataset dataset = generate_scheduling_data(cfg.params, ref);
  io::write_dataset_csv(out_prefix + ".csv", out_prefix + ".json", dataset);
  if (!trajectory_out.empty()) {
    io::write_trajectory_csv(trajectory_out, ref.time,
                             {{"q", ref.q}, {"dq", ref.dq}});
  }
  std::cout << "dataset " << out_prefix << ".csv: n_rho=" << dataset.n_rho()
            << " N=" << dataset.samples()
            << " sample_time=" << dataset.sample_time << "\n";
  return 0;
}

int run_reduce(const std::string& method_name_arg, int n_phi,
               const std::string& data_prefix, const std::string& model_path,
               const std::string& config_path, const std::string& out_prefix,
               std::uint64_t seed, int epochs_override, double epsilon) {
  const Method method = parse_method(method_name_arg);
  const AffineLpvModel model = load_model(model_path);
  const TrajectoryDataset dataset = load_dataset(data_prefix);
  io::ReduceConfig cfg = load_reduce_config(config_path);
  cfg.ae_train.rng_seed = seed;
  cfg.dnn_train.rng_seed = seed;
  if (epochs_override > 0) {
    cfg.ae_train.epochs = epochs_override;
    cfg.dnn_train.epochs = epochs_override;
  }

  double cost = 0.0;
  AffineLpvModel reduced = model;
  SchedulingMapFn map;

  switch (method) {
    case Method::pca: {
      const PcaReducer reducer = fit_pca(dataset, n_phi);
      reduced = reducer.reduced_model(model);
      cost = frobenius_cost(model, reduced, dataset,
                            [&](const Eigen::VectorXd& rho) {
                              return reducer.map(rho);
                            });
      io::write_pca_json(out_prefix + ".reducer.json", reducer);
      map = [reducer](const Eigen::VectorXd& rho) { return reducer.map(rho); };
      break;
    }
    case Method::kpca: {
      const KpcaReducer reducer = fit_kpca(dataset, cfg.kernel, n_phi);
      const AffineRefitResult refit = fit_affine_matrices(
          model, dataset.gamma, reducer.map_cols(dataset.gamma),
          cfg.refit_intercept);
      reduced = refit.reduced;
      cost = refit.cost;
      io::write_kpca_json(out_prefix + ".reducer.json", reducer);
      map = [reducer](const Eigen::VectorXd& rho) { return reducer.map(rho); };
      break;
    }
    case Method::ae: {
      const AeReducer reducer = fit_ae(dataset, n_phi, cfg.ae_train);
      const AffineRefitResult refit = fit_affine_matrices(
          model, dataset.gamma, reducer.map_cols(dataset.gamma),
          cfg.refit_intercept);
      reduced = refit.reduced;
      cost = refit.cost;
      io::write_ae_json(out_prefix + ".reducer.json", reducer);
      map = [reducer](const Eigen::VectorXd& rho) { return reducer.map(rho); };
      break;
    }
    case Method::dnn: {
      const DnnReducer reducer = fit_dnn(model, dataset, n_phi, cfg.dnn_arch,
                                         cfg.dnn_train, cfg.dnn_warm_start);
      if (cfg.dnn_warm_start && !reducer.warm_started()) {
        std::cerr << "warning: warm start infeasible, used random init\n";
      }
      reduced = reducer.reduced_model();
      cost = frobenius_cost(model, reduced, dataset,
                            [&](const Eigen::VectorXd& rho) {
                              return reducer.map(rho);
                            });
      io::write_dnn_json(out_prefix + ".reducer.json", reducer);
      map = [reducer](const Eigen::VectorXd& rho) { return reducer.map(rho); };
      break;
    }
  }

  io::write_model_json(out_prefix + ".model.json", reduced);
  std::cout << "method=" << method_name_arg << " n_phi=" << n_phi
            << " cost=" << cost
            << " baseline=" << mean_model_sq_norm(model, dataset) << "\n";
  if (epsilon > 0.0) {
    const EpsilonCheck check =
        epsilon_check(model, reduced, dataset, map, epsilon);
    std::cout << "epsilon-check: " << (check.pass ? "pass" : "fail")
              << " worst_sample=" << check.worst_index
              << " worst_error=" << check.worst_value << "\n";
  }
  return 0;
}

SweepConfig build_sweep_config(const io::ReduceConfig& reduce_cfg,
                               const std::vector<std::string>& methods,
                               const std::string& nphi_range, int seeds,
                               std::uint64_t seed, int epochs_override,
                               int jobs, bool warm_start) {
  SweepConfig cfg;
  for (const auto& name : methods) cfg.methods.push_back(parse_method(name));
  cfg.n_phi_values = parse_nphi_range(nphi_range);
  cfg.seeds = seeds;
  cfg.base_seed = seed;
  cfg.kernel = reduce_cfg.kernel;
  cfg.ae_train = reduce_cfg.ae_train;
  cfg.dnn_train = reduce_cfg.dnn_train;
  cfg.dnn_arch = reduce_cfg.dnn_arch;
  cfg.dnn_warm_start = warm_start || reduce_cfg.dnn_warm_start;
  cfg.refit_intercept = reduce_cfg.refit_intercept;
  cfg.jobs = jobs;
  if (epochs_override > 0) {
    cfg.ae_train.epochs = epochs_override;
    cfg.dnn_train.epochs = epochs_override;
  }
  return cfg;
}

int write_sweep_outputs(const EvaluationReport& report,
                        const std::string& out_dir) {
  fs::create_directories(out_dir);
  io::write_report_json((fs::path(out_dir) / "report.json").string(), report);
  io::write_report_csv((fs::path(out_dir) / "report.csv").string(), report);
  int failed = 0;
  for (const auto& cell : report.cells) {
    if (!cell.ok) {
      ++failed;
      std::cerr << "cell " << cell.method << " n_phi=" << cell.n_phi
                << " failed: " << cell.error << "\n";
    }
  }
  std::cout << "report: " << out_dir << "/report.csv ("
            << report.cells.size() - failed << "/" << report.cells.size()
            << " cells ok)\n";
  return report.any_ok() ? 0 : kExitSweepAllFailed;
}

int run_sweep(const std::vector<std::string>& methods,
              const std::string& nphi_range, int seeds,
              const std::string& data_prefix, const std::string& model_path,
              const std::string& config_path, const std::string& out_dir,
              std::uint64_t seed, int epochs_override, int jobs,
              bool warm_start) {
  if (methods.empty()) throw ConfigError("no methods given");
  const AffineLpvModel model = load_model(model_path);
  const TrajectoryDataset dataset = load_dataset(data_prefix);
  const SweepConfig cfg =
      build_sweep_config(load_reduce_config(config_path), methods, nphi_range,
                         seeds, seed, epochs_override, jobs, warm_start);
  const EvaluationReport report = sweep(model, dataset, cfg);
  return write_sweep_outputs(report, out_dir);
}

int run_reproduce(const std::string& config_path, const std::string& out_dir,
                  std::uint64_t seed, const std::vector<std::string>& methods,
                  const std::string& nphi_range, int seeds,
                  int epochs_override, int jobs, bool warm_start) {
  fs::create_directories(out_dir);
  const io::GenerateConfig gen_cfg = load_generate_config(config_path);
  const ReferenceTrajectory ref = generate_reference(gen_cfg.reference);
  const TrajectoryDataset dataset =
      generate_scheduling_data(gen_cfg.params, ref);
  const std::string data_prefix = (fs::path(out_dir) / "gamma").string();
  io::write_dataset_csv(data_prefix + ".csv", data_prefix + ".json", dataset);

  const AffineLpvModel model = build_lpv_model(gen_cfg.params);
  io::write_model_json((fs::path(out_dir) / "model.json").string(), model);

  const SweepConfig cfg =
      build_sweep_config(load_reduce_config(config_path), methods, nphi_range,
                         seeds, seed, epochs_override, jobs, warm_start);
  const EvaluationReport report = sweep(model, dataset, cfg);
  return write_sweep_outputs(report, out_dir);
}

int check_embedding() {
  const ManipulatorParams params = ManipulatorParams::nominal();
  std::mt19937_64 rng(20240915);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  std::uniform_real_distribution<double> rate(-3.0, 3.0);
  std::uniform_real_distribution<double> torque(-10.0, 10.0);
  std::vector<std::pair<Eigen::Vector4d, Eigen::Vector2d>> samples;
  samples.reserve(1000);
  for (int i = 0; i < 1000; ++i) {
    samples.push_back({{angle(rng), angle(rng), rate(rng), rate(rng)},
                       {torque(rng), torque(rng)}});
  }
  const double residual = embedding_max_residual(params, samples);
  std::cout << "embedding consistency: max residual " << residual << "\n";
  return residual < 1e-9 ? 0 : kExitCheckFailed;
}

int check_gradients() {
  using namespace lpvsdr::nn;
  TrainConfig cfg;
  cfg.weight_decay = 1e-4;
  FeedforwardNet net = FeedforwardNet::make(
      10, {5, 2, 36},
      {Activation::relu, Activation::relu, Activation::linear}, 7);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);

  Eigen::MatrixXd x(10, 8);
  const auto resample = [&]() {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, j) = dist(rng);
    }
  };
  // Keep relu preactivations away from the kink.
  for (int attempt = 0; attempt < 100; ++attempt) {
    resample();
    bool clear = true;
    Eigen::MatrixXd a = x;
    for (const auto& layer : net.layers()) {
      const Eigen::MatrixXd z = (layer.weights * a).colwise() + layer.bias;
      if (layer.activation == Activation::relu &&
          z.cwiseAbs().minCoeff() < 1e-3) {
        clear = false;
        break;
      }
      a = activate(layer.activation, z);
    }
    if (clear) break;
  }
  // Small residuals keep the difference quotients above the rounding floor.
  Eigen::MatrixXd t = net.forward(x);
  for (Eigen::Index j = 0; j < t.cols(); ++j) {
    for (Eigen::Index i = 0; i < t.rows(); ++i) t(i, j) += 0.01 * dist(rng);
  }

  NetGradients grads;
  loss_and_gradients(net, x, t, cfg, grads);

  const double h = 1e-6;
  double worst = 0.0;
  for (std::size_t k = 0; k < net.depth(); ++k) {
    auto& w = net.layers()[k].weights;
    for (Eigen::Index i = 0; i < w.size(); i += 7) {  // spot sample
      const double saved = w.data()[i];
      w.data()[i] = saved + h;
      const double up = evaluate_loss(net, x, t, cfg).total;
      w.data()[i] = saved - h;
      const double down = evaluate_loss(net, x, t, cfg).total;
      w.data()[i] = saved;
      const double fd = (up - down) / (2.0 * h);
      const double an = grads.weights[k].data()[i];
      worst = std::max(worst,
                       std::abs(fd - an) / std::max(1e-8, std::abs(fd)));
    }
  }
  std::cout << "gradient check: max relative error " << worst << "\n";
  return worst < 1e-5 ? 0 : kExitCheckFailed;
}

int check_centering() {
  const ManipulatorParams params = ManipulatorParams::nominal();
  ReferenceSpec spec = ReferenceSpec::reference1();
  spec.duration = 3.0;
  const TrajectoryDataset dataset =
      generate_scheduling_data(params, generate_reference(spec));
  const KpcaReducer reducer = fit_kpca(dataset, KernelSpec{}, 3);

  // Rebuild the centered kernel matrix from the stored pieces and check the
  // row sums vanish.
  const Eigen::MatrixXd& z = reducer.training_points();
  const Eigen::Index n = z.cols();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      k(i, j) = kernel_eval(reducer.kernel(), z.col(i), z.col(j));
    }
  }
  const Eigen::VectorXd r = k.rowwise().mean();
  Eigen::MatrixXd kc = k;
  kc.colwise() -= r;
  kc.rowwise() -= r.transpose();
  kc.array() += k.mean();
  const double worst = kc.rowwise().sum().cwiseAbs().maxCoeff();
  std::cout << "kernel centering: max row sum " << worst << "\n";
  return worst < 1e-10 ? 0 : kExitCheckFailed;
}

int run_check(const std::string& suite) {
  int rc = 0;
  if (suite == "embedding" || suite == "all") rc = std::max(rc, check_embedding());
  if (suite == "gradients" || suite == "all") rc = std::max(rc, check_gradients());
  if (suite == "all") rc = std::max(rc, check_centering());
  std::cout << (rc == 0 ? "all checks passed\n" : "checks FAILED\n");
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scheduling-dimension reduction toolbox for affine LPV models"};
  app.require_subcommand(1);

  std::string config_path, out_prefix, out_dir, data_prefix, model_path;
  std::string trajectory_out, method, nphi_range = "1..10", suite;
  int n_phi = 1, seeds = 5, epochs_override = 0, jobs = 1;
  std::uint64_t seed = 1;
  double epsilon = 0.0;
  std::vector<std::string> methods;
  bool warm_start = false;

  auto* generate = app.add_subcommand("generate", "Write a scheduling dataset");
  generate->add_option("--config", config_path, "generation config JSON");
  generate->add_option("--out", out_prefix, "output prefix (.csv/.json)")
      ->required();
  generate->add_option("--trajectory-out", trajectory_out,
                       "also write the reference trajectory CSV");

  auto* reduce = app.add_subcommand("reduce", "Fit one reduction");
  reduce->add_option("--method", method, "pca|kpca|ae|dnn")
      ->required()
      ->check(CLI::IsMember({"pca", "kpca", "ae", "dnn"}));
  reduce->add_option("--nphi", n_phi, "latent dimension")->required();
  reduce->add_option("--data", data_prefix, "dataset prefix")->required();
  reduce->add_option("--model", model_path,
                     "model JSON (default: built-in manipulator)");
  reduce->add_option("--config", config_path, "reduction config JSON");
  reduce->add_option("--out", out_prefix, "output prefix")->required();
  reduce->add_option("--seed", seed, "rng seed");
  reduce->add_option("--epochs", epochs_override, "override training epochs");
  reduce->add_option("--epsilon", epsilon,
                     "also run the worst-sample epsilon check");

  auto* sweep_cmd = app.add_subcommand("sweep", "Fit a method/n_phi grid");
  sweep_cmd->add_option("--methods", methods, "subset of pca,kpca,ae,dnn")
      ->required()
      ->delimiter(',');
  sweep_cmd->add_option("--nphi-range", nphi_range, "A..B or single value");
  sweep_cmd->add_option("--seeds", seeds, "seeds per nondeterministic cell");
  sweep_cmd->add_option("--data", data_prefix, "dataset prefix")->required();
  sweep_cmd->add_option("--model", model_path, "model JSON");
  sweep_cmd->add_option("--config", config_path, "reduction config JSON");
  sweep_cmd->add_option("--out", out_dir, "report directory")->required();
  sweep_cmd->add_option("--seed", seed, "base seed");
  sweep_cmd->add_option("--epochs", epochs_override, "override training epochs");
  sweep_cmd->add_option("--jobs", jobs, "parallel cells (default 1)");
  sweep_cmd->add_flag("--warm-start", warm_start,
                      "warm start the first dnn seed from pca");

  auto* check = app.add_subcommand("check", "Run the self-check oracles");
  check->add_option("--suite", suite, "embedding|gradients|all")
      ->required()
      ->check(CLI::IsMember({"embedding", "gradients", "all"}));

  auto* reproduce =
      app.add_subcommand("reproduce-benchmark",
                         "generate + sweep over every method and write the "
                         "comparison report");
  reproduce->add_option("--config", config_path, "config JSON");
  reproduce->add_option("--out", out_dir, "output directory")->required();
  reproduce->add_option("--seed", seed, "base seed");
  reproduce->add_option("--methods", methods, "methods (default all)")
      ->delimiter(',');
  reproduce->add_option("--nphi-range", nphi_range, "default 1..10");
  reproduce->add_option("--seeds", seeds, "default 5");
  reproduce->add_option("--epochs", epochs_override, "override training epochs");
  reproduce->add_option("--jobs", jobs, "parallel cells (default 1)");
  reproduce->add_flag("--warm-start", warm_start,
                      "warm start the first dnn seed from pca");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (generate->parsed()) {
      return run_generate(config_path, out_prefix, trajectory_out);
    }
    if (reduce->parsed()) {
      return run_reduce(method, n_phi, data_prefix, model_path, config_path,
                        out_prefix, seed, epochs_override, epsilon);
    }
    if (sweep_cmd->parsed()) {
      return run_sweep(methods, nphi_range, seeds, data_prefix, model_path,
                       config_path, out_dir, seed, epochs_override, jobs,
                       warm_start);
    }
    if (check->parsed()) {
      return run_check(suite);
    }
    if (reproduce->parsed()) {
      if (methods.empty()) methods = {"pca", "kpca", "ae", "dnn"};
      return run_reproduce(config_path, out_dir, seed, methods, nphi_range,
                           seeds, epochs_override, jobs, warm_start);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::runtime_error& e) {
    std::cerr << "fit failed: " << e.what() << "\n";
    return kExitFit;
  }
  return 0;
}
