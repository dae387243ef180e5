#include "lpvsdr/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>
#include <thread>
#include <utility>

#include "lpvsdr/affine_refit.hpp"
#include "lpvsdr/autoencoder.hpp"
#include "lpvsdr/dnn.hpp"
#include "lpvsdr/pca.hpp"
#include "lpvsdr/simulation.hpp"

namespace lpvsdr {

double frobenius_cost(const AffineLpvModel& model, const AffineLpvModel& reduced,
                      const TrajectoryDataset& dataset,
                      const SchedulingMapFn& map) {
  dataset.check();
  if (dataset.n_rho() != model.n_rho()) {
    throw std::invalid_argument("dataset dimension does not match the model");
  }
  double sum = 0.0;
  for (Eigen::Index j = 0; j < dataset.samples(); ++j) {
    const Eigen::VectorXd rho = dataset.gamma.col(j);
    sum += (model.eval(rho) - reduced.eval(map(rho))).squaredNorm();
  }
  return sum / static_cast<double>(dataset.samples());
}

double mean_model_sq_norm(const AffineLpvModel& model,
                          const TrajectoryDataset& dataset) {
  dataset.check();
  double sum = 0.0;
  for (Eigen::Index j = 0; j < dataset.samples(); ++j) {
    sum += model.eval(dataset.gamma.col(j)).squaredNorm();
  }
  return sum / static_cast<double>(dataset.samples());
}

EpsilonCheck epsilon_check(const AffineLpvModel& model,
                           const AffineLpvModel& reduced,
                           const TrajectoryDataset& dataset,
                           const SchedulingMapFn& map, double epsilon) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("epsilon must be positive");
  }
  dataset.check();
  EpsilonCheck result;
  for (Eigen::Index j = 0; j < dataset.samples(); ++j) {
    const Eigen::VectorXd rho = dataset.gamma.col(j);
    const double err = (model.eval(rho) - reduced.eval(map(rho))).norm();
    if (err > result.worst_value || result.worst_index < 0) {
      result.worst_value = err;
      result.worst_index = j;
    }
  }
  result.pass = result.worst_value < epsilon;
  return result;
}

double signal_gain_ratio(const Eigen::MatrixXd& z, const Eigen::MatrixXd& w,
                         double sample_time) {
  if (z.cols() != w.cols()) {
    throw std::invalid_argument("signals must have equal length");
  }
  if (!(sample_time > 0.0)) {
    throw std::invalid_argument("sample_time must be positive");
  }
  const double w_energy = w.squaredNorm();
  if (w_energy == 0.0) {
    throw std::invalid_argument("input signal has zero energy");
  }
  return std::sqrt(z.squaredNorm()) / std::sqrt(w_energy);
}

OpenLoopError open_loop_error(const AffineLpvModel& model,
                              const AffineLpvModel& reduced,
                              const SchedulingMapFn& map,
                              const TrajectoryDataset& dataset,
                              const Eigen::MatrixXd& input,
                              const Eigen::VectorXd& x0) {
  dataset.check();
  Eigen::MatrixXd reduced_schedule(reduced.n_rho(), dataset.samples());
  for (Eigen::Index j = 0; j < dataset.samples(); ++j) {
    reduced_schedule.col(j) = map(dataset.gamma.col(j));
  }
  const LpvSimResult full =
      simulate_lpv(model, dataset.gamma, input, x0, dataset.sample_time);
  const LpvSimResult red =
      simulate_lpv(reduced, reduced_schedule, input, x0, dataset.sample_time);

  const Eigen::MatrixXd dy = full.outputs - red.outputs;
  const Eigen::MatrixXd dx = full.states - red.states;
  const double n = static_cast<double>(dataset.samples());
  return OpenLoopError{std::sqrt(dy.squaredNorm() / n),
                       dy.cwiseAbs().maxCoeff(),
                       std::sqrt(dx.squaredNorm() / n),
                       dx.cwiseAbs().maxCoeff()};
}

std::string method_name(Method m) {
  switch (m) {
    case Method::pca:
      return "pca";
    case Method::kpca:
      return "kpca";
    case Method::ae:
      return "ae";
    case Method::dnn:
      return "dnn";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "pca") return Method::pca;
  if (name == "kpca") return Method::kpca;
  if (name == "ae") return Method::ae;
  if (name == "dnn") return Method::dnn;
  throw std::invalid_argument("unknown method '" + name + "'");
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b,
                       std::uint64_t c) {
  auto splitmix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = splitmix(base);
  h = splitmix(h ^ splitmix(a + 1));
  h = splitmix(h ^ splitmix(b + 1));
  h = splitmix(h ^ splitmix(c + 1));
  return h;
}

std::string dataset_fingerprint(const TrajectoryDataset& dataset) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  mix(dataset.gamma.data(),
      sizeof(double) * static_cast<std::size_t>(dataset.gamma.size()));
  mix(&dataset.sample_time, sizeof(double));
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

bool EvaluationReport::any_ok() const {
  return std::any_of(cells.begin(), cells.end(),
                     [](const SweepCell& c) { return c.ok; });
}

namespace {

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n == 0) return 0.0;
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

void decimate_trace(const nn::TrainTrace& trace, SweepCell* cell) {
  const std::size_t n = trace.loss.size();
  if (n == 0) return;
  const std::size_t stride = std::max<std::size_t>(1, (n + 199) / 200);
  for (std::size_t i = 0; i < n; i += stride) {
    cell->trace_epochs.push_back(static_cast<int>(i));
    cell->trace_loss.push_back(trace.loss[i]);
  }
  if (cell->trace_epochs.back() != static_cast<int>(n - 1)) {
    cell->trace_epochs.push_back(static_cast<int>(n - 1));
    cell->trace_loss.push_back(trace.loss[n - 1]);
  }
}

Eigen::MatrixXd probe_input(int nu, Eigen::Index samples, double sample_time) {
  Eigen::MatrixXd u(nu, samples);
  for (Eigen::Index k = 0; k < samples; ++k) {
    const double t = k * sample_time;
    for (int i = 0; i < nu; ++i) {
      u(i, k) = 0.5 * std::sin((1.1 + 0.2 * i) * t + 0.3 * i);
    }
  }
  return u;
}

void attach_simulation(const AffineLpvModel& model,
                       const AffineLpvModel& reduced,
                       const SchedulingMapFn& map,
                       const TrajectoryDataset& dataset, SweepCell* cell) {
  const Eigen::MatrixXd input =
      probe_input(model.nu(), dataset.samples(), dataset.sample_time);
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(model.nx());
  const OpenLoopError err =
      open_loop_error(model, reduced, map, dataset, input, x0);
  cell->sim_rms_output = err.rms_output;
  cell->sim_peak_output = err.peak_output;

  const LpvSimResult full =
      simulate_lpv(model, dataset.gamma, input, x0, dataset.sample_time);
  Eigen::MatrixXd reduced_schedule(reduced.n_rho(), dataset.samples());
  for (Eigen::Index j = 0; j < dataset.samples(); ++j) {
    reduced_schedule.col(j) = map(dataset.gamma.col(j));
  }
  const LpvSimResult red =
      simulate_lpv(reduced, reduced_schedule, input, x0, dataset.sample_time);
  cell->gain_ratio = signal_gain_ratio(full.outputs - red.outputs, input,
                                       dataset.sample_time);
  cell->has_simulation = true;
}

void run_cell(const AffineLpvModel& model, const TrajectoryDataset& dataset,
              const SweepConfig& config, Method method, int n_phi,
              SweepCell* cell) {
  cell->method = method_name(method);
  cell->n_phi = n_phi;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    switch (method) {
      case Method::pca: {
        const PcaReducer reducer = fit_pca(dataset, n_phi);
        const AffineLpvModel reduced = reducer.reduced_model(model);
        const SchedulingMapFn map = [&reducer](const Eigen::VectorXd& rho) {
          return reducer.map(rho);
        };
        cell->costs = {frobenius_cost(model, reduced, dataset, map)};
        if (config.with_simulation) {
          attach_simulation(model, reduced, map, dataset, cell);
        }
        break;
      }
      case Method::kpca: {
        const KpcaReducer reducer = fit_kpca(dataset, config.kernel, n_phi);
        const Eigen::MatrixXd phi = reducer.map_cols(dataset.gamma);
        const AffineRefitResult refit = fit_affine_matrices(
            model, dataset.gamma, phi, config.refit_intercept);
        const SchedulingMapFn map = [&reducer](const Eigen::VectorXd& rho) {
          return reducer.map(rho);
        };
        cell->costs = {refit.cost};
        cell->kpca_discarded_negative = reducer.discarded_negative();
        cell->rank_deficient_refit = refit.rank_deficient;
        if (config.with_simulation) {
          attach_simulation(model, refit.reduced, map, dataset, cell);
        }
        break;
      }
      case Method::ae: {
        double best_cost = 0.0;
        int best_seed = -1;
        AffineLpvModel best_reduced = model;
        nn::TrainTrace best_trace;
        std::shared_ptr<AeReducer> best_reducer;
        for (int s = 0; s < config.seeds; ++s) {
          nn::TrainConfig train_cfg = config.ae_train;
          train_cfg.rng_seed = mix_seed(config.base_seed, 2, n_phi, s);
          AeReducer reducer = fit_ae(dataset, n_phi, train_cfg);
          const Eigen::MatrixXd phi = reducer.map_cols(dataset.gamma);
          const AffineRefitResult refit = fit_affine_matrices(
              model, dataset.gamma, phi, config.refit_intercept);
          cell->costs.push_back(refit.cost);
          cell->rank_deficient_refit |= refit.rank_deficient;
          if (best_seed < 0 || refit.cost < best_cost) {
            best_cost = refit.cost;
            best_seed = s;
            best_reduced = refit.reduced;
            best_trace = reducer.trace();
            best_reducer = std::make_shared<AeReducer>(std::move(reducer));
          }
        }
        decimate_trace(best_trace, cell);
        if (config.with_simulation && best_reducer) {
          const SchedulingMapFn map =
              [reducer = best_reducer](const Eigen::VectorXd& rho) {
                return reducer->map(rho);
              };
          attach_simulation(model, best_reduced, map, dataset, cell);
        }
        break;
      }
      case Method::dnn: {
        double best_cost = 0.0;
        int best_seed = -1;
        nn::TrainTrace best_trace;
        std::shared_ptr<DnnReducer> best_reducer;
        for (int s = 0; s < config.seeds; ++s) {
          nn::TrainConfig train_cfg = config.dnn_train;
          train_cfg.rng_seed = mix_seed(config.base_seed, 3, n_phi, s);
          // With warm start enabled the first seed starts from the PCA
          // solution and the rest explore random inits.
          const bool warm = config.dnn_warm_start && s == 0;
          DnnReducer reducer =
              fit_dnn(model, dataset, n_phi, config.dnn_arch, train_cfg, warm);
          const AffineLpvModel reduced = reducer.reduced_model();
          const double cost = frobenius_cost(
              model, reduced, dataset, [&reducer](const Eigen::VectorXd& rho) {
                return reducer.map(rho);
              });
          cell->costs.push_back(cost);
          cell->warm_started |= reducer.warm_started();
          if (best_seed < 0 || cost < best_cost) {
            best_cost = cost;
            best_seed = s;
            best_trace = reducer.trace();
            best_reducer = std::make_shared<DnnReducer>(std::move(reducer));
          }
        }
        decimate_trace(best_trace, cell);
        if (config.with_simulation && best_reducer) {
          const SchedulingMapFn map =
              [reducer = best_reducer](const Eigen::VectorXd& rho) {
                return reducer->map(rho);
              };
          attach_simulation(model, best_reducer->reduced_model(), map, dataset,
                            cell);
        }
        break;
      }
    }
    cell->cost_min = *std::min_element(cell->costs.begin(), cell->costs.end());
    cell->cost_median = median(cell->costs);
    cell->ok = true;
  } catch (const std::exception& e) {
    cell->ok = false;
    cell->error = e.what();
  }
  cell->wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
}

}  // namespace

EvaluationReport sweep(const AffineLpvModel& model,
                       const TrajectoryDataset& dataset,
                       const SweepConfig& config) {
  if (config.methods.empty() || config.n_phi_values.empty()) {
    throw std::invalid_argument("sweep needs methods and n_phi values");
  }
  if (config.seeds < 1) {
    throw std::invalid_argument("sweep needs at least one seed");
  }
  dataset.check();

  EvaluationReport report;
  report.baseline_mean_sq_norm = mean_model_sq_norm(model, dataset);
  report.dataset_hash = dataset_fingerprint(dataset);
  report.base_seed = config.base_seed;
  report.n_rho = static_cast<int>(dataset.n_rho());
  report.samples = static_cast<int>(dataset.samples());
  report.sample_time = dataset.sample_time;
  report.cells.resize(config.methods.size() * config.n_phi_values.size());

  std::vector<std::pair<Method, int>> jobs;
  for (const Method method : config.methods) {
    for (const int n_phi : config.n_phi_values) {
      jobs.emplace_back(method, n_phi);
    }
  }

  const int workers = std::max(1, config.jobs);
  if (workers == 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      run_cell(model, dataset, config, jobs[i].first, jobs[i].second,
               &report.cells[i]);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= jobs.size()) break;
          run_cell(model, dataset, config, jobs[i].first, jobs[i].second,
                   &report.cells[i]);
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  return report;
}

}  // namespace lpvsdr
