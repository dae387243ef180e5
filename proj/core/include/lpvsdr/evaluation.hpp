#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "lpvsdr/dataset.hpp"
#include "lpvsdr/kpca.hpp"
#include "lpvsdr/lpv_model.hpp"
#include "lpvsdr/nn.hpp"

namespace lpvsdr {

using SchedulingMapFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// (1/N) sum_j |M(rho_j) - M^(map(rho_j))|_F^2 over the dataset columns.
double frobenius_cost(const AffineLpvModel& model, const AffineLpvModel& reduced,
                      const TrajectoryDataset& dataset,
                      const SchedulingMapFn& map);

// Baseline for interpreting costs across datasets.
double mean_model_sq_norm(const AffineLpvModel& model,
                          const TrajectoryDataset& dataset);

struct EpsilonCheck {
  bool pass = false;
  Eigen::Index worst_index = -1;
  double worst_value = 0.0;  // Frobenius norm, not squared
};

EpsilonCheck epsilon_check(const AffineLpvModel& model,
                           const AffineLpvModel& reduced,
                           const TrajectoryDataset& dataset,
                           const SchedulingMapFn& map, double epsilon);

// sqrt(sum |z(k)|^2) / sqrt(sum |w(k)|^2); throws on zero input energy.
double signal_gain_ratio(const Eigen::MatrixXd& z, const Eigen::MatrixXd& w,
                         double sample_time);

struct OpenLoopError {
  double rms_output = 0.0;
  double peak_output = 0.0;  // max absolute entry of the output difference
  double rms_state = 0.0;
  double peak_state = 0.0;
};

// Simulates the full model with the dataset schedule and the reduced model
// with the mapped schedule, same input and initial state, and compares the
// trajectories.
OpenLoopError open_loop_error(const AffineLpvModel& model,
                              const AffineLpvModel& reduced,
                              const SchedulingMapFn& map,
                              const TrajectoryDataset& dataset,
                              const Eigen::MatrixXd& input,
                              const Eigen::VectorXd& x0);

enum class Method { pca, kpca, ae, dnn };

std::string method_name(Method m);
Method parse_method(const std::string& name);

struct SweepConfig {
  std::vector<Method> methods;
  std::vector<int> n_phi_values;
  int seeds = 1;
  std::uint64_t base_seed = 1;
  KernelSpec kernel;
  nn::TrainConfig ae_train;
  nn::TrainConfig dnn_train;
  std::vector<int> dnn_arch = {5};
  bool dnn_warm_start = false;
  bool refit_intercept = true;
  bool with_simulation = true;
  int jobs = 1;
};

struct SweepCell {
  std::string method;
  int n_phi = 0;
  bool ok = false;
  std::string error;
  std::vector<double> costs;  // one per seed, deterministic methods have one
  double cost_min = 0.0;
  double cost_median = 0.0;
  double wall_seconds = 0.0;
  int kpca_discarded_negative = 0;
  bool rank_deficient_refit = false;
  bool warm_started = false;
  // Decimated loss trace of the best seed (epoch index, objective value).
  std::vector<int> trace_epochs;
  std::vector<double> trace_loss;
  double sim_rms_output = 0.0;
  double sim_peak_output = 0.0;
  double gain_ratio = 0.0;
  bool has_simulation = false;
};

struct EvaluationReport {
  std::vector<SweepCell> cells;
  double baseline_mean_sq_norm = 0.0;
  std::string dataset_hash;
  std::uint64_t base_seed = 0;
  int n_rho = 0;
  int samples = 0;
  double sample_time = 0.0;

  bool any_ok() const;
};

// Fits every (method, n_phi) pair with per-cell seeds derived from the base
// seed. Per-cell failures are recorded, not fatal.
EvaluationReport sweep(const AffineLpvModel& model,
                       const TrajectoryDataset& dataset,
                       const SweepConfig& config);

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b,
                       std::uint64_t c);

std::string dataset_fingerprint(const TrajectoryDataset& dataset);

}  // namespace lpvsdr
