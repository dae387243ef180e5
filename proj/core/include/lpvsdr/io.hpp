#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lpvsdr/autoencoder.hpp"
#include "lpvsdr/dnn.hpp"
#include "lpvsdr/evaluation.hpp"
#include "lpvsdr/kpca.hpp"
#include "lpvsdr/manipulator.hpp"
#include "lpvsdr/pca.hpp"
#include "lpvsdr/simulation.hpp"

namespace lpvsdr::io {

// Models: JSON with nx, nu, ny, m0 and coeffs as row-major nested arrays,
// optional sched_box.
void write_model_json(const std::string& path, const AffineLpvModel& model);
AffineLpvModel read_model_json(const std::string& path);

// Datasets: CSV with one scheduling sample per column (an optional header
// line is skipped on read) plus a JSON sidecar carrying the sample time.
void write_dataset_csv(const std::string& csv_path,
                       const std::string& sidecar_path,
                       const TrajectoryDataset& dataset);
TrajectoryDataset read_dataset_csv(const std::string& csv_path,
                                   const std::string& sidecar_path);

// Time column plus one column per named channel row.
void write_trajectory_csv(
    const std::string& path, const Eigen::VectorXd& time,
    const std::vector<std::pair<std::string, Eigen::MatrixXd>>& channels);

void write_params_json(const std::string& path, const ManipulatorParams& params);
ManipulatorParams read_params_json(const std::string& path);

struct GenerateConfig {
  ManipulatorParams params = ManipulatorParams::nominal();
  ReferenceSpec reference = ReferenceSpec::reference1();
};

GenerateConfig read_generate_config(const std::string& path);

struct ReduceConfig {
  KernelSpec kernel;
  nn::TrainConfig ae_train = default_ae_train_config();
  nn::TrainConfig dnn_train = default_dnn_train_config();
  std::vector<int> dnn_arch = {5};
  bool dnn_warm_start = false;
  bool refit_intercept = true;
};

ReduceConfig read_reduce_config(const std::string& path);

void write_pca_json(const std::string& path, const PcaReducer& reducer);
PcaReducer read_pca_json(const std::string& path);

void write_kpca_json(const std::string& path, const KpcaReducer& reducer);
KpcaReducer read_kpca_json(const std::string& path);

void write_ae_json(const std::string& path, const AeReducer& reducer);
AeReducer read_ae_json(const std::string& path);

void write_dnn_json(const std::string& path, const DnnReducer& reducer);
DnnReducer read_dnn_json(const std::string& path);

void write_net_json(const std::string& path, const nn::FeedforwardNet& net);
nn::FeedforwardNet read_net_json(const std::string& path);

void write_report_json(const std::string& path, const EvaluationReport& report);
EvaluationReport read_report_json(const std::string& path);
// One row per method x n_phi; excludes wall times so repeated runs with the
// same seed are byte-identical.
void write_report_csv(const std::string& path, const EvaluationReport& report);

// Relative paths that do not exist locally are also looked up under
// $LPVSDR_CONFIG_DIR.
std::string resolve_config_path(const std::string& path);

}  // namespace lpvsdr::io
