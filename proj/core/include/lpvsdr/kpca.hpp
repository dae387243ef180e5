#pragma once

#include <Eigen/Dense>

#include "lpvsdr/dataset.hpp"

namespace lpvsdr {

enum class KernelKind { sigmoid, rbf, polynomial };

struct KernelSpec {
  KernelKind kind = KernelKind::sigmoid;
  double kappa = 0.1;
  double iota = 0.1;  // unused for rbf

  void check() const;
};

// sigmoid: tanh(kappa x'y + iota); rbf: exp(-|x-y|^2 / kappa^2);
// polynomial: (x'y + iota)^kappa with kappa a positive integer.
double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y);

// Kernel principal components of the normalized data: fitted coefficient
// vectors (scaled by 1/sqrt(lambda)) against the training points, plus the
// centering statistics needed for out-of-sample projection. No inverse map
// exists; reduced models are built by refitting matrices over the latent
// data.
class KpcaReducer {
 public:
  KpcaReducer(KernelSpec kernel, Eigen::MatrixXd training_points,
              Eigen::MatrixXd alphas, Eigen::VectorXd eigenvalues,
              Eigen::VectorXd row_means, double grand_mean,
              int discarded_negative, Normalizer normalizer);

  Eigen::VectorXd map(const Eigen::VectorXd& rho) const;
  Eigen::MatrixXd map_cols(const Eigen::MatrixXd& gamma) const;

  int n_phi() const { return static_cast<int>(alphas_.cols()); }
  const KernelSpec& kernel() const { return kernel_; }
  const Eigen::MatrixXd& training_points() const { return training_points_; }
  const Eigen::MatrixXd& alphas() const { return alphas_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const Eigen::VectorXd& row_means() const { return row_means_; }
  double grand_mean() const { return grand_mean_; }
  int discarded_negative() const { return discarded_negative_; }
  const Normalizer& normalizer() const { return normalizer_; }

 private:
  KernelSpec kernel_;
  Eigen::MatrixXd training_points_;  // normalized, n_rho x N
  Eigen::MatrixXd alphas_;           // N x n_phi
  Eigen::VectorXd eigenvalues_;      // retained, positive, nonincreasing
  Eigen::VectorXd row_means_;        // mean row of the training kernel matrix
  double grand_mean_ = 0.0;
  int discarded_negative_ = 0;
  Normalizer normalizer_;
};

// Builds the centered kernel matrix of the normalized data, keeps the top
// n_phi strictly positive eigenpairs. Throws if fewer positive eigenvalues
// exist, naming the count.
KpcaReducer fit_kpca(const TrajectoryDataset& dataset, const KernelSpec& spec,
                     int n_phi);

}  // namespace lpvsdr
