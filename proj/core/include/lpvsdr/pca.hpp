#pragma once

#include <Eigen/Dense>

#include "lpvsdr/dataset.hpp"
#include "lpvsdr/lpv_model.hpp"

namespace lpvsdr {

// Linear reduction phi = Us^T N(rho), with Us the leading left singular
// vectors of the normalized data matrix.
class PcaReducer {
 public:
  PcaReducer(Eigen::MatrixXd basis, Eigen::VectorXd singular_values,
             Normalizer normalizer);

  Eigen::VectorXd map(const Eigen::VectorXd& rho) const;
  Eigen::MatrixXd map_cols(const Eigen::MatrixXd& gamma) const;
  Eigen::VectorXd inverse(const Eigen::VectorXd& phi) const;
  Eigen::MatrixXd inverse_cols(const Eigen::MatrixXd& phi) const;

  // Closed-form reduced model through the affine denormalization: with scale
  // s and offset o, M^0 = M0 + sum_i Mi o_i and M^j = sum_i Mi s_i Us(i,j).
  AffineLpvModel reduced_model(const AffineLpvModel& model) const;

  int n_phi() const { return static_cast<int>(basis_.cols()); }
  const Eigen::MatrixXd& basis() const { return basis_; }
  const Eigen::VectorXd& singular_values() const { return singular_values_; }
  const Normalizer& normalizer() const { return normalizer_; }

 private:
  Eigen::MatrixXd basis_;            // n_rho x n_phi, orthonormal columns
  Eigen::VectorXd singular_values_;  // all of them, for diagnostics
  Normalizer normalizer_;
};

// SVD of the normalized data matrix, keeping the top n_phi left singular
// vectors. Column signs are fixed so each column's largest-magnitude entry
// is positive.
PcaReducer fit_pca(const TrajectoryDataset& dataset, int n_phi);

}  // namespace lpvsdr
