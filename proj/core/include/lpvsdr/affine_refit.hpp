#pragma once

#include <Eigen/Dense>

#include "lpvsdr/lpv_model.hpp"

namespace lpvsdr {

struct AffineRefitResult {
  AffineLpvModel reduced;
  double cost = 0.0;  // attained mean squared Frobenius error over the data
  bool rank_deficient = false;
  Eigen::Index rank = 0;
};

// Least-squares fit of reduced coefficient matrices against the matrix
// variation along the data, given latent samples phi (n_phi x N, aligned
// with the columns of gamma). With include_intercept the constant matrix is
// adjusted by a bias term; otherwise it is copied from the source model.
// Rank-deficient regressors get the minimum-norm solution and are flagged.
AffineRefitResult fit_affine_matrices(const AffineLpvModel& model,
                                      const Eigen::MatrixXd& gamma,
                                      const Eigen::MatrixXd& phi,
                                      bool include_intercept = true);

}  // namespace lpvsdr
