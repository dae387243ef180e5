#include "lpvsdr/affine_refit.hpp"

#include <stdexcept>
#include <vector>

namespace lpvsdr {

AffineRefitResult fit_affine_matrices(const AffineLpvModel& model,
                                      const Eigen::MatrixXd& gamma,
                                      const Eigen::MatrixXd& phi,
                                      bool include_intercept) {
  if (gamma.rows() != model.n_rho()) {
    throw std::invalid_argument("data dimension does not match the model");
  }
  if (phi.cols() != gamma.cols()) {
    throw std::invalid_argument("phi must have one column per data sample");
  }
  const Eigen::Index n_samples = gamma.cols();
  if (n_samples < 1) {
    throw std::invalid_argument("refit needs at least one sample");
  }
  const Eigen::Index n_phi = phi.rows();
  const Eigen::Index nv = model.variation_size();

  // Targets: vectorized matrix variation per sample.
  Eigen::MatrixXd targets_t(n_samples, nv);
  for (Eigen::Index j = 0; j < n_samples; ++j) {
    targets_t.row(j) = model.variation_vec(gamma.col(j)).transpose();
  }

  const Eigen::Index n_reg = n_phi + (include_intercept ? 1 : 0);
  Eigen::MatrixXd regressor(n_samples, n_reg);
  regressor.leftCols(n_phi) = phi.transpose();
  if (include_intercept) regressor.col(n_phi).setOnes();

  Eigen::MatrixXd solution = Eigen::MatrixXd::Zero(n_reg, nv);
  bool rank_deficient = false;
  Eigen::Index rank = 0;
  if (n_reg > 0) {
    // Orthogonal factorization; gives the minimum-norm solution when the
    // regressor is rank deficient.
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(regressor);
    solution = cod.solve(targets_t);
    rank = cod.rank();
    rank_deficient = rank < n_reg;
  }

  const Eigen::MatrixXd residual = regressor * solution - targets_t;
  const double cost =
      residual.squaredNorm() / static_cast<double>(n_samples);

  const Eigen::Index rows = model.rows();
  const Eigen::Index cols = model.cols();
  Eigen::MatrixXd m0 = model.m0();
  if (include_intercept) {
    const Eigen::VectorXd bias = solution.row(n_phi).transpose();
    m0 += Eigen::Map<const Eigen::MatrixXd>(bias.data(), rows, cols);
  }
  std::vector<Eigen::MatrixXd> coeffs;
  coeffs.reserve(static_cast<std::size_t>(n_phi));
  for (Eigen::Index i = 0; i < n_phi; ++i) {
    const Eigen::VectorXd col = solution.row(i).transpose();
    coeffs.emplace_back(Eigen::Map<const Eigen::MatrixXd>(col.data(), rows, cols));
  }

  return AffineRefitResult{
      AffineLpvModel(std::move(m0), std::move(coeffs), model.nx(), model.nu(),
                     model.ny()),
      cost, rank_deficient, rank};
}

}  // namespace lpvsdr
