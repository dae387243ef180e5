#include "lpvsdr/pca.hpp"

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lpvsdr {

PcaReducer::PcaReducer(Eigen::MatrixXd basis, Eigen::VectorXd singular_values,
                       Normalizer normalizer)
    : basis_(std::move(basis)),
      singular_values_(std::move(singular_values)),
      normalizer_(std::move(normalizer)) {
  if (basis_.rows() != normalizer_.dim()) {
    throw std::invalid_argument("basis rows must match the normalizer");
  }
  if (basis_.cols() < 1 || basis_.cols() > basis_.rows()) {
    throw std::invalid_argument("basis must keep between 1 and n_rho columns");
  }
}

Eigen::VectorXd PcaReducer::map(const Eigen::VectorXd& rho) const {
  return basis_.transpose() * normalizer_.apply(rho);
}

Eigen::MatrixXd PcaReducer::map_cols(const Eigen::MatrixXd& gamma) const {
  return basis_.transpose() * normalizer_.apply_cols(gamma);
}

Eigen::VectorXd PcaReducer::inverse(const Eigen::VectorXd& phi) const {
  if (phi.size() != basis_.cols()) {
    throw std::invalid_argument("phi has the wrong length");
  }
  return normalizer_.invert(basis_ * phi);
}

Eigen::MatrixXd PcaReducer::inverse_cols(const Eigen::MatrixXd& phi) const {
  if (phi.rows() != basis_.cols()) {
    throw std::invalid_argument("phi has the wrong row count");
  }
  return normalizer_.invert_cols(basis_ * phi);
}

AffineLpvModel PcaReducer::reduced_model(const AffineLpvModel& model) const {
  if (model.n_rho() != basis_.rows()) {
    throw std::invalid_argument("model does not match the fitted data");
  }
  const Eigen::VectorXd& o = normalizer_.offset();
  const Eigen::VectorXd& s = normalizer_.scale();

  Eigen::MatrixXd m0 = model.m0();
  for (int i = 0; i < model.n_rho(); ++i) {
    m0 += model.coeffs()[static_cast<std::size_t>(i)] * o[i];
  }
  std::vector<Eigen::MatrixXd> coeffs;
  coeffs.reserve(static_cast<std::size_t>(basis_.cols()));
  for (Eigen::Index j = 0; j < basis_.cols(); ++j) {
    Eigen::MatrixXd mj = Eigen::MatrixXd::Zero(model.rows(), model.cols());
    for (int i = 0; i < model.n_rho(); ++i) {
      mj += model.coeffs()[static_cast<std::size_t>(i)] * (s[i] * basis_(i, j));
    }
    coeffs.push_back(std::move(mj));
  }
  return AffineLpvModel(std::move(m0), std::move(coeffs), model.nx(),
                        model.nu(), model.ny());
}

PcaReducer fit_pca(const TrajectoryDataset& dataset, int n_phi) {
  dataset.check();
  const Eigen::Index n_rho = dataset.n_rho();
  if (n_phi < 1 || n_phi > n_rho) {
    throw std::invalid_argument("n_phi must lie in [1, n_rho], got " +
                                std::to_string(n_phi));
  }

  Normalizer normalizer = Normalizer::fit(dataset.gamma);
  const Eigen::MatrixXd normalized = normalizer.apply_cols(dataset.gamma);

  Eigen::BDCSVD<Eigen::MatrixXd> svd(normalized, Eigen::ComputeFullU);
  Eigen::VectorXd singular_values = Eigen::VectorXd::Zero(n_rho);
  singular_values.head(svd.singularValues().size()) = svd.singularValues();

  Eigen::MatrixXd basis = svd.matrixU().leftCols(n_phi);
  // Deterministic sign: make each column's largest-magnitude entry positive.
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    Eigen::Index idx = 0;
    basis.col(j).cwiseAbs().maxCoeff(&idx);
    if (basis(idx, j) < 0.0) basis.col(j) = -basis.col(j);
  }

  return PcaReducer(std::move(basis), std::move(singular_values),
                    std::move(normalizer));
}

}  // namespace lpvsdr
