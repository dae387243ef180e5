#include "lpvsdr/dataset.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace lpvsdr {

namespace {

void require_dim(const Normalizer& nrm, Eigen::Index got) {
  if (got != nrm.dim()) {
    throw std::invalid_argument("normalizer dimension " +
                                std::to_string(nrm.dim()) +
                                " does not match data dimension " +
                                std::to_string(got));
  }
}

}  // namespace

Normalizer::Normalizer(Eigen::VectorXd offset, Eigen::VectorXd scale)
    : offset_(std::move(offset)), scale_(std::move(scale)) {
  if (offset_.size() != scale_.size()) {
    throw std::invalid_argument("offset and scale must have equal length");
  }
  if ((scale_.array() <= 0.0).any()) {
    throw std::invalid_argument("scale entries must be positive");
  }
}

Normalizer Normalizer::fit(const Eigen::MatrixXd& gamma) {
  if (gamma.rows() == 0 || gamma.cols() == 0) {
    throw std::invalid_argument("cannot fit a normalizer to an empty matrix");
  }
  Eigen::VectorXd lo = gamma.rowwise().minCoeff();
  Eigen::VectorXd hi = gamma.rowwise().maxCoeff();
  Eigen::VectorXd offset = 0.5 * (hi + lo);
  Eigen::VectorXd scale = 0.5 * (hi - lo);
  for (Eigen::Index i = 0; i < scale.size(); ++i) {
    if (scale[i] == 0.0) scale[i] = 1.0;
  }
  return Normalizer(std::move(offset), std::move(scale));
}

Eigen::VectorXd Normalizer::apply(const Eigen::VectorXd& rho) const {
  require_dim(*this, rho.size());
  return (rho - offset_).cwiseQuotient(scale_);
}

Eigen::MatrixXd Normalizer::apply_cols(const Eigen::MatrixXd& gamma) const {
  require_dim(*this, gamma.rows());
  return (gamma.colwise() - offset_).array().colwise() / scale_.array();
}

Eigen::VectorXd Normalizer::invert(const Eigen::VectorXd& rho_n) const {
  require_dim(*this, rho_n.size());
  return scale_.cwiseProduct(rho_n) + offset_;
}

Eigen::MatrixXd Normalizer::invert_cols(const Eigen::MatrixXd& gamma_n) const {
  require_dim(*this, gamma_n.rows());
  return (gamma_n.array().colwise() * scale_.array()).matrix().colwise() +
         offset_;
}

void TrajectoryDataset::check() const {
  if (gamma.cols() < 1 || gamma.rows() < 1) {
    throw std::invalid_argument("dataset needs at least one sample and row");
  }
  if (!(sample_time > 0.0)) {
    throw std::invalid_argument("sample_time must be positive");
  }
}

}  // namespace lpvsdr
