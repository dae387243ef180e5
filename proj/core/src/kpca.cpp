#include "lpvsdr/kpca.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace lpvsdr {

void KernelSpec::check() const {
  switch (kind) {
    case KernelKind::sigmoid:
      break;
    case KernelKind::rbf:
      if (kappa == 0.0) {
        throw std::invalid_argument("rbf kernel requires kappa != 0");
      }
      break;
    case KernelKind::polynomial: {
      if (!(kappa > 0.0) || kappa != std::floor(kappa)) {
        throw std::invalid_argument(
            "polynomial kernel requires kappa to be a positive integer");
      }
      break;
    }
  }
}

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("kernel arguments must have equal length");
  }
  switch (spec.kind) {
    case KernelKind::sigmoid:
      return std::tanh(spec.kappa * x.dot(y) + spec.iota);
    case KernelKind::rbf:
      return std::exp(-(x - y).squaredNorm() / (spec.kappa * spec.kappa));
    case KernelKind::polynomial:
      return std::pow(x.dot(y) + spec.iota, spec.kappa);
  }
  throw std::invalid_argument("unknown kernel kind");
}

KpcaReducer::KpcaReducer(KernelSpec kernel, Eigen::MatrixXd training_points,
                         Eigen::MatrixXd alphas, Eigen::VectorXd eigenvalues,
                         Eigen::VectorXd row_means, double grand_mean,
                         int discarded_negative, Normalizer normalizer)
    : kernel_(kernel),
      training_points_(std::move(training_points)),
      alphas_(std::move(alphas)),
      eigenvalues_(std::move(eigenvalues)),
      row_means_(std::move(row_means)),
      grand_mean_(grand_mean),
      discarded_negative_(discarded_negative),
      normalizer_(std::move(normalizer)) {
  if (alphas_.rows() != training_points_.cols() ||
      row_means_.size() != training_points_.cols() ||
      eigenvalues_.size() != alphas_.cols()) {
    throw std::invalid_argument("kpca reducer fields have inconsistent shapes");
  }
}

Eigen::VectorXd KpcaReducer::map(const Eigen::VectorXd& rho) const {
  const Eigen::VectorXd z = normalizer_.apply(rho);
  const Eigen::Index n = training_points_.cols();
  Eigen::VectorXd kt(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    kt[i] = kernel_eval(kernel_, training_points_.col(i), z);
  }
  // Center against the training statistics.
  const double kt_mean = kt.mean();
  const Eigen::VectorXd centered =
      kt - row_means_ -
      Eigen::VectorXd::Constant(n, kt_mean - grand_mean_);
  return alphas_.transpose() * centered;
}

Eigen::MatrixXd KpcaReducer::map_cols(const Eigen::MatrixXd& gamma) const {
  Eigen::MatrixXd phi(n_phi(), gamma.cols());
  for (Eigen::Index j = 0; j < gamma.cols(); ++j) {
    phi.col(j) = map(gamma.col(j));
  }
  return phi;
}

KpcaReducer fit_kpca(const TrajectoryDataset& dataset, const KernelSpec& spec,
                     int n_phi) {
  dataset.check();
  spec.check();
  if (n_phi < 1) {
    throw std::invalid_argument("n_phi must be at least 1");
  }
  const Eigen::Index n = dataset.samples();

  Normalizer normalizer = Normalizer::fit(dataset.gamma);
  Eigen::MatrixXd z = normalizer.apply_cols(dataset.gamma);

  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = kernel_eval(spec, z.col(i), z.col(j));
      k(i, j) = v;
      k(j, i) = v;
    }
  }

  const Eigen::VectorXd row_means = k.rowwise().mean();
  const double grand_mean = k.mean();
  Eigen::MatrixXd kc = k;
  kc.colwise() -= row_means;
  kc.rowwise() -= row_means.transpose();
  kc.array() += grand_mean;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(kc);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("kernel matrix eigendecomposition failed");
  }
  const Eigen::VectorXd evals = es.eigenvalues();  // ascending

  // Eigenvalues indistinguishable from rounding noise of the centering do
  // not count as positive.
  const double tol = 16.0 * static_cast<double>(n) *
                     std::numeric_limits<double>::epsilon() *
                     std::max(1.0, k.cwiseAbs().maxCoeff());
  int positive = 0;
  int negative = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (evals[i] > tol) ++positive;
    if (evals[i] < -tol) ++negative;
  }
  if (positive < n_phi) {
    throw std::runtime_error(
        "kpca needs " + std::to_string(n_phi) +
        " positive kernel eigenvalues (positive eigenvalues: " +
        std::to_string(positive) + ")");
  }

  Eigen::MatrixXd alphas(n, n_phi);
  Eigen::VectorXd eigenvalues(n_phi);
  for (int l = 0; l < n_phi; ++l) {
    const Eigen::Index idx = n - 1 - l;  // largest first
    const double lambda = evals[idx];
    eigenvalues[l] = lambda;
    alphas.col(l) = es.eigenvectors().col(idx) / std::sqrt(lambda);
  }

  return KpcaReducer(spec, std::move(z), std::move(alphas),
                     std::move(eigenvalues), row_means, grand_mean, negative,
                     std::move(normalizer));
}

}  // namespace lpvsdr
