#pragma once

#include <Eigen/Dense>
#include <optional>

namespace lpvsdr {

// Affine per-row map that takes data rows into [-1, 1] and back.
class Normalizer {
 public:
  Normalizer() = default;
  Normalizer(Eigen::VectorXd offset, Eigen::VectorXd scale);

  // offset_i = (max_i + min_i) / 2 and scale_i = (max_i - min_i) / 2 per row.
  // Constant rows get scale 1 so the map stays invertible; they normalize
  // to zero.
  static Normalizer fit(const Eigen::MatrixXd& gamma);

  Eigen::VectorXd apply(const Eigen::VectorXd& rho) const;
  Eigen::MatrixXd apply_cols(const Eigen::MatrixXd& gamma) const;
  Eigen::VectorXd invert(const Eigen::VectorXd& rho_n) const;
  Eigen::MatrixXd invert_cols(const Eigen::MatrixXd& gamma_n) const;

  const Eigen::VectorXd& offset() const { return offset_; }
  const Eigen::VectorXd& scale() const { return scale_; }
  Eigen::Index dim() const { return offset_.size(); }

 private:
  Eigen::VectorXd offset_;
  Eigen::VectorXd scale_;
};

struct SourceTrajectories {
  Eigen::MatrixXd states;  // one column per sample
  Eigen::MatrixXd inputs;  // may be empty
};

// Scheduling samples, one per column, taken at a fixed sample time.
struct TrajectoryDataset {
  Eigen::MatrixXd gamma;  // n_rho x N
  double sample_time = 0.0;
  std::optional<SourceTrajectories> source;

  Eigen::Index n_rho() const { return gamma.rows(); }
  Eigen::Index samples() const { return gamma.cols(); }
  void check() const;
};

}  // namespace lpvsdr
