#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace lpvsdr {

// Per-coordinate interval, used to describe compact operating boxes.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};
using Box = std::vector<Interval>;

struct StateSpaceBlocks {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
  Eigen::MatrixXd c;
  Eigen::MatrixXd d;
};

// Affine parameter-dependent system matrix family
//
//   M(rho) = M0 + sum_i Mi * rho_i
//
// with row count nx + ny and column count nx + nu. The scheduling box is
// optional metadata describing where rho is expected to live.
class AffineLpvModel {
 public:
  AffineLpvModel(Eigen::MatrixXd m0, std::vector<Eigen::MatrixXd> coeffs,
                 int nx, int nu, int ny,
                 std::optional<Box> sched_box = std::nullopt);

  int nx() const { return nx_; }
  int nu() const { return nu_; }
  int ny() const { return ny_; }
  int n_rho() const { return static_cast<int>(coeffs_.size()); }
  Eigen::Index rows() const { return m0_.rows(); }
  Eigen::Index cols() const { return m0_.cols(); }
  // Length of the vectorized matrix variation (rows * cols).
  Eigen::Index variation_size() const { return m0_.size(); }

  const Eigen::MatrixXd& m0() const { return m0_; }
  const std::vector<Eigen::MatrixXd>& coeffs() const { return coeffs_; }
  const std::optional<Box>& sched_box() const { return sched_box_; }

  Eigen::MatrixXd eval(const Eigen::VectorXd& rho) const;

  // sum_i vec(Mi) * rho_i with column-major stacking; the constant part is
  // excluded.
  Eigen::VectorXd variation_vec(const Eigen::VectorXd& rho) const;

 private:
  Eigen::MatrixXd m0_;
  std::vector<Eigen::MatrixXd> coeffs_;
  int nx_ = 0;
  int nu_ = 0;
  int ny_ = 0;
  std::optional<Box> sched_box_;
};

StateSpaceBlocks split_blocks(const Eigen::MatrixXd& m, int nx, int nu, int ny);
Eigen::MatrixXd assemble_blocks(const StateSpaceBlocks& blocks);

}  // namespace lpvsdr
