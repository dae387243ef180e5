#include "lpvsdr/lpv_model.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace lpvsdr {

AffineLpvModel::AffineLpvModel(Eigen::MatrixXd m0,
                               std::vector<Eigen::MatrixXd> coeffs, int nx,
                               int nu, int ny, std::optional<Box> sched_box)
    : m0_(std::move(m0)),
      coeffs_(std::move(coeffs)),
      nx_(nx),
      nu_(nu),
      ny_(ny),
      sched_box_(std::move(sched_box)) {
  if (nx_ < 0 || nu_ < 0 || ny_ < 0) {
    throw std::invalid_argument("model dimensions must be nonnegative");
  }
  if (m0_.rows() != nx_ + ny_ || m0_.cols() != nx_ + nu_) {
    throw std::invalid_argument(
        "m0 must be (nx+ny) x (nx+nu), got " + std::to_string(m0_.rows()) +
        "x" + std::to_string(m0_.cols()));
  }
  for (const auto& mi : coeffs_) {
    if (mi.rows() != m0_.rows() || mi.cols() != m0_.cols()) {
      throw std::invalid_argument(
          "coefficient matrices must share the shape of m0");
    }
  }
  if (sched_box_ &&
      static_cast<int>(sched_box_->size()) != static_cast<int>(coeffs_.size())) {
    throw std::invalid_argument("sched_box size must equal n_rho");
  }
}

Eigen::MatrixXd AffineLpvModel::eval(const Eigen::VectorXd& rho) const {
  if (rho.size() != n_rho()) {
    throw std::invalid_argument("rho has length " + std::to_string(rho.size()) +
                                ", expected " + std::to_string(n_rho()));
  }
  Eigen::MatrixXd m = m0_;
  for (int i = 0; i < n_rho(); ++i) {
    m.noalias() += coeffs_[static_cast<std::size_t>(i)] * rho[i];
  }
  return m;
}

Eigen::VectorXd AffineLpvModel::variation_vec(const Eigen::VectorXd& rho) const {
  if (rho.size() != n_rho()) {
    throw std::invalid_argument("rho has length " + std::to_string(rho.size()) +
                                ", expected " + std::to_string(n_rho()));
  }
  Eigen::VectorXd v = Eigen::VectorXd::Zero(variation_size());
  for (int i = 0; i < n_rho(); ++i) {
    const auto& mi = coeffs_[static_cast<std::size_t>(i)];
    v.noalias() +=
        Eigen::Map<const Eigen::VectorXd>(mi.data(), mi.size()) * rho[i];
  }
  return v;
}

StateSpaceBlocks split_blocks(const Eigen::MatrixXd& m, int nx, int nu, int ny) {
  if (nx < 0 || nu < 0 || ny < 0 || m.rows() != nx + ny || m.cols() != nx + nu) {
    throw std::invalid_argument("matrix shape inconsistent with nx, nu, ny");
  }
  StateSpaceBlocks blocks;
  blocks.a = m.topLeftCorner(nx, nx);
  blocks.b = m.topRightCorner(nx, nu);
  blocks.c = m.bottomLeftCorner(ny, nx);
  blocks.d = m.bottomRightCorner(ny, nu);
  return blocks;
}

Eigen::MatrixXd assemble_blocks(const StateSpaceBlocks& blocks) {
  const Eigen::Index nx = blocks.a.rows();
  const Eigen::Index nu = blocks.b.cols();
  const Eigen::Index ny = blocks.c.rows();
  if (blocks.a.cols() != nx || blocks.b.rows() != nx || blocks.c.cols() != nx ||
      blocks.d.rows() != ny || blocks.d.cols() != nu) {
    throw std::invalid_argument("block shapes do not fit together");
  }
  Eigen::MatrixXd m(nx + ny, nx + nu);
  m.topLeftCorner(nx, nx) = blocks.a;
  m.topRightCorner(nx, nu) = blocks.b;
  m.bottomLeftCorner(ny, nx) = blocks.c;
  m.bottomRightCorner(ny, nu) = blocks.d;
  return m;
}

}  // namespace lpvsdr
