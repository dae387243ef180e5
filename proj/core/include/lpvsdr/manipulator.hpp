#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "lpvsdr/lpv_model.hpp"

namespace lpvsdr {

// Aggregate physical constants of the two-link planar manipulator. The
// inertia values must satisfy a*c > b^2 so the mass matrix is invertible at
// every configuration.
class ManipulatorParams {
 public:
  ManipulatorParams(double a, double b, double c, double d, double e, double f,
                    double gear);

  static ManipulatorParams nominal();

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double d() const { return d_; }
  double e() const { return e_; }
  double f() const { return f_; }
  double gear() const { return gear_; }

  // Determinant of the mass matrix, a*c - b^2*cos_delta^2; positive for all
  // joint angles.
  double mass_determinant(double cos_delta) const;

 private:
  double a_, b_, c_, d_, e_, f_, gear_;
};

struct ManipulatorState {
  double q1 = 0.0;
  double q2 = 0.0;
  double dq1 = 0.0;
  double dq2 = 0.0;

  Eigen::Vector4d pack() const { return {q1, q2, dq1, dq2}; }
  static ManipulatorState unpack(const Eigen::Vector4d& x) {
    return {x[0], x[1], x[2], x[3]};
  }
};

// State derivative (dq1, dq2, ddq1, ddq2) of the rigid-body dynamics with
// viscous friction and gravity, driven by the two motor torques.
Eigen::Vector4d dynamics(const ManipulatorParams& params,
                         const Eigen::Vector4d& x, const Eigen::Vector2d& tau);

// The 10-dimensional scheduling map eta(x). sinc is the unnormalized
// sin(z)/z with sinc(0) = 1.
Eigen::VectorXd scheduling_map(const ManipulatorParams& params,
                               const Eigen::Vector4d& x);

// Exact affine embedding of the manipulator: n_rho = 10, nx = 4, nu = 2,
// ny = 2. A(eta(x)) x + B(eta(x)) tau reproduces dynamics(x, tau).
AffineLpvModel build_lpv_model(const ManipulatorParams& params);

// Max over samples of the infinity-norm residual between the nonlinear
// dynamics and the affine embedding evaluated along the scheduling map.
double embedding_max_residual(
    const ManipulatorParams& params,
    const std::vector<std::pair<Eigen::Vector4d, Eigen::Vector2d>>& samples);

}  // namespace lpvsdr
