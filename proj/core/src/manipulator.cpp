#include "lpvsdr/manipulator.hpp"

#include <cmath>
#include <stdexcept>

namespace lpvsdr {

namespace {

// Unnormalized sinc with the removable singularity filled in.
double sinc(double z) {
  if (std::abs(z) < 1e-4) {
    const double z2 = z * z;
    return 1.0 - z2 / 6.0 * (1.0 - z2 / 20.0);
  }
  return std::sin(z) / z;
}

}  // namespace

ManipulatorParams::ManipulatorParams(double a, double b, double c, double d,
                                     double e, double f, double gear)
    : a_(a), b_(b), c_(c), d_(d), e_(e), f_(f), gear_(gear) {
  if (!(a_ * c_ - b_ * b_ > 0.0)) {
    throw std::invalid_argument(
        "manipulator parameters must satisfy a*c > b^2");
  }
}

ManipulatorParams ManipulatorParams::nominal() {
  return ManipulatorParams(5.6794, 1.473, 1.7985, 0.4, 0.4, 2.0, 1.0);
}

double ManipulatorParams::mass_determinant(double cos_delta) const {
  return a_ * c_ - b_ * b_ * cos_delta * cos_delta;
}

Eigen::Vector4d dynamics(const ManipulatorParams& p, const Eigen::Vector4d& x,
                         const Eigen::Vector2d& tau) {
  const double q1 = x[0], q2 = x[1], dq1 = x[2], dq2 = x[3];
  const double cd = std::cos(q1 - q2);
  const double sd = std::sin(q1 - q2);
  const double h = p.mass_determinant(cd);

  const Eigen::Vector2d coriolis{p.b() * sd * dq2 * dq2 + p.f() * dq1,
                                 -p.b() * sd * dq1 * dq1 +
                                     p.f() * (dq2 - dq1)};
  const Eigen::Vector2d gravity{-p.d() * std::sin(q1), -p.e() * std::sin(q2)};

  const Eigen::Vector2d rhs = p.gear() * tau - coriolis - gravity;
  // Closed-form 2x2 mass matrix inverse.
  const Eigen::Vector2d ddq{(p.c() * rhs[0] - p.b() * cd * rhs[1]) / h,
                            (-p.b() * cd * rhs[0] + p.a() * rhs[1]) / h};
  return {dq1, dq2, ddq[0], ddq[1]};
}

Eigen::VectorXd scheduling_map(const ManipulatorParams& p,
                               const Eigen::Vector4d& x) {
  const double q1 = x[0], q2 = x[1], dq1 = x[2], dq2 = x[3];
  const double cd = std::cos(q1 - q2);
  const double sd = std::sin(q1 - q2);
  const double h = p.mass_determinant(cd);

  Eigen::VectorXd rho(10);
  rho[0] = 1.0 / h;
  rho[1] = cd / h;
  rho[2] = sinc(q1) / h;
  rho[3] = cd * sinc(q2) / h;
  rho[4] = (-p.b() * p.b() * sd * cd * dq1 - (p.c() + p.b() * cd) * p.f()) / h;
  rho[5] = (-p.c() * sd * dq2 + cd * p.f()) / h;
  rho[6] = cd * sinc(q1) / h;
  rho[7] = sinc(q2) / h;
  rho[8] = (p.a() * p.b() * sd * dq1 + p.f() * (p.a() + p.b() * cd)) / h;
  rho[9] = (p.b() * p.b() * sd * cd * dq2 - p.a() * p.f()) / h;
  return rho;
}

AffineLpvModel build_lpv_model(const ManipulatorParams& p) {
  const int nx = 4, nu = 2, ny = 2;
  Eigen::MatrixXd m0 = Eigen::MatrixXd::Zero(nx + ny, nx + nu);
  m0(0, 2) = 1.0;
  m0(1, 3) = 1.0;
  m0(4, 0) = 1.0;  // C = [I2 0], D = 0
  m0(5, 1) = 1.0;

  std::vector<Eigen::MatrixXd> coeffs(
      10, Eigen::MatrixXd::Zero(nx + ny, nx + nu));
  // Torque channels through the inverse mass matrix.
  coeffs[0](2, 4) = p.c() * p.gear();
  coeffs[0](3, 5) = p.a() * p.gear();
  coeffs[1](2, 5) = -p.b() * p.gear();
  coeffs[1](3, 4) = -p.b() * p.gear();
  // Gravity terms, written through the sinc factors in rho.
  coeffs[2](2, 0) = p.c() * p.d();
  coeffs[3](2, 1) = -p.b() * p.e();
  coeffs[6](3, 0) = -p.b() * p.d();
  coeffs[7](3, 1) = p.a() * p.e();
  // Velocity coupling and friction.
  coeffs[4](2, 2) = 1.0;
  coeffs[5](2, 3) = p.b();
  coeffs[8](3, 2) = 1.0;
  coeffs[9](3, 3) = 1.0;

  return AffineLpvModel(std::move(m0), std::move(coeffs), nx, nu, ny);
}

double embedding_max_residual(
    const ManipulatorParams& params,
    const std::vector<std::pair<Eigen::Vector4d, Eigen::Vector2d>>& samples) {
  if (samples.empty()) {
    throw std::invalid_argument("embedding check needs at least one sample");
  }
  const AffineLpvModel model = build_lpv_model(params);
  double worst = 0.0;
  for (const auto& [x, tau] : samples) {
    const Eigen::MatrixXd m = model.eval(scheduling_map(params, x));
    const Eigen::Vector4d lpv =
        m.topLeftCorner(4, 4) * x + m.topRightCorner(4, 2) * tau;
    const Eigen::Vector4d residual = dynamics(params, x, tau) - lpv;
    worst = std::max(worst, residual.cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace lpvsdr
