#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "lpvsdr/dataset.hpp"
#include "lpvsdr/lpv_model.hpp"
#include "lpvsdr/manipulator.hpp"

namespace lpvsdr {

using Dynamics =
    std::function<Eigen::VectorXd(const Eigen::VectorXd& x, const Eigen::VectorXd& u)>;
using InputSignal = std::function<Eigen::VectorXd(double t)>;

// Classic fixed-step 4th-order Runge-Kutta. Returns the states at
// t = 0, Ts, ..., duration, one column per instant. Throws on non-finite
// states, naming the time of blow-up.
Eigen::MatrixXd integrate_rk4(const Dynamics& field, const Eigen::VectorXd& x0,
                              const InputSignal& input, double sample_time,
                              double duration);

enum class ReferenceKind { sinusoid_sum, square_wave, piecewise_linear };

struct SinusoidTerm {
  double amplitude = 0.0;
  double frequency = 0.0;  // rad/s
  double phase = 0.0;
};

struct ReferenceChannel {
  std::vector<SinusoidTerm> terms;  // sinusoid_sum
  double period = 0.0;              // square_wave
  double amplitude = 0.0;           // square_wave
  std::vector<double> times;        // piecewise_linear breakpoints
  std::vector<double> values;
};

struct ReferenceSpec {
  ReferenceKind kind = ReferenceKind::sinusoid_sum;
  std::vector<ReferenceChannel> channels;
  double duration = 20.0;
  double sample_time = 0.01;

  void check() const;

  // Default angle references: two sinusoid sums with sub-1 rad amplitudes and
  // sub-1 rad/s frequencies, a second one of the same family, and a square
  // wave on the first joint with the second held at zero.
  static ReferenceSpec reference1();
  static ReferenceSpec reference2();
  static ReferenceSpec reference3();
};

struct ReferenceTrajectory {
  Eigen::VectorXd time;
  Eigen::MatrixXd q;   // channels x samples
  Eigen::MatrixXd dq;  // analytic derivative; zero at square-wave jumps
  double sample_time = 0.0;
};

ReferenceTrajectory generate_reference(const ReferenceSpec& spec);

// Scheduling dataset along a reference: column k is eta(q(k), dq(k)).
TrajectoryDataset generate_scheduling_data(const ManipulatorParams& params,
                                           const ReferenceTrajectory& ref);

struct LpvSimResult {
  Eigen::MatrixXd states;   // nx x K
  Eigen::MatrixXd outputs;  // ny x K
};

// Integrates xdot = A(s) x + B(s) u with zero-order-hold schedule and input
// (both one column per sample instant), RK4 within each hold interval.
LpvSimResult simulate_lpv(const AffineLpvModel& model,
                          const Eigen::MatrixXd& schedule,
                          const Eigen::MatrixXd& input,
                          const Eigen::VectorXd& x0, double sample_time);

}  // namespace lpvsdr
