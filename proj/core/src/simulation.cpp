#include "lpvsdr/simulation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lpvsdr {

namespace {

long step_count(double sample_time, double duration) {
  if (!(sample_time > 0.0)) {
    throw std::invalid_argument("sample_time must be positive");
  }
  if (!(duration > 0.0)) {
    throw std::invalid_argument("duration must be positive");
  }
  const long steps = std::lround(duration / sample_time);
  if (steps < 1 || std::abs(steps * sample_time - duration) > 1e-9) {
    throw std::invalid_argument(
        "duration must be an integer multiple of sample_time");
  }
  return steps;
}

[[noreturn]] void throw_blowup(double t) {
  throw std::runtime_error("state became non-finite at t = " +
                           std::to_string(t) + " s");
}

double square_wave(double t, double period, double amplitude) {
  const double u = t / period - std::floor(t / period);
  return (u < 0.5 ? amplitude : -amplitude) + 0.0;
}

void piecewise_linear_eval(const ReferenceChannel& ch, double t, double* value,
                           double* slope) {
  const auto& ts = ch.times;
  const auto& vs = ch.values;
  if (t <= ts.front()) {
    *value = vs.front();
    *slope = 0.0;
    return;
  }
  if (t >= ts.back()) {
    *value = vs.back();
    *slope = 0.0;
    return;
  }
  std::size_t k = 1;
  while (k < ts.size() && ts[k] <= t) ++k;
  const double dt = ts[k] - ts[k - 1];
  const double s = (vs[k] - vs[k - 1]) / dt;
  *value = vs[k - 1] + s * (t - ts[k - 1]);
  *slope = s;
}

}  // namespace

Eigen::MatrixXd integrate_rk4(const Dynamics& field, const Eigen::VectorXd& x0,
                              const InputSignal& input, double sample_time,
                              double duration) {
  const long steps = step_count(sample_time, duration);
  const double h = sample_time;

  Eigen::MatrixXd out(x0.size(), steps + 1);
  out.col(0) = x0;
  Eigen::VectorXd x = x0;
  for (long k = 0; k < steps; ++k) {
    const double t = k * h;
    const Eigen::VectorXd k1 = field(x, input(t));
    const Eigen::VectorXd k2 = field(x + 0.5 * h * k1, input(t + 0.5 * h));
    const Eigen::VectorXd k3 = field(x + 0.5 * h * k2, input(t + 0.5 * h));
    const Eigen::VectorXd k4 = field(x + h * k3, input(t + h));
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x.allFinite()) throw_blowup((k + 1) * h);
    out.col(k + 1) = x;
  }
  return out;
}

void ReferenceSpec::check() const {
  step_count(sample_time, duration);
  if (channels.empty()) {
    throw std::invalid_argument("reference needs at least one channel");
  }
  for (const auto& ch : channels) {
    switch (kind) {
      case ReferenceKind::sinusoid_sum:
        break;
      case ReferenceKind::square_wave:
        if (!(ch.period > 0.0)) {
          throw std::invalid_argument("square wave period must be positive");
        }
        break;
      case ReferenceKind::piecewise_linear: {
        if (ch.times.empty() || ch.times.size() != ch.values.size()) {
          throw std::invalid_argument(
              "piecewise-linear channel needs matching times and values");
        }
        for (std::size_t i = 1; i < ch.times.size(); ++i) {
          if (!(ch.times[i] > ch.times[i - 1])) {
            throw std::invalid_argument(
                "piecewise-linear breakpoints must be strictly increasing");
          }
        }
        break;
      }
    }
  }
}

ReferenceSpec ReferenceSpec::reference1() {
  ReferenceSpec spec;
  spec.kind = ReferenceKind::sinusoid_sum;
  spec.duration = 20.0;
  spec.sample_time = 0.01;
  spec.channels.resize(2);
  spec.channels[0].terms = {{0.7, 0.5, 0.0}, {0.3, 0.9, 0.4}};
  spec.channels[1].terms = {{0.6, 0.4, 1.0}, {0.4, 0.8, 0.0}};
  return spec;
}

ReferenceSpec ReferenceSpec::reference2() {
  ReferenceSpec spec;
  spec.kind = ReferenceKind::sinusoid_sum;
  spec.duration = 20.0;
  spec.sample_time = 0.01;
  spec.channels.resize(2);
  spec.channels[0].terms = {{0.8, 0.45, 0.2}, {0.2, 0.95, 1.1}};
  spec.channels[1].terms = {{0.5, 0.35, 0.7}, {0.5, 0.75, 0.3}};
  return spec;
}

ReferenceSpec ReferenceSpec::reference3() {
  ReferenceSpec spec;
  spec.kind = ReferenceKind::square_wave;
  spec.duration = 20.0;
  spec.sample_time = 0.01;
  spec.channels.resize(2);
  spec.channels[0].period = 8.0;
  spec.channels[0].amplitude = 1.0;
  spec.channels[1].period = 8.0;
  spec.channels[1].amplitude = 0.0;
  return spec;
}

ReferenceTrajectory generate_reference(const ReferenceSpec& spec) {
  spec.check();
  const long steps = std::lround(spec.duration / spec.sample_time);
  const Eigen::Index n = steps + 1;
  const Eigen::Index channels = static_cast<Eigen::Index>(spec.channels.size());

  ReferenceTrajectory traj;
  traj.sample_time = spec.sample_time;
  traj.time = Eigen::VectorXd::LinSpaced(n, 0.0, steps * spec.sample_time);
  traj.q = Eigen::MatrixXd::Zero(channels, n);
  traj.dq = Eigen::MatrixXd::Zero(channels, n);

  for (Eigen::Index c = 0; c < channels; ++c) {
    const auto& ch = spec.channels[static_cast<std::size_t>(c)];
    for (Eigen::Index k = 0; k < n; ++k) {
      const double t = k * spec.sample_time;
      switch (spec.kind) {
        case ReferenceKind::sinusoid_sum: {
          double q = 0.0, dq = 0.0;
          for (const auto& term : ch.terms) {
            q += term.amplitude * std::sin(term.frequency * t + term.phase);
            dq += term.amplitude * term.frequency *
                  std::cos(term.frequency * t + term.phase);
          }
          traj.q(c, k) = q;
          traj.dq(c, k) = dq;
          break;
        }
        case ReferenceKind::square_wave:
          traj.q(c, k) = square_wave(t, ch.period, ch.amplitude);
          traj.dq(c, k) = 0.0;
          break;
        case ReferenceKind::piecewise_linear: {
          double q = 0.0, dq = 0.0;
          piecewise_linear_eval(ch, t, &q, &dq);
          traj.q(c, k) = q;
          traj.dq(c, k) = dq;
          break;
        }
      }
    }
  }
  return traj;
}

TrajectoryDataset generate_scheduling_data(const ManipulatorParams& params,
                                           const ReferenceTrajectory& ref) {
  if (ref.q.rows() != 2 || ref.dq.rows() != 2 || ref.q.cols() != ref.dq.cols()) {
    throw std::invalid_argument(
        "scheduling data needs two angle channels with matching velocities");
  }
  const Eigen::Index n = ref.q.cols();
  TrajectoryDataset dataset;
  dataset.sample_time = ref.sample_time;
  dataset.gamma.resize(10, n);
  Eigen::MatrixXd states(4, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Vector4d x{ref.q(0, k), ref.q(1, k), ref.dq(0, k),
                            ref.dq(1, k)};
    states.col(k) = x;
    dataset.gamma.col(k) = scheduling_map(params, x);
  }
  dataset.source = SourceTrajectories{std::move(states), Eigen::MatrixXd()};
  return dataset;
}

LpvSimResult simulate_lpv(const AffineLpvModel& model,
                          const Eigen::MatrixXd& schedule,
                          const Eigen::MatrixXd& input,
                          const Eigen::VectorXd& x0, double sample_time) {
  if (schedule.cols() != input.cols()) {
    throw std::invalid_argument("schedule and input lengths differ");
  }
  if (schedule.cols() < 1) {
    throw std::invalid_argument("schedule must have at least one sample");
  }
  if (schedule.rows() != model.n_rho()) {
    throw std::invalid_argument("schedule dimension does not match the model");
  }
  if (input.rows() != model.nu() || x0.size() != model.nx()) {
    throw std::invalid_argument("input or initial state dimension mismatch");
  }
  if (!(sample_time > 0.0)) {
    throw std::invalid_argument("sample_time must be positive");
  }

  const Eigen::Index k_total = schedule.cols();
  const int nx = model.nx();
  const double h = sample_time;

  LpvSimResult result;
  result.states.resize(nx, k_total);
  result.outputs.resize(model.ny(), k_total);

  Eigen::VectorXd x = x0;
  for (Eigen::Index k = 0; k < k_total; ++k) {
    const Eigen::MatrixXd m = model.eval(schedule.col(k));
    const auto a = m.topLeftCorner(nx, nx);
    const auto b = m.topRightCorner(nx, model.nu());
    const auto c = m.bottomLeftCorner(model.ny(), nx);
    const auto d = m.bottomRightCorner(model.ny(), model.nu());
    const Eigen::VectorXd u = input.col(k);

    result.states.col(k) = x;
    result.outputs.col(k) = c * x + d * u;

    if (k + 1 < k_total) {
      const Eigen::VectorXd bu = b * u;
      const Eigen::VectorXd k1 = a * x + bu;
      const Eigen::VectorXd k2 = a * (x + 0.5 * h * k1) + bu;
      const Eigen::VectorXd k3 = a * (x + 0.5 * h * k2) + bu;
      const Eigen::VectorXd k4 = a * (x + h * k3) + bu;
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (!x.allFinite()) throw_blowup((k + 1) * h);
    }
  }
  return result;
}

}  // namespace lpvsdr
