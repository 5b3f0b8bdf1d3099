#pragma once

#include <span>

#include "cascade/model.hpp"

namespace cascade {

/// Classic RK4 on the linear cascade (feedback included), starting at rest.
/// An Impulse input is realised as the exact jump X_1(0+) = alpha_1.
/// Requires dt <= 0.1 / max(beta_i, leak, 1), otherwise StepTooLarge.
Trajectory simulate_linear(const Cascade& c, const InputSignal& r, double t_end, double dt);

/// Saturating kinetics dX_i/dt = alpha_i X_{i-1} (1 - X_i / xtot_i) - beta_i X_i.
/// The output stage is unchanged.
Trajectory simulate_nonlinear(const Cascade& c, std::span<const double> xtot, const InputSignal& r,
                              double t_end, double dt);

/// Transmission delays: delays[0] delays R into stage 1 and delays[k] delays
/// X_k into stage k+1 (k = 1..n, the last one feeding the output stage).
/// History is zero before t = 0 and read back by linear interpolation.
/// Requires feedback = 0 and dt <= (smallest positive delay) / 10.
Trajectory simulate_delayed(const Cascade& c, std::span<const double> delays, const InputSignal& r,
                            double t_end, double dt);

/// sqrt(int |x|^2 dt), composite trapezoid. Throws TailNotDecayed when the
/// last sample exceeds 1e-6 of the peak magnitude.
double norm2_time(const Trajectory& traj, Channel which);

struct EmpiricalMoments {
    double tau = 0.0;
    double sigma = 0.0;
};

/// tau = int t Y / int Y and sigma^2 = int t^2 Y / int Y - tau^2.
EmpiricalMoments empirical_moments(const Trajectory& traj, Channel which);

/// sqrt( (1/2pi) int |G(jw) R^(jw)|^2 dw ) over [-omega_max, omega_max].
/// omega_max <= 0 picks 100 * max(beta_i, leak, input frequency scale).
/// An Impulse input yields the 2-norm of the impulse response.
double freq_norm2(const Cascade& c, const InputSignal& r, double omega_max = 0.0);

/// Step size and horizon that satisfy the integrators' preconditions and let
/// the response decay below the tail threshold.
double suggest_dt(const Cascade& c);
double suggest_t_end(const Cascade& c, const InputSignal& r);

}  // namespace cascade
