#pragma once

#include <cstddef>

#include "cascade/model.hpp"

namespace cascade {

enum class NormConvention { Exact, PaperFigure };

/// Log-derivatives of R^ at s = 0 together with both norm conventions.
/// Throws UnboundedNorm for Impulse.
InputMoments input_moments(const InputSignal& r);

/// ||R||_2 under the requested convention. Throws UnboundedNorm for Impulse.
double input_norm(const InputSignal& r, NormConvention convention);

/// (m1, q) only; defined for every family including Impulse.
struct LogDerivatives {
    double m1 = 0.0;
    double q = 0.0;
};
LogDerivatives input_log_derivatives(const InputSignal& r);

/// tau = -d ln Y^/ds at 0.
double signaling_time(const Cascade& c, const InputSignal& r);

/// sigma = sqrt(d^2 ln Y^/ds^2 at 0). Throws DegenerateSignal when that is <= 0.
double signal_duration(const Cascade& c, const InputSignal& r);

/// K * ||R||_2 / sigma.
double signal_amplitude(const Cascade& c, const InputSignal& r, NormConvention convention);

struct StepMetrics {
    double tau = 0.0;
    double sigma = 0.0;
};

/// Signaling time and duration at stage i (1-based) of a cascade without feedback.
StepMetrics step_metrics(const Cascade& c, const InputSignal& r, std::size_t i);

/// sum_i 1/beta_i^2
double sigma0(const Cascade& c);

/// Everything at once; amplitude is left at 0 when `with_amplitude` is false.
SignalMetrics compute_metrics(const Cascade& c, const InputSignal& r, NormConvention convention,
                              bool with_amplitude = true);

}  // namespace cascade
