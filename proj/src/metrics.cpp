#include "cascade/metrics.hpp"

#include <cmath>
#include <numbers>

#include "cascade/xfer.hpp"

namespace cascade {

namespace {

struct SampledIntegrals {
    double mass = 0.0;   // int R
    double first = 0.0;  // int t R
    double second = 0.0; // int t^2 R
    double energy = 0.0; // int R^2
};

SampledIntegrals trapezoid_integrals(const Sampled& in) {
    SampledIntegrals acc;
    for (std::size_t k = 0; k + 1 < in.times.size(); ++k) {
        const double h = in.times[k + 1] - in.times[k];
        const double t0 = in.times[k], t1 = in.times[k + 1];
        const double r0 = in.values[k], r1 = in.values[k + 1];
        acc.mass += 0.5 * h * (r0 + r1);
        acc.first += 0.5 * h * (t0 * r0 + t1 * r1);
        acc.second += 0.5 * h * (t0 * t0 * r0 + t1 * t1 * r1);
        acc.energy += 0.5 * h * (r0 * r0 + r1 * r1);
    }
    return acc;
}

LogDerivatives sampled_log_derivatives(const Sampled& in) {
    const SampledIntegrals I = trapezoid_integrals(in);
    if (!(I.mass > 1e-300)) {
        throw Error(ErrorCode::DegenerateSignal, "sampled input has nonpositive integral");
    }
    const double mean = I.first / I.mass;
    return {-mean, I.second / I.mass - mean * mean};
}

LogDerivatives sinc_log_derivatives(const Sinc& in) {
    const InputSignal r = in;
    const double h = 1e-4 * in.eps;
    const double up = std::log(std::real(input_laplace(r, h)));
    const double mid = std::log(std::real(input_laplace(r, 0.0)));
    const double down = std::log(std::real(input_laplace(r, -h)));
    return {-2.0 / (std::numbers::pi * in.eps), (up - 2.0 * mid + down) / (h * h)};
}

void require_leak(const Cascade& c) {
    if (c.leak == 0.0) {
        throw Error(ErrorCode::PureIntegrator,
                    "leak = 0: output is a pure integrator; use step_metrics for X_n");
    }
}

// Cascade-only contributions to tau and sigma^2, feedback included.
struct CascadeMoments {
    double time = 0.0;
    double spread = 0.0;
};

CascadeMoments cascade_moments(const Cascade& c) {
    double s1 = 0.0, s2 = 0.0;
    for (double b : c.beta) {
        s1 += 1.0 / b;
        s2 += 1.0 / (b * b);
    }
    if (c.feedback == 0.0) return {s1, s2};
    // rho = feedback * alpha_2...alpha_n / (beta_1...beta_n)
    const double log_b = detail::log_product(c.beta);
    const double rho = 1.0 - std::exp(detail::log_stable_denominator(c) - log_b);
    const double cross = s1 * s1 - s2;  // sum over i != j of 1/(beta_i beta_j)
    const double gap = 1.0 - rho;
    return {s1 / gap, (s2 + rho * cross) / (gap * gap)};
}

}  // namespace

LogDerivatives input_log_derivatives(const InputSignal& r) {
    validate(r);
    return std::visit(
        [](const auto& in) -> LogDerivatives {
            using T = std::decay_t<decltype(in)>;
            if constexpr (std::is_same_v<T, Impulse>) {
                return {0.0, 0.0};
            } else if constexpr (std::is_same_v<T, DecayingExp>) {
                return {-1.0 / in.lambda, 1.0 / (in.lambda * in.lambda)};
            } else if constexpr (std::is_same_v<T, Peak>) {
                return {-2.0 / in.lambda, 2.0 / (in.lambda * in.lambda)};
            } else if constexpr (std::is_same_v<T, Rect>) {
                return {-in.t0 / 2.0, in.t0 * in.t0 / 12.0};
            } else if constexpr (std::is_same_v<T, Sinc>) {
                return sinc_log_derivatives(in);
            } else {
                return sampled_log_derivatives(in);
            }
        },
        r);
}

InputMoments input_moments(const InputSignal& r) {
    const LogDerivatives d = input_log_derivatives(r);
    InputMoments m;
    m.m1 = d.m1;
    m.q = d.q;
    m.norm2 = input_norm(r, NormConvention::Exact);
    m.norm2_paper = input_norm(r, NormConvention::PaperFigure);
    return m;
}

double input_norm(const InputSignal& r, NormConvention convention) {
    validate(r);
    const bool paper = convention == NormConvention::PaperFigure;
    return std::visit(
        [paper](const auto& in) -> double {
            using T = std::decay_t<decltype(in)>;
            if constexpr (std::is_same_v<T, Impulse>) {
                throw Error(ErrorCode::UnboundedNorm, "an impulse has no finite 2-norm");
            } else if constexpr (std::is_same_v<T, DecayingExp>) {
                return paper ? in.r0 / (2.0 * in.lambda) : in.r0 / std::sqrt(2.0 * in.lambda);
            } else if constexpr (std::is_same_v<T, Peak>) {
                return paper ? in.r0 / (4.0 * in.lambda * in.lambda * in.lambda)
                             : in.r0 / (2.0 * std::pow(in.lambda, 1.5));
            } else if constexpr (std::is_same_v<T, Rect>) {
                return in.r0 * std::sqrt(in.t0);
            } else if constexpr (std::is_same_v<T, Sinc>) {
                return paper ? 1.0 : std::numbers::sqrt2;
            } else {
                return std::sqrt(trapezoid_integrals(in).energy);
            }
        },
        r);
}

double signaling_time(const Cascade& c, const InputSignal& r) {
    validate(c);
    require_leak(c);
    const LogDerivatives d = input_log_derivatives(r);
    return 1.0 / c.leak + cascade_moments(c).time - d.m1;
}

double signal_duration(const Cascade& c, const InputSignal& r) {
    validate(c);
    require_leak(c);
    const LogDerivatives d = input_log_derivatives(r);
    const double var = 1.0 / (c.leak * c.leak) + cascade_moments(c).spread + d.q;
    if (!(var > 0.0)) {
        throw Error(ErrorCode::DegenerateSignal, "output has nonpositive second log-derivative");
    }
    return std::sqrt(var);
}

double signal_amplitude(const Cascade& c, const InputSignal& r, NormConvention convention) {
    const double norm = input_norm(r, convention);
    return hinf_norm(c) * norm / signal_duration(c, r);
}

StepMetrics step_metrics(const Cascade& c, const InputSignal& r, std::size_t i) {
    validate(c);
    if (c.feedback != 0.0) {
        throw Error(ErrorCode::InvalidInput, "per-step metrics are defined for cascades without feedback");
    }
    if (i < 1 || i > c.n) {
        throw Error(ErrorCode::IndexOutOfRange,
                    "stage index " + std::to_string(i) + " outside 1.." + std::to_string(c.n), "step", i);
    }
    const LogDerivatives d = input_log_derivatives(r);
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t k = 0; k < i; ++k) {
        s1 += 1.0 / c.beta[k];
        s2 += 1.0 / (c.beta[k] * c.beta[k]);
    }
    const double var = s2 + d.q;
    if (!(var > 0.0)) throw Error(ErrorCode::DegenerateSignal, "stage output has nonpositive spread");
    return {s1 - d.m1, std::sqrt(var)};
}

double sigma0(const Cascade& c) {
    validate(c);
    double acc = 0.0;
    for (double b : c.beta) acc += 1.0 / (b * b);
    return acc;
}

SignalMetrics compute_metrics(const Cascade& c, const InputSignal& r, NormConvention convention,
                              bool with_amplitude) {
    SignalMetrics m;
    m.gain = hinf_norm(c);
    m.tau = signaling_time(c, r);
    m.sigma = signal_duration(c, r);
    m.sigma0 = sigma0(c);
    if (with_amplitude) m.amplitude = m.gain * input_norm(r, convention) / m.sigma;
    return m;
}

}  // namespace cascade
