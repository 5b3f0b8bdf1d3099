#include "cascade/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace cascade {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NonPositiveRate: return "NonPositiveRate";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::InvalidInput: return "InvalidInput";
        case ErrorCode::PoleEvaluation: return "PoleEvaluation";
        case ErrorCode::InfiniteGain: return "InfiniteGain";
        case ErrorCode::UnstableFeedback: return "UnstableFeedback";
        case ErrorCode::UnboundedNorm: return "UnboundedNorm";
        case ErrorCode::PureIntegrator: return "PureIntegrator";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::DegenerateSignal: return "DegenerateSignal";
        case ErrorCode::StepTooLarge: return "StepTooLarge";
        case ErrorCode::TailNotDecayed: return "TailNotDecayed";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

namespace {

void require_positive(const std::vector<double>& values, const char* field) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(std::isfinite(values[i]) && values[i] > 0.0)) {
            throw Error(ErrorCode::NonPositiveRate,
                        std::string(field) + "[" + std::to_string(i + 1) + "] must be positive",
                        field, i + 1);
        }
    }
}

void require_nonnegative(double value, const char* field) {
    if (!(std::isfinite(value) && value >= 0.0)) {
        throw Error(ErrorCode::NonPositiveRate, std::string(field) + " must be nonnegative", field);
    }
}

void require_input(bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::InvalidInput, what);
}

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

void validate(const Cascade& c) {
    if (c.n == 0) throw Error(ErrorCode::LengthMismatch, "cascade needs at least one stage", "n");
    if (c.alpha.size() != c.n) {
        throw Error(ErrorCode::LengthMismatch,
                    "expected " + std::to_string(c.n) + " alphas, got " + std::to_string(c.alpha.size()),
                    "alpha");
    }
    if (c.beta.size() != c.n) {
        throw Error(ErrorCode::LengthMismatch,
                    "expected " + std::to_string(c.n) + " betas, got " + std::to_string(c.beta.size()),
                    "beta");
    }
    require_positive(c.alpha, "alpha");
    require_positive(c.beta, "beta");
    require_nonnegative(c.leak, "leak");
    require_nonnegative(c.feedback, "feedback");
}

Cascade Cascade::make(std::size_t n, std::vector<double> alpha, std::vector<double> beta, double leak,
                      double feedback) {
    Cascade c{n, std::move(alpha), std::move(beta), leak, feedback};
    validate(c);
    return c;
}

Cascade Cascade::uniform(std::size_t n, double alpha, double beta, double leak, double feedback) {
    return make(n, std::vector<double>(n, alpha), std::vector<double>(n, beta), leak, feedback);
}

void validate(const InputSignal& r) {
    std::visit(
        [](const auto& in) {
            using T = std::decay_t<decltype(in)>;
            if constexpr (std::is_same_v<T, DecayingExp> || std::is_same_v<T, Peak>) {
                require_input(positive(in.r0) && positive(in.lambda), "r0 and lambda must be positive");
            } else if constexpr (std::is_same_v<T, Rect>) {
                require_input(positive(in.r0) && positive(in.t0), "r0 and t0 must be positive");
            } else if constexpr (std::is_same_v<T, Sinc>) {
                require_input(positive(in.eps), "sinc eps must be positive");
            } else if constexpr (std::is_same_v<T, Sampled>) {
                require_input(in.times.size() == in.values.size(), "times and values differ in length");
                require_input(in.times.size() >= 2, "sampled input needs at least two points");
                for (std::size_t k = 0; k < in.times.size(); ++k) {
                    require_input(std::isfinite(in.times[k]) && std::isfinite(in.values[k]),
                                  "sampled input must be finite");
                    if (k > 0) require_input(in.times[k] > in.times[k - 1], "times must be strictly ascending");
                }
                require_input(in.times.front() >= 0.0, "sampled times must be nonnegative");
            }
        },
        r);
}

double input_value(const InputSignal& r, double t) {
    if (t < 0.0) return 0.0;
    return std::visit(
        [t](const auto& in) -> double {
            using T = std::decay_t<decltype(in)>;
            if constexpr (std::is_same_v<T, Impulse>) {
                return 0.0;
            } else if constexpr (std::is_same_v<T, DecayingExp>) {
                return in.r0 * std::exp(-in.lambda * t);
            } else if constexpr (std::is_same_v<T, Peak>) {
                return in.r0 * t * std::exp(-in.lambda * t);
            } else if constexpr (std::is_same_v<T, Rect>) {
                return t <= in.t0 ? in.r0 : 0.0;
            } else if constexpr (std::is_same_v<T, Sinc>) {
                const double r = std::sqrt(std::numbers::pi / in.eps);
                const double x = in.eps * t;
                // sin(x)/x -> 1 near the origin
                const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
                return 2.0 * r * in.eps / std::numbers::pi * sinc;
            } else {
                const auto& ts = in.times;
                if (t < ts.front() || t > ts.back()) return 0.0;
                auto it = std::upper_bound(ts.begin(), ts.end(), t);
                if (it == ts.end()) return in.values.back();
                const std::size_t hi = static_cast<std::size_t>(it - ts.begin());
                const std::size_t lo = hi - 1;
                const double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
                return in.values[lo] + w * (in.values[hi] - in.values[lo]);
            }
        },
        r);
}

namespace {

using cplx = std::complex<double>;

// (1 - e^{-z}) / z, accurate near z = 0.
cplx one_minus_exp_over(cplx z) {
    if (std::abs(z) < 1e-4) return 1.0 - z / 2.0 + z * z / 6.0 - z * z * z / 24.0;
    return (1.0 - std::exp(-z)) / z;
}

// (1 - (1 + z) e^{-z}) / z^2, accurate near z = 0.
cplx ramp_kernel(cplx z) {
    if (std::abs(z) < 1e-3) return 0.5 - z / 3.0 + z * z / 8.0 - z * z * z / 30.0;
    return (1.0 - (1.0 + z) * std::exp(-z)) / (z * z);
}

// Exact transform of the piecewise-linear interpolant.
cplx sampled_laplace(const Sampled& in, cplx s) {
    cplx total = 0.0;
    for (std::size_t k = 0; k + 1 < in.times.size(); ++k) {
        const double h = in.times[k + 1] - in.times[k];
        const double v0 = in.values[k];
        const double slope = (in.values[k + 1] - v0) / h;
        const cplx z = s * h;
        // int_0^h (v0 + slope u) e^{-s u} du
        const cplx seg = v0 * h * one_minus_exp_over(z) + slope * h * h * ramp_kernel(z);
        total += std::exp(-s * in.times[k]) * seg;
    }
    return total;
}

}  // namespace

cplx input_laplace(const InputSignal& r, cplx s) {
    return std::visit(
        [s](const auto& in) -> cplx {
            using T = std::decay_t<decltype(in)>;
            if constexpr (std::is_same_v<T, Impulse>) {
                return 1.0;
            } else if constexpr (std::is_same_v<T, DecayingExp>) {
                return in.r0 / (s + in.lambda);
            } else if constexpr (std::is_same_v<T, Peak>) {
                return in.r0 / ((s + in.lambda) * (s + in.lambda));
            } else if constexpr (std::is_same_v<T, Rect>) {
                return in.r0 * in.t0 * one_minus_exp_over(s * in.t0);
            } else if constexpr (std::is_same_v<T, Sinc>) {
                const double r = std::sqrt(std::numbers::pi / in.eps);
                const double x = s.real() / in.eps;
                if (s.imag() == 0.0) {
                    return 2.0 * r / std::numbers::pi * (std::numbers::pi / 2.0 - std::atan(x));
                }
                if (s.real() == 0.0) {
                    // Boundary value on the imaginary axis (limit from Re s > 0).
                    const double w = std::abs(s.imag() / in.eps);
                    const double sign = s.imag() > 0.0 ? 1.0 : -1.0;
                    double re = 0.0;
                    if (w < 1.0) re = std::numbers::pi / 2.0;
                    else if (w == 1.0) re = std::numbers::pi / 4.0;
                    const double im = w == 1.0 ? 0.0 : -0.5 * sign * std::log(std::abs((w + 1.0) / (w - 1.0)));
                    return 2.0 * r / std::numbers::pi * cplx(re, im);
                }
                // arctan(eps/s) is the principal value for Re s > 0.
                return 2.0 * r / std::numbers::pi * std::atan(in.eps / s);
            } else {
                return sampled_laplace(in, s);
            }
        },
        r);
}

double input_time_scale(const InputSignal& r) {
    return std::visit(
        [](const auto& in) -> double {
            using T = std::decay_t<decltype(in)>;
            if constexpr (std::is_same_v<T, Impulse>) return 0.0;
            else if constexpr (std::is_same_v<T, DecayingExp>) return 1.0 / in.lambda;
            else if constexpr (std::is_same_v<T, Peak>) return 2.0 / in.lambda;
            else if constexpr (std::is_same_v<T, Rect>) return in.t0;
            else if constexpr (std::is_same_v<T, Sinc>) return 1.0 / in.eps;
            else return in.times.back();
        },
        r);
}

Trajectory::Trajectory(double dt, std::size_t steps, std::size_t n_states)
    : dt_(dt), steps_(steps), width_(n_states + 1), data_(steps * (n_states + 1), 0.0) {}

std::vector<double> Trajectory::column(Channel ch) const {
    std::vector<double> out(steps_);
    for (std::size_t k = 0; k < steps_; ++k) out[k] = at(k, ch);
    return out;
}

}  // namespace cascade
