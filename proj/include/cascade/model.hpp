#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "cascade/error.hpp"

namespace cascade {

/// Parameters of a weakly activated cascade of n kinase stages followed by a
/// leaky-integrator output stage.
///
/// Stage i obeys dX_i/dt = alpha_i X_{i-1} - beta_i X_i (X_0 = R), the output
/// stage dX_{n+1}/dt = X_n - leak X_{n+1}, and `feedback` adds feedback * X_n
/// to the first stage. Rates are in consistent 1/time units.
struct Cascade {
    std::size_t n = 0;
    std::vector<double> alpha;
    std::vector<double> beta;
    double leak = 0.0;
    double feedback = 0.0;

    /// Validating constructor; throws exactly when validate() would.
    static Cascade make(std::size_t n, std::vector<double> alpha, std::vector<double> beta,
                        double leak, double feedback = 0.0);

    /// n identical stages.
    static Cascade uniform(std::size_t n, double alpha, double beta, double leak,
                           double feedback = 0.0);

    friend bool operator==(const Cascade&, const Cascade&) = default;
};

/// Throws Error{NonPositiveRate | LengthMismatch} when an invariant is broken.
/// Stability of a feedback cascade is not checked here.
void validate(const Cascade& c);

// Input families.
struct Impulse {};
struct DecayingExp {
    double r0;
    double lambda;
};
struct Peak {
    double r0;
    double lambda;
};
struct Rect {
    double r0;
    double t0;
};
/// R(t) = 2 r/(pi t) sin(eps t) with r = sqrt(pi/eps).
struct Sinc {
    double eps;
};
/// Piecewise-linear input through the given samples, zero outside them.
struct Sampled {
    std::vector<double> times;
    std::vector<double> values;
};

using InputSignal = std::variant<Impulse, DecayingExp, Peak, Rect, Sinc, Sampled>;

void validate(const InputSignal& r);

/// R(t) for t >= 0. Impulse evaluates to 0 everywhere (its mass sits at t = 0).
double input_value(const InputSignal& r, double t);

/// Laplace transform R^(s). For Sinc the analytic continuation
/// (2r/pi)(pi/2 - atan(s/eps)) is used, so real s < 0 is valid too.
std::complex<double> input_laplace(const InputSignal& r, std::complex<double> s);

/// Upper time scale beyond which the input is negligible (used for grids).
double input_time_scale(const InputSignal& r);

struct InputMoments {
    double norm2 = 0.0;        ///< exact ||R||_2
    double norm2_paper = 0.0;  ///< tabulated convention (see README)
    double m1 = 0.0;           ///< d ln R^/ds at 0
    double q = 0.0;            ///< d^2 ln R^/ds^2 at 0
};

struct SignalMetrics {
    double gain = 0.0;
    double tau = 0.0;
    double sigma = 0.0;
    double amplitude = 0.0;
    double sigma0 = 0.0;
};

enum class DesignMode { FixedAlpha, FixedProduct };

struct DesignResult {
    std::size_t n_star = 0;
    double beta_star = 0.0;
    double sigma0_star = 0.0;
    double m_value = 0.0;
    DesignMode mode = DesignMode::FixedAlpha;
};

/// Column selector for trajectories: 0 is the input R, i in 1..n+1 is X_i.
struct Channel {
    std::size_t column = 0;

    static constexpr Channel input() { return Channel{0}; }
    static constexpr Channel state(std::size_t i) { return Channel{i}; }
};

/// Uniformly sampled simulation output. times[k] = k * dt.
class Trajectory {
public:
    Trajectory(double dt, std::size_t steps, std::size_t n_states);

    double dt() const noexcept { return dt_; }
    std::size_t steps() const noexcept { return steps_; }
    std::size_t n_states() const noexcept { return width_ - 1; }

    double time(std::size_t k) const noexcept { return static_cast<double>(k) * dt_; }
    double input(std::size_t k) const noexcept { return data_[k * width_]; }
    double state(std::size_t k, std::size_t i) const noexcept { return data_[k * width_ + i]; }
    double at(std::size_t k, Channel ch) const noexcept { return data_[k * width_ + ch.column]; }

    /// Row k as (R, X_1, ..., X_{n+1}).
    std::span<const double> row(std::size_t k) const noexcept {
        return {data_.data() + k * width_, width_};
    }
    std::span<double> row(std::size_t k) noexcept { return {data_.data() + k * width_, width_}; }

    std::vector<double> column(Channel ch) const;

private:
    double dt_;
    std::size_t steps_;
    std::size_t width_;
    std::vector<double> data_;
};

}  // namespace cascade
