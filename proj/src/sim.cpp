#include "cascade/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "cascade/stability.hpp"
#include "cascade/xfer.hpp"

namespace cascade {

namespace {

constexpr double kTailFraction = 1e-6;

void check_run(const Cascade& c, const InputSignal& r, double t_end, double dt) {
    validate(c);
    validate(r);
    if (!(t_end > 0.0) || !(dt > 0.0) || !std::isfinite(t_end)) {
        throw Error(ErrorCode::InvalidInput, "t_end and dt must be positive");
    }
    double fastest = std::max(c.leak, 1.0);
    for (double b : c.beta) fastest = std::max(fastest, b);
    if (dt > 0.1 / fastest) {
        throw Error(ErrorCode::StepTooLarge,
                    "dt must not exceed 0.1 / max(beta_i, leak, 1) = " + std::to_string(0.1 / fastest));
    }
}

std::size_t step_count(double t_end, double dt) {
    return static_cast<std::size_t>(std::floor(t_end / dt + 1e-9)) + 1;
}

// Fixed-step RK4 driver. `rhs(t, x, dx)` writes the time derivative; `after(k, x)`
// may modify the state once row k has been reached (used for impulse jumps).
template <class Rhs, class After>
Trajectory integrate(const Cascade& c, const InputSignal& r, double t_end, double dt, Rhs&& rhs,
                     After&& after) {
    const std::size_t n_states = c.n + 1;
    const std::size_t steps = step_count(t_end, dt);
    Trajectory traj(dt, steps, n_states);

    std::vector<double> x(n_states, 0.0), k1(n_states), k2(n_states), k3(n_states), k4(n_states),
        tmp(n_states);
    after(0, x);
    auto store = [&](std::size_t k) {
        auto row = traj.row(k);
        row[0] = input_value(r, traj.time(k));
        std::copy(x.begin(), x.end(), row.begin() + 1);
    };
    store(0);

    for (std::size_t k = 1; k < steps; ++k) {
        const double t = traj.time(k - 1);
        rhs(t, x, k1);
        for (std::size_t i = 0; i < n_states; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
        rhs(t + 0.5 * dt, tmp, k2);
        for (std::size_t i = 0; i < n_states; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
        rhs(t + 0.5 * dt, tmp, k3);
        for (std::size_t i = 0; i < n_states; ++i) tmp[i] = x[i] + dt * k3[i];
        rhs(t + dt, tmp, k4);
        for (std::size_t i = 0; i < n_states; ++i) {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        after(k, x);
        store(k);
    }
    return traj;
}

bool is_impulse(const InputSignal& r) { return std::holds_alternative<Impulse>(r); }

}  // namespace

Trajectory simulate_linear(const Cascade& c, const InputSignal& r, double t_end, double dt) {
    check_run(c, r, t_end, dt);
    const std::size_t n = c.n;
    const bool impulse = is_impulse(r);
    auto rhs = [&](double t, const std::vector<double>& x, std::vector<double>& dx) {
        const double drive = impulse ? 0.0 : input_value(r, t);
        dx[0] = c.alpha[0] * drive + c.feedback * x[n - 1] - c.beta[0] * x[0];
        for (std::size_t i = 1; i < n; ++i) dx[i] = c.alpha[i] * x[i - 1] - c.beta[i] * x[i];
        dx[n] = x[n - 1] - c.leak * x[n];
    };
    auto after = [&](std::size_t k, std::vector<double>& x) {
        if (impulse && k == 0) x[0] = c.alpha[0];
    };
    return integrate(c, r, t_end, dt, rhs, after);
}

Trajectory simulate_nonlinear(const Cascade& c, std::span<const double> xtot, const InputSignal& r,
                              double t_end, double dt) {
    check_run(c, r, t_end, dt);
    if (xtot.size() != c.n) {
        throw Error(ErrorCode::LengthMismatch, "need one total concentration per stage", "xtot");
    }
    for (std::size_t i = 0; i < xtot.size(); ++i) {
        if (!(std::isfinite(xtot[i]) && xtot[i] > 0.0)) {
            throw Error(ErrorCode::NonPositiveRate, "xtot entries must be positive", "xtot", i + 1);
        }
    }
    const std::size_t n = c.n;
    const bool impulse = is_impulse(r);
    auto rhs = [&](double t, const std::vector<double>& x, std::vector<double>& dx) {
        const double drive = impulse ? 0.0 : input_value(r, t);
        const double free1 = 1.0 - x[0] / xtot[0];
        dx[0] = (c.alpha[0] * drive + c.feedback * x[n - 1]) * free1 - c.beta[0] * x[0];
        for (std::size_t i = 1; i < n; ++i) {
            dx[i] = c.alpha[i] * x[i - 1] * (1.0 - x[i] / xtot[i]) - c.beta[i] * x[i];
        }
        dx[n] = x[n - 1] - c.leak * x[n];
    };
    auto after = [&](std::size_t k, std::vector<double>& x) {
        // Integrating a unit pulse through the saturating term exactly.
        if (impulse && k == 0) x[0] = -xtot[0] * std::expm1(-c.alpha[0] / xtot[0]);
    };
    return integrate(c, r, t_end, dt, rhs, after);
}

Trajectory simulate_delayed(const Cascade& c, std::span<const double> delays, const InputSignal& r,
                            double t_end, double dt) {
    check_run(c, r, t_end, dt);
    if (c.feedback != 0.0) {
        throw Error(ErrorCode::InvalidInput, "delayed simulation supports cascades without feedback");
    }
    if (delays.size() != c.n + 1) {
        throw Error(ErrorCode::LengthMismatch, "need n + 1 delays", "delays");
    }
    double smallest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < delays.size(); ++i) {
        if (!(std::isfinite(delays[i]) && delays[i] >= 0.0)) {
            throw Error(ErrorCode::InvalidInput, "delays must be nonnegative", "delays", i + 1);
        }
        if (delays[i] > 0.0) smallest = std::min(smallest, delays[i]);
    }
    if (std::isfinite(smallest) && dt > smallest / 10.0) {
        throw Error(ErrorCode::StepTooLarge, "dt must resolve the smallest delay at least 10 times");
    }

    const std::size_t n = c.n;
    const bool impulse = is_impulse(r);
    // Rows are filled as the integration advances; lookups only reach
    // t - delay <= t_current - 9 dt, which is always stored already.
    std::vector<std::vector<double>> history;
    history.reserve(step_count(t_end, dt));

    auto past = [&](std::size_t state, double when) -> double {
        if (when <= 0.0) return when == 0.0 && !history.empty() ? history[0][state] : 0.0;
        const double pos = when / dt;
        const auto lo = static_cast<std::size_t>(pos);
        if (lo + 1 >= history.size()) return history.back()[state];
        const double w = pos - static_cast<double>(lo);
        return (1.0 - w) * history[lo][state] + w * history[lo + 1][state];
    };
    auto upstream = [&](std::size_t link, double t, const std::vector<double>& x) -> double {
        // link k feeds stage k+1 from X_k (k >= 1)
        if (delays[link] == 0.0) return x[link - 1];
        return past(link - 1, t - delays[link]);
    };
    auto rhs = [&](double t, const std::vector<double>& x, std::vector<double>& dx) {
        const double drive = impulse ? 0.0 : input_value(r, t - delays[0]);
        dx[0] = c.alpha[0] * drive - c.beta[0] * x[0];
        for (std::size_t i = 1; i < n; ++i) dx[i] = c.alpha[i] * upstream(i, t, x) - c.beta[i] * x[i];
        dx[n] = upstream(n, t, x) - c.leak * x[n];
    };
    // The impulse arrives at the grid point nearest to delays[0].
    const auto jump_step = static_cast<std::size_t>(std::llround(delays[0] / dt));
    auto after = [&](std::size_t k, std::vector<double>& x) {
        if (impulse && k == jump_step) x[0] += c.alpha[0];
        history.push_back(x);
    };
    return integrate(c, r, t_end, dt, rhs, after);
}

namespace {

double peak_magnitude(const Trajectory& traj, Channel which) {
    double peak = 0.0;
    for (std::size_t k = 0; k < traj.steps(); ++k) peak = std::max(peak, std::abs(traj.at(k, which)));
    return peak;
}

void require_valid_channel(const Trajectory& traj, Channel which) {
    if (which.column > traj.n_states()) {
        throw Error(ErrorCode::IndexOutOfRange, "trajectory has no such channel", "channel", which.column);
    }
}

void require_tail(const Trajectory& traj, Channel which, double peak) {
    const double last = std::abs(traj.at(traj.steps() - 1, which));
    if (last > kTailFraction * peak) {
        throw Error(ErrorCode::TailNotDecayed,
                    "signal has not decayed below 1e-6 of its peak by the end of the run");
    }
}

}  // namespace

double norm2_time(const Trajectory& traj, Channel which) {
    require_valid_channel(traj, which);
    const double peak = peak_magnitude(traj, which);
    if (peak == 0.0) return 0.0;
    require_tail(traj, which, peak);
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < traj.steps(); ++k) {
        const double a = traj.at(k, which), b = traj.at(k + 1, which);
        acc += 0.5 * traj.dt() * (a * a + b * b);
    }
    return std::sqrt(acc);
}

EmpiricalMoments empirical_moments(const Trajectory& traj, Channel which) {
    require_valid_channel(traj, which);
    const double peak = peak_magnitude(traj, which);
    if (peak == 0.0) throw Error(ErrorCode::DegenerateSignal, "signal is identically zero");
    require_tail(traj, which, peak);
    double m0 = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k + 1 < traj.steps(); ++k) {
        const double t0 = traj.time(k), t1 = traj.time(k + 1);
        const double y0 = traj.at(k, which), y1 = traj.at(k + 1, which);
        const double h = 0.5 * traj.dt();
        m0 += h * (y0 + y1);
        m1 += h * (t0 * y0 + t1 * y1);
        m2 += h * (t0 * t0 * y0 + t1 * t1 * y1);
    }
    if (!(m0 > 1e-12 * peak * traj.dt())) {
        throw Error(ErrorCode::DegenerateSignal, "signal integral is not positive");
    }
    const double tau = m1 / m0;
    const double var = m2 / m0 - tau * tau;
    if (!(var > 0.0)) throw Error(ErrorCode::DegenerateSignal, "signal has no spread");
    return {tau, std::sqrt(var)};
}

namespace {

// Frequencies where the integrand changes character, plus an oscillation
// period for inputs with compact support.
struct InputFrequencies {
    std::vector<double> marks;
    double period = 0.0;
};

InputFrequencies input_frequencies(const InputSignal& r) {
    return std::visit(
        [](const auto& in) -> InputFrequencies {
            using T = std::decay_t<decltype(in)>;
            if constexpr (std::is_same_v<T, Impulse>) return {};
            else if constexpr (std::is_same_v<T, DecayingExp> || std::is_same_v<T, Peak>) return {{in.lambda}, 0.0};
            else if constexpr (std::is_same_v<T, Rect>) return {{1.0 / in.t0}, 2.0 * std::numbers::pi / in.t0};
            else if constexpr (std::is_same_v<T, Sinc>) return {{in.eps}, 0.0};
            else {
                const double span = in.times.back();
                double finest = span;
                for (std::size_t k = 0; k + 1 < in.times.size(); ++k) {
                    finest = std::min(finest, in.times[k + 1] - in.times[k]);
                }
                return {{1.0 / span, 1.0 / finest}, 2.0 * std::numbers::pi / span};
            }
        },
        r);
}

}  // namespace

double freq_norm2(const Cascade& c, const InputSignal& r, double omega_max) {
    hinf_norm(c);  // rejects leak = 0 and unstable feedback
    validate(r);
    const TransferFunction tf = build_transfer(c);
    const InputFrequencies inf = input_frequencies(r);

    std::vector<double> marks = c.beta;
    marks.push_back(c.leak);
    marks.insert(marks.end(), inf.marks.begin(), inf.marks.end());
    if (!(omega_max > 0.0)) {
        omega_max = 100.0 * *std::max_element(marks.begin(), marks.end());
    }

    std::vector<double> cuts{0.0, omega_max};
    for (double m : marks) {
        for (double f : {0.25 * m, m, 4.0 * m}) {
            if (f > 0.0 && f < omega_max) cuts.push_back(f);
        }
    }
    if (inf.period > 0.0) {
        // Keep every panel within half an oscillation of the input transform.
        constexpr std::size_t kMaxPanels = 20000;
        const double width = std::max(0.5 * inf.period, omega_max / kMaxPanels);
        for (double w = width; w < omega_max; w += width) cuts.push_back(w);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    auto integrand = [&](double w) {
        const std::complex<double> s{0.0, w};
        return std::norm(eval_transfer(tf, s) * input_laplace(r, s));
    };

    boost::math::quadrature::tanh_sinh<double> quad(12);
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        total += quad.integrate(integrand, cuts[k], cuts[k + 1], 1e-10);
    }
    // |G R^|^2 is even in w, so (1/2pi) int over [-W, W] = (1/pi) int over [0, W].
    return std::sqrt(total / std::numbers::pi);
}

double suggest_dt(const Cascade& c) {
    double fastest = std::max(c.leak, 1.0);
    for (double b : c.beta) fastest = std::max(fastest, b);
    return 0.02 / fastest;
}

double suggest_t_end(const Cascade& c, const InputSignal& r) {
    validate(c);
    double slowest = c.leak > 0.0 ? c.leak : std::numeric_limits<double>::infinity();
    for (double b : c.beta) slowest = std::min(slowest, b);
    if (c.feedback > 0.0) {
        slowest = -max_real_part(eigenvalues(build_system_matrix(c)));
        if (!(slowest > 0.0)) {
            throw Error(ErrorCode::UnstableFeedback, "feedback cascade does not decay");
        }
    }
    const double cascade_span = 40.0 * (1.0 + 0.1 * static_cast<double>(c.n)) / slowest;
    double input_span = input_time_scale(r);
    if (std::holds_alternative<DecayingExp>(r) || std::holds_alternative<Peak>(r)) input_span *= 20.0;
    return cascade_span + input_span;
}

}  // namespace cascade
