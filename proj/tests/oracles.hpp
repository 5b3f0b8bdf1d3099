#pragma once

// Reference computations used by the tests. None of these call into the
// library's analytic code paths.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "cascade/model.hpp"

namespace oracle {

using cplx = std::complex<double>;

// C (sI - A)^{-1} B for the state-space form, assembled directly from the rates.
inline cplx state_space_transfer(const cascade::Cascade& c, cplx s) {
    const auto dim = static_cast<Eigen::Index>(c.n + 1);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const double rate = i < dim - 1 ? c.beta[static_cast<std::size_t>(i)] : c.leak;
        m(i, i) = s + rate;
        if (i > 0) m(i, i - 1) = -(i < dim - 1 ? c.alpha[static_cast<std::size_t>(i)] : 1.0);
    }
    m(0, dim - 2) -= c.feedback;
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(dim);
    b(0) = c.alpha[0];
    const Eigen::VectorXcd x = m.partialPivLu().solve(b);
    return x(dim - 1);
}

// Closed-form Laplace transforms of the finite-norm families.
inline cplx laplace_exp(double r0, double lambda, cplx s) { return r0 / (s + lambda); }
inline cplx laplace_peak(double r0, double lambda, cplx s) { return r0 / ((s + lambda) * (s + lambda)); }
inline cplx laplace_rect(double r0, double t0, cplx s) {
    if (s.imag() == 0.0) {
        const double x = s.real();
        return x == 0.0 ? r0 * t0 : -r0 * std::expm1(-x * t0) / x;
    }
    return r0 * (1.0 - std::exp(-s * t0)) / s;
}
// For real s > -eps: (2 r / pi) (pi/2 - atan(s / eps)), r = sqrt(pi / eps).
inline double laplace_sinc_real(double eps, double s) {
    const double r = std::sqrt(M_PI / eps);
    return 2.0 * r / M_PI * (M_PI / 2.0 - std::atan(s / eps));
}

struct LogMoments {
    double tau;     // -d ln F / ds at 0
    double sigma2;  //  d^2 ln F / ds^2 at 0
};

// Five-point central differences of ln F along the real axis.
inline LogMoments log_moments(const std::function<double(double)>& f, double h) {
    const double lm2 = std::log(f(-2 * h)), lm1 = std::log(f(-h)), l0 = std::log(f(0.0));
    const double lp1 = std::log(f(h)), lp2 = std::log(f(2 * h));
    const double d1 = (lm2 - 8 * lm1 + 8 * lp1 - lp2) / (12 * h);
    const double d2 = (-lm2 + 16 * lm1 - 30 * l0 + 16 * lp1 - lp2) / (12 * h * h);
    return {-d1, d2};
}

// Trapezoid quadrature on a uniform grid.
inline double trapezoid(const std::vector<double>& y, double dt) {
    if (y.size() < 2) return 0.0;
    double s = 0.5 * (y.front() + y.back());
    for (std::size_t i = 1; i + 1 < y.size(); ++i) s += y[i];
    return s * dt;
}

// Minimiser of n (K l / aP)^{2/n} over n = 1..n_max by exhaustive search.
inline std::size_t brute_force_length(double alpha_product, double k_gain, double leak, std::size_t n_max = 60) {
    const double ratio = k_gain * leak / alpha_product;
    std::size_t best = 1;
    double best_val = INFINITY;
    for (std::size_t n = 1; n <= n_max; ++n) {
        const double v = static_cast<double>(n) * std::pow(ratio, 2.0 / static_cast<double>(n));
        if (v < best_val * (1 - 1e-13)) {
            best_val = v;
            best = n;
        }
    }
    return best;
}

// High-precision f(k) for property checks.
inline long double f_reference(long double k) {
    const long double x = 1.0L / k;
    if (x < 1e-3L) {
        // k^2 [ (1+x) ln(1+x) - x ] = sum_{j>=2} (-1)^j x^{j-2} / (j (j-1))
        long double sum = 0.0L, p = 1.0L;
        for (int j = 2; j < 30; ++j) {
            sum += ((j % 2 == 0) ? 1.0L : -1.0L) * p / (static_cast<long double>(j) * (j - 1));
            p *= x;
        }
        return sum;
    }
    return k * k * ((1.0L + x) * std::log1p(x) - x);
}

// Deterministic generator of random test instances.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
    std::size_t index(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
    }
    std::uint64_t bits() { return rng_(); }

    cascade::Cascade cascade(std::size_t n_max, double rate_lo = 0.3, double rate_hi = 3.0) {
        const std::size_t n = index(1, n_max);
        std::vector<double> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = log_uniform(rate_lo, rate_hi);
            b[i] = log_uniform(rate_lo, rate_hi);
        }
        return cascade::Cascade::make(n, a, b, log_uniform(rate_lo, rate_hi), 0.0);
    }

    // Cascade with feedback at a random fraction of the stability bound.
    cascade::Cascade feedback_cascade(std::size_t n_max, double max_fraction = 0.9) {
        cascade::Cascade c = cascade(n_max);
        double bound = 1.0;
        for (double b : c.beta) bound *= b;
        for (std::size_t i = 1; i < c.n; ++i) bound /= c.alpha[i];
        c.feedback = uniform(0.05, max_fraction) * bound;
        return c;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

}  // namespace oracle
