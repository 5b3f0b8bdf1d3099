#include "cascade/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace cascade {

namespace {

void require_positive(double value, const char* name) {
    if (!(std::isfinite(value) && value > 0.0)) {
        throw Error(ErrorCode::DomainError, std::string(name) + " must be positive", name);
    }
}

double log_alpha_product(std::span<const double> alphas, std::size_t first) {
    double acc = 0.0;
    for (std::size_t i = first; i < alphas.size(); ++i) acc += std::log(alphas[i]);
    return acc;
}

// Equal-beta optimum for a fixed effective on-rate product:
// sigma0(n) = n (K leak / alpha_P)^{2/n} = n exp(M / n).
DesignResult product_design(double log_alpha_product, double k_gain, double leak) {
    const double log_ratio = std::log(k_gain) + std::log(leak) - log_alpha_product;
    DesignResult out;
    out.mode = DesignMode::FixedProduct;
    out.m_value = 2.0 * log_ratio;
    out.n_star = psi(out.m_value);
    const double n = static_cast<double>(out.n_star);
    out.beta_star = std::exp(-log_ratio / n);
    out.sigma0_star = n * std::exp(out.m_value / n);
    return out;
}

}  // namespace

double f_of_k(double k) {
    if (!(k >= 1.0)) throw Error(ErrorCode::DomainError, "f(k) is defined for k >= 1", "k");
    if (std::isinf(k)) return 0.5;
    const double x = 1.0 / k;
    if (x < 1e-2) {
        // (1+x)ln(1+x) - x = sum_{m>=2} (-1)^m x^m / (m (m-1))
        double term = 1.0, acc = 0.0;
        for (int m = 2; m < 14; ++m) {
            acc += ((m % 2 == 0) ? 1.0 : -1.0) * term / (m * (m - 1.0));
            term *= x;
        }
        return acc;
    }
    return ((1.0 + x) * std::log1p(x) - x) / (x * x);
}

std::size_t psi(double m) {
    if (std::isnan(m)) throw Error(ErrorCode::DomainError, "psi of NaN", "m");
    if (m <= 1.0) return 1;
    if (m > 1e15) throw Error(ErrorCode::DomainError, "psi argument too large", "m");
    const double whole = std::floor(m);
    const double frac = m - whole;
    const auto k = static_cast<std::size_t>(whole);
    // A tie (frac == f(k) up to the rounding of m itself) keeps the shorter cascade.
    const double slack = 4.0 * std::numeric_limits<double>::epsilon() * m;
    return frac <= f_of_k(whole) + slack ? k : k + 1;
}

double optimal_beta(std::size_t n, double alpha_product, double k_gain, double leak) {
    if (n == 0) throw Error(ErrorCode::DomainError, "cascade length must be positive", "n");
    require_positive(alpha_product, "alpha_product");
    require_positive(k_gain, "k_gain");
    require_positive(leak, "leak");
    return std::exp((std::log(alpha_product) - std::log(k_gain) - std::log(leak)) / static_cast<double>(n));
}

DesignResult optimal_design(const DesignConstraint& constraint, double k_gain, double leak) {
    require_positive(k_gain, "k_gain");
    require_positive(leak, "leak");
    if (const auto* fa = std::get_if<FixedAlpha>(&constraint)) {
        require_positive(fa->alpha, "alpha");
        const double log_kl = std::log(k_gain) + std::log(leak);
        DesignResult out;
        out.mode = DesignMode::FixedAlpha;
        out.m_value = 2.0 * log_kl;
        out.n_star = psi(out.m_value);
        const double n = static_cast<double>(out.n_star);
        out.beta_star = fa->alpha * std::exp(-log_kl / n);
        out.sigma0_star = n / (fa->alpha * fa->alpha) * std::exp(2.0 * log_kl / n);
        return out;
    }
    const auto& fp = std::get<FixedProduct>(constraint);
    require_positive(fp.alpha_product, "alpha_product");
    return product_design(std::log(fp.alpha_product), k_gain, leak);
}

DesignResult feedback_design(std::span<const double> alphas, double eps, double k_gain, double leak) {
    if (alphas.empty()) throw Error(ErrorCode::DomainError, "need at least one on-rate", "alpha");
    for (double a : alphas) require_positive(a, "alpha");
    require_positive(k_gain, "k_gain");
    require_positive(leak, "leak");
    if (!(std::isfinite(eps) && eps >= 0.0)) {
        throw Error(ErrorCode::DomainError, "feedback must be nonnegative", "feedback");
    }
    const double boosted_first = alphas[0] + eps * k_gain * leak;
    return product_design(std::log(boosted_first) + log_alpha_product(alphas, 1), k_gain, leak);
}

Sigma0Search oracle_min_sigma0(std::size_t n, double alpha_product, double k_gain, double leak,
                               std::size_t trials, std::uint64_t seed) {
    if (n == 0) throw Error(ErrorCode::DomainError, "cascade length must be positive", "n");
    require_positive(alpha_product, "alpha_product");
    require_positive(k_gain, "k_gain");
    require_positive(leak, "leak");

    const double log_total = std::log(alpha_product) - std::log(k_gain) - std::log(leak);
    const double centre = log_total / static_cast<double>(n);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> offset(-3.0, 3.0);

    Sigma0Search best;
    best.best_sigma0 = std::numeric_limits<double>::infinity();
    std::vector<double> logs(n);
    const std::size_t rounds = n == 1 ? 1 : std::max<std::size_t>(trials, 1);
    for (std::size_t t = 0; t < rounds; ++t) {
        double used = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            logs[i] = centre + offset(rng);
            used += logs[i];
        }
        logs[n - 1] = log_total - used;
        double s0 = 0.0;
        for (double lb : logs) s0 += std::exp(-2.0 * lb);
        if (s0 < best.best_sigma0) {
            best.best_sigma0 = s0;
            best.best_betas.assign(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) best.best_betas[i] = std::exp(logs[i]);
        }
    }
    return best;
}

std::size_t oracle_nstar(double m, std::size_t n_max) {
    if (n_max == 0) throw Error(ErrorCode::DomainError, "n_max must be positive", "n_max");
    std::size_t best = 1;
    double best_cost = m;  // ln 1 + m / 1
    for (std::size_t n = 2; n <= n_max; ++n) {
        const double nd = static_cast<double>(n);
        const double cost = std::log(nd) + m / nd;
        // Only a strict improvement beyond roundoff moves to the larger n.
        if (cost < best_cost - 1e-13 * (1.0 + std::abs(best_cost))) {
            best = n;
            best_cost = cost;
        }
    }
    return best;
}

}  // namespace cascade
