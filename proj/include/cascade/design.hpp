#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "cascade/model.hpp"

namespace cascade {

/// f(k) = k^2 [ (1 + 1/k) ln(1 + 1/k) - 1/k ], k >= 1.
/// Location of the jump of the optimal length between k and k + 1.
double f_of_k(double k);

/// Optimal integer length for the cost ln n + M / n.
std::size_t psi(double m);

/// Equal off-rate that gives internal gain k_gain for n stages.
double optimal_beta(std::size_t n, double alpha_product, double k_gain, double leak);

struct FixedAlpha {
    double alpha;
};
struct FixedProduct {
    double alpha_product;
};
using DesignConstraint = std::variant<FixedAlpha, FixedProduct>;

/// Length and off-rate that minimise sigma0 (equivalently maximise the
/// amplitude) among cascades of internal gain k_gain.
DesignResult optimal_design(const DesignConstraint& constraint, double k_gain, double leak);

/// Same problem with positive feedback eps from X_n to X_1. The on-rates
/// enter through (alpha_1 + eps K leak) alpha_2...alpha_n; eps = 0 reduces to
/// optimal_design(FixedProduct{alpha_1...alpha_n}).
DesignResult feedback_design(std::span<const double> alphas, double eps, double k_gain, double leak);

// Brute-force oracles. Independent of the closed forms above.

struct Sigma0Search {
    std::vector<double> best_betas;
    double best_sigma0 = 0.0;
};

/// Random search over beta_1...beta_n = alpha_product / (k_gain leak): the
/// first n-1 log-rates are drawn uniformly in [-3, 3] around the symmetric
/// point and the last one is solved from the constraint.
Sigma0Search oracle_min_sigma0(std::size_t n, double alpha_product, double k_gain, double leak,
                               std::size_t trials, std::uint64_t seed = 0);

/// argmin over n in 1..n_max of ln n + m / n, ties toward the smaller n.
std::size_t oracle_nstar(double m, std::size_t n_max);

}  // namespace cascade
