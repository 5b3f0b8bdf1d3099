#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "cascade/model.hpp"

namespace cascade {

/// G(s) = numerator_gain / [ (s + leak) * ( prod_i (s + beta_i) - feedback_term ) ].
/// pole_offsets holds (beta_1, ..., beta_n, leak).
struct TransferFunction {
    double numerator_gain = 0.0;
    std::vector<double> pole_offsets;
    double feedback_term = 0.0;
};

TransferFunction build_transfer(const Cascade& c);

/// Throws PoleEvaluation when s sits on (or numerically at) a pole.
std::complex<double> eval_transfer(const TransferFunction& tf, std::complex<double> s);

/// Internal gain sup_w |G(jw)|, attained at w = 0.
/// Throws InfiniteGain for leak = 0 and UnstableFeedback when
/// beta_1...beta_n <= feedback * alpha_2...alpha_n.
double hinf_norm(const Cascade& c);

/// Gain from R to X_n: alpha_1...alpha_n / (beta_1...beta_n - feedback_term).
/// The meaningful strength estimate when leak = 0.
double truncated_gain(const Cascade& c);

/// alpha_1...alpha_n > beta_1...beta_n - feedback_term (strict).
bool amplifies(const Cascade& c);

struct FrequencyPoint {
    double omega;
    double magnitude;
};

/// |G(jw)| at w = 0 followed by count-1 log-spaced points in [omega_max*1e-6, omega_max].
std::vector<FrequencyPoint> frequency_sweep(const Cascade& c, double omega_max, std::size_t count);

namespace detail {

// Logs of the products used everywhere; kept in log space so long cascades
// neither overflow nor underflow.
double log_product(const std::vector<double>& v, std::size_t first = 0);

// log(beta_1...beta_n - feedback * alpha_2...alpha_n); throws UnstableFeedback.
double log_stable_denominator(const Cascade& c);

}  // namespace detail

}  // namespace cascade
