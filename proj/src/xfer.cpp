#include "cascade/xfer.hpp"

#include <cmath>

namespace cascade {

namespace detail {

double log_product(const std::vector<double>& v, std::size_t first) {
    double acc = 0.0;
    for (std::size_t i = first; i < v.size(); ++i) acc += std::log(v[i]);
    return acc;
}

double log_stable_denominator(const Cascade& c) {
    const double log_b = log_product(c.beta);
    if (c.feedback == 0.0) return log_b;
    const double log_fb = std::log(c.feedback) + log_product(c.alpha, 1);
    const double ratio = std::exp(log_fb - log_b);
    if (!(ratio < 1.0)) {
        throw Error(ErrorCode::UnstableFeedback,
                    "feedback too strong: beta_1...beta_n <= feedback * alpha_2...alpha_n");
    }
    return log_b + std::log1p(-ratio);
}

}  // namespace detail

TransferFunction build_transfer(const Cascade& c) {
    validate(c);
    TransferFunction tf;
    tf.numerator_gain = std::exp(detail::log_product(c.alpha));
    tf.pole_offsets = c.beta;
    tf.pole_offsets.push_back(c.leak);
    tf.feedback_term = c.feedback == 0.0 ? 0.0 : c.feedback * std::exp(detail::log_product(c.alpha, 1));
    return tf;
}

std::complex<double> eval_transfer(const TransferFunction& tf, std::complex<double> s) {
    std::complex<double> stages = 1.0;
    for (std::size_t i = 0; i + 1 < tf.pole_offsets.size(); ++i) stages *= s + tf.pole_offsets[i];
    const std::complex<double> den = (s + tf.pole_offsets.back()) * (stages - tf.feedback_term);
    if (std::abs(den) < 1e-12 * (1.0 + std::abs(tf.numerator_gain))) {
        throw Error(ErrorCode::PoleEvaluation, "transfer function evaluated at a pole");
    }
    return tf.numerator_gain / den;
}

double hinf_norm(const Cascade& c) {
    validate(c);
    if (c.leak == 0.0) {
        throw Error(ErrorCode::InfiniteGain,
                    "internal gain is infinite for leak = 0; use the truncated gain of X_n instead");
    }
    return std::exp(detail::log_product(c.alpha) - std::log(c.leak) - detail::log_stable_denominator(c));
}

double truncated_gain(const Cascade& c) {
    validate(c);
    return std::exp(detail::log_product(c.alpha) - detail::log_stable_denominator(c));
}

bool amplifies(const Cascade& c) {
    validate(c);
    return detail::log_product(c.alpha) > detail::log_stable_denominator(c);
}

std::vector<FrequencyPoint> frequency_sweep(const Cascade& c, double omega_max, std::size_t count) {
    if (!(omega_max > 0.0) || count == 0) {
        throw Error(ErrorCode::InvalidInput, "frequency sweep needs omega_max > 0 and count >= 1");
    }
    detail::log_stable_denominator(c);
    const TransferFunction tf = build_transfer(c);
    std::vector<FrequencyPoint> out;
    out.reserve(count);
    out.push_back({0.0, std::abs(eval_transfer(tf, 0.0))});
    if (count == 1) return out;
    const double lo = std::log(omega_max * 1e-6);
    const double hi = std::log(omega_max);
    for (std::size_t k = 1; k < count; ++k) {
        const double frac = count == 2 ? 1.0 : static_cast<double>(k - 1) / static_cast<double>(count - 2);
        const double w = std::exp(lo + frac * (hi - lo));
        out.push_back({w, std::abs(eval_transfer(tf, {0.0, w}))});
    }
    return out;
}

}  // namespace cascade
