#include "cascade_lab.h"

#include <algorithm>
#include <cstring>
#include <new>
#include <string>

#include "cascade/config_io.hpp"
#include "cascade/design.hpp"
#include "cascade/metrics.hpp"
#include "cascade/sim.hpp"
#include "cascade/stability.hpp"
#include "cascade/xfer.hpp"

struct cl_cascade {
    cascade::Cascade value;
};
struct cl_input {
    cascade::InputSignal value;
};
struct cl_trajectory {
    cascade::Trajectory value;
};
struct cl_perturbation {
    cascade::PerturbationSpec value;
};

namespace {

thread_local std::string g_last_error;

cl_status map_code(cascade::ErrorCode code) {
    using cascade::ErrorCode;
    switch (code) {
        case ErrorCode::NonPositiveRate: return CL_ERR_NON_POSITIVE_RATE;
        case ErrorCode::LengthMismatch: return CL_ERR_LENGTH_MISMATCH;
        case ErrorCode::InvalidInput: return CL_ERR_INVALID_INPUT;
        case ErrorCode::ParseError: return CL_ERR_PARSE;
        case ErrorCode::IndexOutOfRange: return CL_ERR_INDEX_OUT_OF_RANGE;
        case ErrorCode::PoleEvaluation: return CL_ERR_POLE_EVALUATION;
        case ErrorCode::InfiniteGain: return CL_ERR_INFINITE_GAIN;
        case ErrorCode::UnstableFeedback: return CL_ERR_UNSTABLE_FEEDBACK;
        case ErrorCode::UnboundedNorm: return CL_ERR_UNBOUNDED_NORM;
        case ErrorCode::PureIntegrator: return CL_ERR_PURE_INTEGRATOR;
        case ErrorCode::DomainError: return CL_ERR_DOMAIN;
        case ErrorCode::DegenerateSignal: return CL_ERR_DEGENERATE_SIGNAL;
        case ErrorCode::NoConvergence: return CL_ERR_NO_CONVERGENCE;
        case ErrorCode::StepTooLarge: return CL_ERR_STEP_TOO_LARGE;
        case ErrorCode::TailNotDecayed: return CL_ERR_TAIL_NOT_DECAYED;
    }
    return CL_ERR_INTERNAL;
}

cl_status fail(cl_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

// Runs `body`, translating exceptions into status codes.
template <class Body>
cl_status guarded(Body&& body) noexcept {
    try {
        g_last_error.clear();
        body();
        return CL_OK;
    } catch (const cascade::Error& e) {
        return fail(map_code(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(CL_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(CL_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(CL_ERR_INTERNAL, "unknown failure");
    }
}

template <class... Ptrs>
bool any_null(const Ptrs*... ptrs) {
    return ((ptrs == nullptr) || ...);
}

cl_status null_argument() { return fail(CL_ERR_NULL_ARGUMENT, "required pointer argument is NULL"); }

cascade::NormConvention convention_of(cl_norm_convention c) {
    return c == CL_NORM_PAPER ? cascade::NormConvention::PaperFigure : cascade::NormConvention::Exact;
}

void fill(const cascade::DesignResult& in, cl_design_result* out) {
    out->n_star = in.n_star;
    out->beta_star = in.beta_star;
    out->sigma0_star = in.sigma0_star;
    out->m_value = in.m_value;
    out->mode = in.mode == cascade::DesignMode::FixedAlpha ? CL_DESIGN_FIXED_ALPHA : CL_DESIGN_FIXED_PRODUCT;
}

template <class Make>
cl_status make_input(cl_input** out, Make&& make) {
    if (out == nullptr) return null_argument();
    return guarded([&] {
        cascade::InputSignal r = make();
        cascade::validate(r);
        *out = new cl_input{std::move(r)};
    });
}

const cascade::PerturbationSpec* spec_of(const cl_perturbation* p) { return p ? &p->value : nullptr; }

}  // namespace

extern "C" {

const char* cl_status_name(cl_status status) {
    switch (status) {
        case CL_OK: return "OK";
        case CL_ERR_NON_POSITIVE_RATE: return "NonPositiveRate";
        case CL_ERR_LENGTH_MISMATCH: return "LengthMismatch";
        case CL_ERR_INVALID_INPUT: return "InvalidInput";
        case CL_ERR_PARSE: return "ParseError";
        case CL_ERR_INDEX_OUT_OF_RANGE: return "IndexOutOfRange";
        case CL_ERR_POLE_EVALUATION: return "PoleEvaluation";
        case CL_ERR_INFINITE_GAIN: return "InfiniteGain";
        case CL_ERR_UNSTABLE_FEEDBACK: return "UnstableFeedback";
        case CL_ERR_UNBOUNDED_NORM: return "UnboundedNorm";
        case CL_ERR_PURE_INTEGRATOR: return "PureIntegrator";
        case CL_ERR_DOMAIN: return "DomainError";
        case CL_ERR_DEGENERATE_SIGNAL: return "DegenerateSignal";
        case CL_ERR_NO_CONVERGENCE: return "NoConvergence";
        case CL_ERR_STEP_TOO_LARGE: return "StepTooLarge";
        case CL_ERR_TAIL_NOT_DECAYED: return "TailNotDecayed";
        case CL_ERR_NULL_ARGUMENT: return "NullArgument";
        case CL_ERR_BUFFER_TOO_SMALL: return "BufferTooSmall";
        case CL_ERR_INTERNAL: return "Internal";
    }
    return "Unknown";
}

int cl_status_exit_code(cl_status status) {
    const int s = static_cast<int>(status);
    if (s == 0) return 0;
    if (s >= 1 && s <= 5) return 2;
    if (s >= 10 && s <= 17) return 3;
    if (s >= 20 && s <= 21) return 4;
    return 1;
}

const char* cl_last_error(void) { return g_last_error.c_str(); }

const char* cl_version(void) { return "1.0.0"; }

/* cascades */

cl_status cl_cascade_create(size_t n, const double* alpha, const double* beta, double leak, double feedback,
                            cl_cascade** out) {
    if (any_null(alpha, beta, out)) return null_argument();
    return guarded([&] {
        auto c = cascade::Cascade::make(n, {alpha, alpha + n}, {beta, beta + n}, leak, feedback);
        *out = new cl_cascade{std::move(c)};
    });
}

cl_status cl_cascade_from_json(const char* json, cl_cascade** out) {
    if (any_null(json, out)) return null_argument();
    return guarded([&] { *out = new cl_cascade{cascade::cascade_from_json(std::string_view(json))}; });
}

cl_status cl_cascade_to_json(const cl_cascade* c, char* buf, size_t cap, size_t* required) {
    if (any_null(c, required)) return null_argument();
    std::string text;
    const cl_status st = guarded([&] { text = cascade::serialize(c->value); });
    if (st != CL_OK) return st;
    *required = text.size() + 1;
    if (buf == nullptr || cap < *required) return fail(CL_ERR_BUFFER_TOO_SMALL, "buffer too small");
    std::memcpy(buf, text.c_str(), *required);
    return CL_OK;
}

void cl_cascade_free(cl_cascade* c) { delete c; }

size_t cl_cascade_length(const cl_cascade* c) { return c ? c->value.n : 0; }

cl_status cl_cascade_params(const cl_cascade* c, double* alpha, double* beta, double* leak, double* feedback) {
    if (c == nullptr) return null_argument();
    if (alpha) std::copy(c->value.alpha.begin(), c->value.alpha.end(), alpha);
    if (beta) std::copy(c->value.beta.begin(), c->value.beta.end(), beta);
    if (leak) *leak = c->value.leak;
    if (feedback) *feedback = c->value.feedback;
    return CL_OK;
}

/* inputs */

cl_status cl_input_from_json(const char* json, cl_input** out) {
    if (any_null(json, out)) return null_argument();
    return guarded([&] { *out = new cl_input{cascade::input_from_json(std::string_view(json))}; });
}

cl_status cl_input_impulse(cl_input** out) {
    return make_input(out, [] { return cascade::InputSignal{cascade::Impulse{}}; });
}
cl_status cl_input_exp(double r0, double lambda, cl_input** out) {
    return make_input(out, [&] { return cascade::InputSignal{cascade::DecayingExp{r0, lambda}}; });
}
cl_status cl_input_peak(double r0, double lambda, cl_input** out) {
    return make_input(out, [&] { return cascade::InputSignal{cascade::Peak{r0, lambda}}; });
}
cl_status cl_input_rect(double r0, double t0, cl_input** out) {
    return make_input(out, [&] { return cascade::InputSignal{cascade::Rect{r0, t0}}; });
}
cl_status cl_input_sinc(double eps, cl_input** out) {
    return make_input(out, [&] { return cascade::InputSignal{cascade::Sinc{eps}}; });
}
cl_status cl_input_sampled(const double* times, const double* values, size_t count, cl_input** out) {
    if (any_null(times, values)) return null_argument();
    return make_input(out, [&] {
        return cascade::InputSignal{cascade::Sampled{{times, times + count}, {values, values + count}}};
    });
}

void cl_input_free(cl_input* r) { delete r; }

int cl_input_is_impulse(const cl_input* r) {
    return r != nullptr && std::holds_alternative<cascade::Impulse>(r->value);
}

cl_status cl_input_value(const cl_input* r, double t, double* out) {
    if (any_null(r, out)) return null_argument();
    return guarded([&] { *out = cascade::input_value(r->value, t); });
}

cl_status cl_input_moments_get(const cl_input* r, cl_input_moments* out) {
    if (any_null(r, out)) return null_argument();
    return guarded([&] {
        const auto m = cascade::input_moments(r->value);
        *out = {m.norm2, m.norm2_paper, m.m1, m.q};
    });
}

/* transfer */

cl_status cl_transfer_eval(const cl_cascade* c, double s_re, double s_im, double* out_re, double* out_im) {
    if (any_null(c, out_re, out_im)) return null_argument();
    return guarded([&] {
        const auto g = cascade::eval_transfer(cascade::build_transfer(c->value), {s_re, s_im});
        *out_re = g.real();
        *out_im = g.imag();
    });
}

cl_status cl_hinf_norm(const cl_cascade* c, double* out) {
    if (any_null(c, out)) return null_argument();
    return guarded([&] { *out = cascade::hinf_norm(c->value); });
}

cl_status cl_truncated_gain(const cl_cascade* c, double* out) {
    if (any_null(c, out)) return null_argument();
    return guarded([&] { *out = cascade::truncated_gain(c->value); });
}

cl_status cl_amplifies(const cl_cascade* c, int* out) {
    if (any_null(c, out)) return null_argument();
    return guarded([&] { *out = cascade::amplifies(c->value) ? 1 : 0; });
}

cl_status cl_frequency_sweep(const cl_cascade* c, double omega_max, size_t count, double* omegas,
                             double* magnitudes) {
    if (any_null(c, omegas, magnitudes)) return null_argument();
    return guarded([&] {
        const auto sweep = cascade::frequency_sweep(c->value, omega_max, count);
        for (std::size_t k = 0; k < sweep.size(); ++k) {
            omegas[k] = sweep[k].omega;
            magnitudes[k] = sweep[k].magnitude;
        }
    });
}

/* metrics */

cl_status cl_metrics(const cl_cascade* c, const cl_input* r, cl_norm_convention convention, int with_amplitude,
                     cl_signal_metrics* out) {
    if (any_null(c, r, out)) return null_argument();
    return guarded([&] {
        const auto m = cascade::compute_metrics(c->value, r->value, convention_of(convention), with_amplitude != 0);
        *out = {m.gain, m.tau, m.sigma, m.amplitude, m.sigma0};
    });
}

cl_status cl_signaling_time(const cl_cascade* c, const cl_input* r, double* out) {
    if (any_null(c, r, out)) return null_argument();
    return guarded([&] { *out = cascade::signaling_time(c->value, r->value); });
}

cl_status cl_signal_duration(const cl_cascade* c, const cl_input* r, double* out) {
    if (any_null(c, r, out)) return null_argument();
    return guarded([&] { *out = cascade::signal_duration(c->value, r->value); });
}

cl_status cl_signal_amplitude(const cl_cascade* c, const cl_input* r, cl_norm_convention convention, double* out) {
    if (any_null(c, r, out)) return null_argument();
    return guarded([&] { *out = cascade::signal_amplitude(c->value, r->value, convention_of(convention)); });
}

cl_status cl_sigma0(const cl_cascade* c, double* out) {
    if (any_null(c, out)) return null_argument();
    return guarded([&] { *out = cascade::sigma0(c->value); });
}

cl_status cl_step_metrics(const cl_cascade* c, const cl_input* r, size_t stage, double* tau, double* sigma) {
    if (any_null(c, r, tau, sigma)) return null_argument();
    return guarded([&] {
        const auto m = cascade::step_metrics(c->value, r->value, stage);
        *tau = m.tau;
        *sigma = m.sigma;
    });
}

/* design */

cl_status cl_f_of_k(double k, double* out) {
    if (out == nullptr) return null_argument();
    return guarded([&] { *out = cascade::f_of_k(k); });
}

cl_status cl_psi(double m, size_t* out) {
    if (out == nullptr) return null_argument();
    return guarded([&] { *out = cascade::psi(m); });
}

cl_status cl_optimal_beta(size_t n, double alpha_product, double k_gain, double leak, double* out) {
    if (out == nullptr) return null_argument();
    return guarded([&] { *out = cascade::optimal_beta(n, alpha_product, k_gain, leak); });
}

cl_status cl_optimal_design(cl_design_mode mode, double alpha, double k_gain, double leak, cl_design_result* out) {
    if (out == nullptr) return null_argument();
    return guarded([&] {
        const cascade::DesignConstraint constraint = mode == CL_DESIGN_FIXED_ALPHA
                                                         ? cascade::DesignConstraint{cascade::FixedAlpha{alpha}}
                                                         : cascade::DesignConstraint{cascade::FixedProduct{alpha}};
        fill(cascade::optimal_design(constraint, k_gain, leak), out);
    });
}

cl_status cl_feedback_design(const double* alphas, size_t count, double eps, double k_gain, double leak,
                             cl_design_result* out) {
    if (any_null(alphas, out)) return null_argument();
    return guarded([&] { fill(cascade::feedback_design({alphas, count}, eps, k_gain, leak), out); });
}

cl_status cl_oracle_min_sigma0(size_t n, double alpha_product, double k_gain, double leak, size_t trials,
                               uint64_t seed, double* best_betas, double* best_sigma0) {
    if (any_null(best_betas, best_sigma0)) return null_argument();
    return guarded([&] {
        const auto res = cascade::oracle_min_sigma0(n, alpha_product, k_gain, leak, trials, seed);
        std::copy(res.best_betas.begin(), res.best_betas.end(), best_betas);
        *best_sigma0 = res.best_sigma0;
    });
}

cl_status cl_oracle_nstar(double m, size_t n_max, size_t* out) {
    if (out == nullptr) return null_argument();
    return guarded([&] { *out = cascade::oracle_nstar(m, n_max); });
}

/* simulation */

cl_status cl_simulate_linear(const cl_cascade* c, const cl_input* r, double t_end, double dt, cl_trajectory** out) {
    if (any_null(c, r, out)) return null_argument();
    return guarded([&] { *out = new cl_trajectory{cascade::simulate_linear(c->value, r->value, t_end, dt)}; });
}

cl_status cl_simulate_nonlinear(const cl_cascade* c, const double* xtot, size_t count, const cl_input* r,
                                double t_end, double dt, cl_trajectory** out) {
    if (any_null(c, r, out, xtot)) return null_argument();
    return guarded([&] {
        *out = new cl_trajectory{cascade::simulate_nonlinear(c->value, {xtot, count}, r->value, t_end, dt)};
    });
}

cl_status cl_simulate_delayed(const cl_cascade* c, const double* delays, size_t count, const cl_input* r,
                              double t_end, double dt, cl_trajectory** out) {
    if (any_null(c, r, out, delays)) return null_argument();
    return guarded([&] {
        *out = new cl_trajectory{cascade::simulate_delayed(c->value, {delays, count}, r->value, t_end, dt)};
    });
}

void cl_trajectory_free(cl_trajectory* traj) { delete traj; }

size_t cl_trajectory_steps(const cl_trajectory* traj) { return traj ? traj->value.steps() : 0; }

size_t cl_trajectory_width(const cl_trajectory* traj) { return traj ? traj->value.n_states() + 1 : 0; }

double cl_trajectory_dt(const cl_trajectory* traj) { return traj ? traj->value.dt() : 0.0; }

const double* cl_trajectory_row(const cl_trajectory* traj, size_t k) {
    if (traj == nullptr || k >= traj->value.steps()) return nullptr;
    return traj->value.row(k).data();
}

cl_status cl_norm2_time(const cl_trajectory* traj, size_t channel, double* out) {
    if (any_null(traj, out)) return null_argument();
    return guarded([&] { *out = cascade::norm2_time(traj->value, cascade::Channel{channel}); });
}

cl_status cl_empirical_moments(const cl_trajectory* traj, size_t channel, double* tau, double* sigma) {
    if (any_null(traj, tau, sigma)) return null_argument();
    return guarded([&] {
        const auto m = cascade::empirical_moments(traj->value, cascade::Channel{channel});
        *tau = m.tau;
        *sigma = m.sigma;
    });
}

cl_status cl_freq_norm2(const cl_cascade* c, const cl_input* r, double omega_max, double* out) {
    if (any_null(c, r, out)) return null_argument();
    return guarded([&] { *out = cascade::freq_norm2(c->value, r->value, omega_max); });
}

cl_status cl_suggest_dt(const cl_cascade* c, double* out) {
    if (any_null(c, out)) return null_argument();
    return guarded([&] { *out = cascade::suggest_dt(c->value); });
}

cl_status cl_suggest_t_end(const cl_cascade* c, const cl_input* r, double* out) {
    if (any_null(c, r, out)) return null_argument();
    return guarded([&] { *out = cascade::suggest_t_end(c->value, r->value); });
}

/* stability */

cl_status cl_perturbation_from_json(const char* json, cl_perturbation** out) {
    if (any_null(json, out)) return null_argument();
    return guarded([&] { *out = new cl_perturbation{cascade::perturbation_from_json(std::string_view(json))}; });
}

cl_status cl_perturbation_create(const size_t* rows, const size_t* cols, const double* values, size_t count,
                                 cl_perturbation** out) {
    if (out == nullptr || (count > 0 && any_null(rows, cols, values))) return null_argument();
    return guarded([&] {
        cascade::PerturbationSpec spec;
        for (size_t k = 0; k < count; ++k) spec.entries.push_back({rows[k], cols[k], values[k]});
        *out = new cl_perturbation{std::move(spec)};
    });
}

void cl_perturbation_free(cl_perturbation* p) { delete p; }

cl_status cl_system_matrix(const cl_cascade* c, const cl_perturbation* pert, double* out, size_t cap) {
    if (any_null(c, out)) return null_argument();
    const size_t dim = c->value.n + 1;
    if (cap < dim * dim) return fail(CL_ERR_BUFFER_TOO_SMALL, "matrix buffer too small");
    return guarded([&] {
        const Eigen::MatrixXd a = pert ? cascade::build_system_matrix(c->value, pert->value)
                                       : cascade::build_system_matrix(c->value);
        for (size_t i = 0; i < dim; ++i) {
            for (size_t j = 0; j < dim; ++j) {
                out[i * dim + j] = a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            }
        }
    });
}

cl_status cl_eigenvalues(const double* a, size_t dim, double* re, double* im) {
    if (any_null(a, re, im)) return null_argument();
    return guarded([&] {
        const auto d = static_cast<Eigen::Index>(dim);
        Eigen::MatrixXd m(d, d);
        for (Eigen::Index i = 0; i < d; ++i) {
            for (Eigen::Index j = 0; j < d; ++j) m(i, j) = a[i * d + j];
        }
        const auto eig = cascade::eigenvalues(m);
        for (size_t k = 0; k < eig.size(); ++k) {
            re[k] = eig[k].real();
            im[k] = eig[k].imag();
        }
    });
}

cl_status cl_cascade_eigenvalues(const cl_cascade* c, const cl_perturbation* pert, double* re, double* im) {
    if (any_null(c, re, im)) return null_argument();
    return guarded([&] {
        const Eigen::MatrixXd a = pert ? cascade::build_system_matrix(c->value, pert->value)
                                       : cascade::build_system_matrix(c->value);
        const auto eig = cascade::eigenvalues(a);
        for (size_t k = 0; k < eig.size(); ++k) {
            re[k] = eig[k].real();
            im[k] = eig[k].imag();
        }
    });
}

cl_status cl_is_stable(const cl_cascade* c, const cl_perturbation* pert, int* out) {
    if (any_null(c, out)) return null_argument();
    return guarded([&] {
        std::optional<cascade::PerturbationSpec> spec;
        if (pert) spec = *spec_of(pert);
        *out = cascade::is_stable(c->value, spec) ? 1 : 0;
    });
}

cl_status cl_feedback_stability_bound(const cl_cascade* c, double* out) {
    if (any_null(c, out)) return null_argument();
    return guarded([&] { *out = cascade::feedback_stability_bound(c->value); });
}

}  // extern "C"
