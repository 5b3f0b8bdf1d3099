/*
 * cascade_lab.h
 * C interface to the cascade analysis library.
 *
 * Objects are opaque handles created by cl_*_create / cl_*_from_json and
 * released with the matching cl_*_free. Every fallible call returns a
 * cl_status; on failure cl_last_error() holds a message for the calling
 * thread. Handles are immutable after creation and may be shared between
 * threads.
 */
#ifndef CASCADE_LAB_H
#define CASCADE_LAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define CL_API __declspec(dllexport)
#else
#  define CL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cl_status {
    CL_OK = 0,

    /* configuration errors */
    CL_ERR_NON_POSITIVE_RATE = 1,
    CL_ERR_LENGTH_MISMATCH = 2,
    CL_ERR_INVALID_INPUT = 3,
    CL_ERR_PARSE = 4,
    CL_ERR_INDEX_OUT_OF_RANGE = 5,

    /* analytic-domain errors */
    CL_ERR_POLE_EVALUATION = 10,
    CL_ERR_INFINITE_GAIN = 11,
    CL_ERR_UNSTABLE_FEEDBACK = 12,
    CL_ERR_UNBOUNDED_NORM = 13,
    CL_ERR_PURE_INTEGRATOR = 14,
    CL_ERR_DOMAIN = 15,
    CL_ERR_DEGENERATE_SIGNAL = 16,
    CL_ERR_NO_CONVERGENCE = 17,

    /* numeric-run errors */
    CL_ERR_STEP_TOO_LARGE = 20,
    CL_ERR_TAIL_NOT_DECAYED = 21,

    /* API misuse */
    CL_ERR_NULL_ARGUMENT = 30,
    CL_ERR_BUFFER_TOO_SMALL = 31,

    CL_ERR_INTERNAL = 99
} cl_status;

CL_API const char* cl_status_name(cl_status status);

/* Process exit code for a status: 0 ok, 2 configuration, 3 analytic domain,
 * 4 numeric run, 1 anything else. */
CL_API int cl_status_exit_code(cl_status status);

/* Message describing the most recent failure on this thread ("" if none). */
CL_API const char* cl_last_error(void);

CL_API const char* cl_version(void);

typedef struct cl_cascade cl_cascade;
typedef struct cl_input cl_input;
typedef struct cl_trajectory cl_trajectory;
typedef struct cl_perturbation cl_perturbation;

/* ---- cascades ---------------------------------------------------------- */

CL_API cl_status cl_cascade_create(size_t n, const double* alpha, const double* beta, double leak,
                                   double feedback, cl_cascade** out);
CL_API cl_status cl_cascade_from_json(const char* json, cl_cascade** out);
/* Writes canonical JSON into buf. *required receives the size including the
 * terminating NUL; CL_ERR_BUFFER_TOO_SMALL if cap is not enough. */
CL_API cl_status cl_cascade_to_json(const cl_cascade* c, char* buf, size_t cap, size_t* required);
CL_API void cl_cascade_free(cl_cascade* c);
CL_API size_t cl_cascade_length(const cl_cascade* c);
/* alpha and beta must hold n values each; any output pointer may be NULL. */
CL_API cl_status cl_cascade_params(const cl_cascade* c, double* alpha, double* beta, double* leak,
                                   double* feedback);

/* ---- inputs ------------------------------------------------------------ */

CL_API cl_status cl_input_from_json(const char* json, cl_input** out);
CL_API cl_status cl_input_impulse(cl_input** out);
CL_API cl_status cl_input_exp(double r0, double lambda, cl_input** out);
CL_API cl_status cl_input_peak(double r0, double lambda, cl_input** out);
CL_API cl_status cl_input_rect(double r0, double t0, cl_input** out);
CL_API cl_status cl_input_sinc(double eps, cl_input** out);
CL_API cl_status cl_input_sampled(const double* times, const double* values, size_t count, cl_input** out);
CL_API void cl_input_free(cl_input* r);
CL_API int cl_input_is_impulse(const cl_input* r);
CL_API cl_status cl_input_value(const cl_input* r, double t, double* out);

typedef struct cl_input_moments {
    double norm2;
    double norm2_paper;
    double m1;
    double q;
} cl_input_moments;

CL_API cl_status cl_input_moments_get(const cl_input* r, cl_input_moments* out);

/* ---- transfer function and gain ---------------------------------------- */

CL_API cl_status cl_transfer_eval(const cl_cascade* c, double s_re, double s_im, double* out_re,
                                  double* out_im);
CL_API cl_status cl_hinf_norm(const cl_cascade* c, double* out);
CL_API cl_status cl_truncated_gain(const cl_cascade* c, double* out);
CL_API cl_status cl_amplifies(const cl_cascade* c, int* out);
/* omegas and magnitudes must hold count values. */
CL_API cl_status cl_frequency_sweep(const cl_cascade* c, double omega_max, size_t count, double* omegas,
                                    double* magnitudes);

/* ---- signal metrics ---------------------------------------------------- */

typedef enum cl_norm_convention { CL_NORM_EXACT = 0, CL_NORM_PAPER = 1 } cl_norm_convention;

typedef struct cl_signal_metrics {
    double gain;
    double tau;
    double sigma;
    double amplitude;
    double sigma0;
} cl_signal_metrics;

CL_API cl_status cl_metrics(const cl_cascade* c, const cl_input* r, cl_norm_convention convention,
                            int with_amplitude, cl_signal_metrics* out);
CL_API cl_status cl_signaling_time(const cl_cascade* c, const cl_input* r, double* out);
CL_API cl_status cl_signal_duration(const cl_cascade* c, const cl_input* r, double* out);
CL_API cl_status cl_signal_amplitude(const cl_cascade* c, const cl_input* r, cl_norm_convention convention,
                                     double* out);
CL_API cl_status cl_sigma0(const cl_cascade* c, double* out);
/* stage is 1-based */
CL_API cl_status cl_step_metrics(const cl_cascade* c, const cl_input* r, size_t stage, double* tau,
                                 double* sigma);

/* ---- design ------------------------------------------------------------ */

typedef enum cl_design_mode { CL_DESIGN_FIXED_ALPHA = 0, CL_DESIGN_FIXED_PRODUCT = 1 } cl_design_mode;

typedef struct cl_design_result {
    size_t n_star;
    double beta_star;
    double sigma0_star;
    double m_value;
    cl_design_mode mode;
} cl_design_result;

CL_API cl_status cl_f_of_k(double k, double* out);
CL_API cl_status cl_psi(double m, size_t* out);
CL_API cl_status cl_optimal_beta(size_t n, double alpha_product, double k_gain, double leak, double* out);
/* `alpha` is the common on-rate (FIXED_ALPHA) or the on-rate product (FIXED_PRODUCT). */
CL_API cl_status cl_optimal_design(cl_design_mode mode, double alpha, double k_gain, double leak,
                                   cl_design_result* out);
CL_API cl_status cl_feedback_design(const double* alphas, size_t count, double eps, double k_gain, double leak,
                                    cl_design_result* out);
/* best_betas must hold n values. */
CL_API cl_status cl_oracle_min_sigma0(size_t n, double alpha_product, double k_gain, double leak, size_t trials,
                                      uint64_t seed, double* best_betas, double* best_sigma0);
CL_API cl_status cl_oracle_nstar(double m, size_t n_max, size_t* out);

/* ---- simulation -------------------------------------------------------- */

CL_API cl_status cl_simulate_linear(const cl_cascade* c, const cl_input* r, double t_end, double dt,
                                    cl_trajectory** out);
CL_API cl_status cl_simulate_nonlinear(const cl_cascade* c, const double* xtot, size_t count, const cl_input* r,
                                       double t_end, double dt, cl_trajectory** out);
CL_API cl_status cl_simulate_delayed(const cl_cascade* c, const double* delays, size_t count, const cl_input* r,
                                     double t_end, double dt, cl_trajectory** out);
CL_API void cl_trajectory_free(cl_trajectory* traj);
CL_API size_t cl_trajectory_steps(const cl_trajectory* traj);
/* Columns per row: R, X_1, ..., X_{n+1}. */
CL_API size_t cl_trajectory_width(const cl_trajectory* traj);
CL_API double cl_trajectory_dt(const cl_trajectory* traj);
/* Pointer to row k (width values), NULL when k is out of range. Valid until free. */
CL_API const double* cl_trajectory_row(const cl_trajectory* traj, size_t k);
/* channel 0 is the input, i in 1..n+1 is X_i */
CL_API cl_status cl_norm2_time(const cl_trajectory* traj, size_t channel, double* out);
CL_API cl_status cl_empirical_moments(const cl_trajectory* traj, size_t channel, double* tau, double* sigma);
/* omega_max <= 0 selects a default upper frequency. */
CL_API cl_status cl_freq_norm2(const cl_cascade* c, const cl_input* r, double omega_max, double* out);
CL_API cl_status cl_suggest_dt(const cl_cascade* c, double* out);
CL_API cl_status cl_suggest_t_end(const cl_cascade* c, const cl_input* r, double* out);

/* ---- stability --------------------------------------------------------- */

CL_API cl_status cl_perturbation_from_json(const char* json, cl_perturbation** out);
/* rows and cols are 1-based */
CL_API cl_status cl_perturbation_create(const size_t* rows, const size_t* cols, const double* values, size_t count,
                                        cl_perturbation** out);
CL_API void cl_perturbation_free(cl_perturbation* p);
/* Row-major (n+1)x(n+1) matrix; pert may be NULL. cap is the number of doubles in out. */
CL_API cl_status cl_system_matrix(const cl_cascade* c, const cl_perturbation* pert, double* out, size_t cap);
/* a is row-major dim x dim; re and im receive dim values each. */
CL_API cl_status cl_eigenvalues(const double* a, size_t dim, double* re, double* im);
/* Eigenvalues of the (perturbed) system matrix; re and im hold n+1 values each. */
CL_API cl_status cl_cascade_eigenvalues(const cl_cascade* c, const cl_perturbation* pert, double* re, double* im);
CL_API cl_status cl_is_stable(const cl_cascade* c, const cl_perturbation* pert, int* out);
CL_API cl_status cl_feedback_stability_bound(const cl_cascade* c, double* out);

#ifdef __cplusplus
}
#endif

#endif /* CASCADE_LAB_H */
