// cascade_lab: command-line front end over the C interface.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cascade_lab.h"

namespace {

using nlohmann::json;

constexpr int kExitConfig = 2;

// Thrown to unwind to main with a specific exit code.
struct Exit {
    int code;
};

[[noreturn]] void die(cl_status st, const std::string& context = {}) {
    std::cerr << "cascade_lab: error: " << cl_status_name(st) << ": " << cl_last_error();
    if (!context.empty()) std::cerr << " (" << context << ")";
    std::cerr << "\n";
    throw Exit{cl_status_exit_code(st)};
}

[[noreturn]] void usage_error(const std::string& message) {
    std::cerr << "cascade_lab: error: " << message << "\n";
    throw Exit{kExitConfig};
}

void check(cl_status st, const std::string& context = {}) {
    if (st != CL_OK) die(st, context);
}

struct CascadeDeleter {
    void operator()(cl_cascade* c) const { cl_cascade_free(c); }
};
struct InputDeleter {
    void operator()(cl_input* r) const { cl_input_free(r); }
};
struct TrajectoryDeleter {
    void operator()(cl_trajectory* t) const { cl_trajectory_free(t); }
};
struct PerturbationDeleter {
    void operator()(cl_perturbation* p) const { cl_perturbation_free(p); }
};
using CascadePtr = std::unique_ptr<cl_cascade, CascadeDeleter>;
using InputPtr = std::unique_ptr<cl_input, InputDeleter>;
using TrajectoryPtr = std::unique_ptr<cl_trajectory, TrajectoryDeleter>;
using PerturbationPtr = std::unique_ptr<cl_perturbation, PerturbationDeleter>;

// An argument starting with '{' is inline JSON, anything else a file path.
std::string load_document(const std::string& arg, const char* what) {
    if (!arg.empty() && arg.front() == '{') return arg;
    std::ifstream in(arg);
    if (!in) usage_error(std::string("cannot read ") + what + " '" + arg + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CascadePtr load_cascade(const std::string& arg) {
    cl_cascade* c = nullptr;
    check(cl_cascade_from_json(load_document(arg, "config").c_str(), &c), "config");
    return CascadePtr(c);
}

InputPtr load_input(const std::string& arg) {
    cl_input* r = nullptr;
    check(cl_input_from_json(load_document(arg, "input").c_str(), &r), "input");
    return InputPtr(r);
}

double round9(double v) {
    if (!std::isfinite(v)) return v;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::strtod(buf, nullptr);
}

std::string fmt9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

// Text sink: stdout unless --out names a file.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) usage_error("cannot write '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

void emit_json(Output& out, const json& j) { out.stream() << j.dump() << "\n"; }

std::size_t cascade_length(const cl_cascade* c) { return cl_cascade_length(c); }

double default_dt(const cl_cascade* c) {
    if (const char* env = std::getenv("CASCADE_LAB_PRECISION"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end == env || *end != '\0' || !(v > 0.0)) usage_error("CASCADE_LAB_PRECISION must be a positive number");
        return v;
    }
    double dt = 0.0;
    check(cl_suggest_dt(c, &dt));
    return dt;
}

// ---- gain ----------------------------------------------------------------

struct GainOptions {
    std::string config;
    std::string out;
    std::size_t sweep = 0;
    double omega_max = 0.0;
};

int run_gain(const GainOptions& opt) {
    auto c = load_cascade(opt.config);
    double k = 0.0;
    if (const cl_status st = cl_hinf_norm(c.get(), &k); st != CL_OK) {
        if (st == CL_ERR_INFINITE_GAIN) {
            const std::string message = cl_last_error();
            double kt = 0.0;
            std::string hint = "use the truncated gain instead";
            if (cl_truncated_gain(c.get(), &kt) == CL_OK) hint += ": K_trunc=" + fmt9(kt);
            std::cerr << "cascade_lab: error: " << cl_status_name(st) << ": " << message << " (" << hint << ")\n";
            throw Exit{cl_status_exit_code(st)};
        }
        die(st);
    }
    int amp = 0;
    check(cl_amplifies(c.get(), &amp));
    Output out(opt.out);
    char line[96];
    std::snprintf(line, sizeof line, "K=%.3f, amplifies=%s", k, amp ? "true" : "false");
    out.stream() << line << "\n";
    if (opt.sweep > 0) {
        double wmax = opt.omega_max;
        if (wmax <= 0.0) {
            std::vector<double> beta(cascade_length(c.get()));
            double leak = 0.0;
            check(cl_cascade_params(c.get(), nullptr, beta.data(), &leak, nullptr));
            wmax = leak;
            for (double b : beta) wmax = std::max(wmax, b);
            wmax *= 100.0;
        }
        std::vector<double> omegas(opt.sweep), mags(opt.sweep);
        check(cl_frequency_sweep(c.get(), wmax, opt.sweep, omegas.data(), mags.data()));
        out.stream() << "omega,magnitude\n";
        for (std::size_t i = 0; i < opt.sweep; ++i) out.stream() << fmt9(omegas[i]) << "," << fmt9(mags[i]) << "\n";
    }
    return 0;
}

// ---- metrics -------------------------------------------------------------

struct MetricsOptions {
    std::string config;
    std::string input;
    std::string norm = "exact";
    std::string out;
    std::size_t step = 0;
    bool table = false;
    bool skip_amplitude = false;
};

cl_norm_convention parse_norm(const std::string& s) {
    if (s == "exact") return CL_NORM_EXACT;
    if (s == "paper") return CL_NORM_PAPER;
    usage_error("--norm must be 'exact' or 'paper'");
}

void emit_table(Output& out, const std::vector<std::pair<std::string, double>>& rows) {
    std::size_t width = 0;
    for (const auto& [k, v] : rows) width = std::max(width, k.size());
    for (const auto& [k, v] : rows) {
        out.stream() << k << std::string(width - k.size() + 2, ' ') << fmt9(v) << "\n";
    }
}

int run_metrics(const MetricsOptions& opt) {
    auto c = load_cascade(opt.config);
    auto r = load_input(opt.input);
    const cl_norm_convention conv = parse_norm(opt.norm);
    Output out(opt.out);

    std::vector<std::pair<std::string, double>> rows;
    if (opt.step > 0) {
        double tau = 0.0, sigma = 0.0;
        check(cl_step_metrics(c.get(), r.get(), opt.step, &tau, &sigma));
        rows = {{"step", static_cast<double>(opt.step)}, {"tau", tau}, {"sigma", sigma}};
    } else {
        cl_signal_metrics m{};
        check(cl_metrics(c.get(), r.get(), conv, opt.skip_amplitude ? 0 : 1, &m));
        rows = {{"K", m.gain}, {"tau", m.tau}, {"sigma", m.sigma}};
        if (!opt.skip_amplitude) rows.emplace_back("amplitude", m.amplitude);
        rows.emplace_back("sigma0", m.sigma0);
    }
    if (opt.table) {
        emit_table(out, rows);
        return 0;
    }
    json j = json::object();
    for (const auto& [k, v] : rows) {
        if (k == "step") j[k] = opt.step;
        else j[k] = round9(v);
    }
    if (opt.step == 0) j["norm"] = opt.norm;
    emit_json(out, j);
    return 0;
}

// ---- design --------------------------------------------------------------

struct DesignOptions {
    std::optional<double> alpha;
    std::optional<double> alpha_product;
    std::optional<double> gain;
    double leak = 1.0;
    std::optional<double> feedback;
    std::vector<double> alphas;
    bool table = false;
    std::string gain_range;
    std::string out;
};

cl_design_result design_once(const DesignOptions& opt, double k) {
    cl_design_result d{};
    if (opt.feedback) {
        if (opt.alphas.empty()) usage_error("--feedback requires --alphas");
        check(cl_feedback_design(opt.alphas.data(), opt.alphas.size(), *opt.feedback, k, opt.leak, &d));
    } else if (opt.alpha) {
        check(cl_optimal_design(CL_DESIGN_FIXED_ALPHA, *opt.alpha, k, opt.leak, &d));
    } else {
        check(cl_optimal_design(CL_DESIGN_FIXED_PRODUCT, *opt.alpha_product, k, opt.leak, &d));
    }
    return d;
}

json design_json(const cl_design_result& d) {
    return json{{"n_star", d.n_star},
                {"beta_star", round9(d.beta_star)},
                {"sigma0_star", round9(d.sigma0_star)},
                {"M", round9(d.m_value)},
                {"mode", d.mode == CL_DESIGN_FIXED_ALPHA ? "fixed_alpha" : "fixed_product"}};
}

// "a:b" or "a:b:step"
std::vector<double> parse_range(const std::string& s) {
    std::vector<double> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ':')) {
        try {
            parts.push_back(std::stod(item));
        } catch (const std::exception&) {
            usage_error("malformed --gain-range '" + s + "'");
        }
    }
    if (parts.size() < 2 || parts.size() > 3) usage_error("--gain-range must be lo:hi or lo:hi:step");
    const double step = parts.size() == 3 ? parts[2] : 1.0;
    if (!(step > 0.0) || parts[1] < parts[0]) usage_error("--gain-range needs lo <= hi and step > 0");
    std::vector<double> out;
    for (std::size_t i = 0;; ++i) {
        const double k = parts[0] + static_cast<double>(i) * step;
        if (k > parts[1] * (1 + 1e-12)) break;
        out.push_back(k);
    }
    return out;
}

int run_design(const DesignOptions& opt) {
    if (!opt.feedback && !opt.alpha && !opt.alpha_product) usage_error("one of --alpha or --alpha-product is required");
    if (opt.alpha && opt.alpha_product) usage_error("--alpha and --alpha-product are mutually exclusive");
    Output out(opt.out);
    if (opt.table) {
        if (opt.gain_range.empty()) usage_error("--table requires --gain-range");
        out.stream() << "K,M,n_star,beta_star,sigma0_star\n";
        for (double k : parse_range(opt.gain_range)) {
            const auto d = design_once(opt, k);
            out.stream() << fmt9(k) << "," << fmt9(d.m_value) << "," << d.n_star << "," << fmt9(d.beta_star) << ","
                         << fmt9(d.sigma0_star) << "\n";
        }
        return 0;
    }
    if (!opt.gain) usage_error("--gain is required");
    emit_json(out, design_json(design_once(opt, *opt.gain)));
    return 0;
}

// ---- simulate ------------------------------------------------------------

struct SimulateOptions {
    std::string config;
    std::string input;
    std::optional<double> t_end;
    std::optional<double> dt;
    bool nonlinear = false;
    std::vector<double> xtot;
    std::vector<double> delays;
    bool check = false;
    std::string out;
};

double rel_err(double empirical, double analytic) {
    return std::abs(empirical - analytic) / std::max(std::abs(analytic), 1e-300);
}

int run_simulate(const SimulateOptions& opt) {
    auto c = load_cascade(opt.config);
    auto r = load_input(opt.input);
    const std::size_t n = cascade_length(c.get());
    if (opt.nonlinear && !opt.delays.empty()) usage_error("--nonlinear and --delays are mutually exclusive");
    if (!opt.xtot.empty() && !opt.nonlinear) usage_error("--xtot requires --nonlinear");

    const double dt = opt.dt ? *opt.dt : default_dt(c.get());
    double t_end = 0.0;
    if (opt.t_end) {
        t_end = *opt.t_end;
    } else {
        check(cl_suggest_t_end(c.get(), r.get(), &t_end));
        double extra = 0.0;
        for (double d : opt.delays) extra += d;
        t_end += extra;
    }

    cl_trajectory* raw = nullptr;
    if (opt.nonlinear) {
        if (opt.xtot.empty()) usage_error("--nonlinear requires --xtot");
        check(cl_simulate_nonlinear(c.get(), opt.xtot.data(), opt.xtot.size(), r.get(), t_end, dt, &raw));
    } else if (!opt.delays.empty()) {
        check(cl_simulate_delayed(c.get(), opt.delays.data(), opt.delays.size(), r.get(), t_end, dt, &raw));
    } else {
        check(cl_simulate_linear(c.get(), r.get(), t_end, dt, &raw));
    }
    TrajectoryPtr traj(raw);

    Output out(opt.out);
    std::ostream& os = out.stream();
    os << "t,R";
    for (std::size_t i = 1; i <= n + 1; ++i) os << ",X" << i;
    os << "\n";
    const std::size_t steps = cl_trajectory_steps(traj.get());
    const std::size_t width = cl_trajectory_width(traj.get());
    const double h = cl_trajectory_dt(traj.get());
    for (std::size_t k = 0; k < steps; ++k) {
        const double* row = cl_trajectory_row(traj.get(), k);
        os << fmt9(static_cast<double>(k) * h);
        for (std::size_t j = 0; j < width; ++j) os << "," << fmt9(row[j]);
        os << "\n";
    }

    if (opt.check) {
        const std::size_t y = n + 1;
        double tau_hat = 0.0, sigma_hat = 0.0, norm_hat = 0.0;
        check(cl_empirical_moments(traj.get(), y, &tau_hat, &sigma_hat));
        check(cl_norm2_time(traj.get(), y, &norm_hat));
        double tau = 0.0, sigma = 0.0, norm = 0.0;
        check(cl_signaling_time(c.get(), r.get(), &tau));
        check(cl_signal_duration(c.get(), r.get(), &sigma));
        check(cl_freq_norm2(c.get(), r.get(), 0.0, &norm));
        json footer{{"tau_hat", round9(tau_hat)},
                    {"tau", round9(tau)},
                    {"tau_rel_err", round9(rel_err(tau_hat, tau))},
                    {"sigma_hat", round9(sigma_hat)},
                    {"sigma", round9(sigma)},
                    {"sigma_rel_err", round9(rel_err(sigma_hat, sigma))},
                    {"norm2_hat", round9(norm_hat)},
                    {"norm2", round9(norm)},
                    {"norm2_rel_err", round9(rel_err(norm_hat, norm))},
                    {"delay_total", round9(std::accumulate(opt.delays.begin(), opt.delays.end(), 0.0))},
                    {"model", opt.nonlinear ? "nonlinear" : (opt.delays.empty() ? "linear" : "delayed")}};
        os << "# " << footer.dump() << "\n";
    }
    return 0;
}

// ---- stability -----------------------------------------------------------

struct StabilityOptions {
    std::string config;
    std::string perturbation;
    std::string out;
};

int run_stability(const StabilityOptions& opt) {
    auto c = load_cascade(opt.config);
    PerturbationPtr pert;
    if (!opt.perturbation.empty()) {
        cl_perturbation* p = nullptr;
        check(cl_perturbation_from_json(load_document(opt.perturbation, "perturbation").c_str(), &p), "perturbation");
        pert.reset(p);
    }
    const std::size_t dim = cascade_length(c.get()) + 1;
    std::vector<double> re(dim), im(dim);
    check(cl_cascade_eigenvalues(c.get(), pert.get(), re.data(), im.data()));
    double max_re = -INFINITY;
    json eig = json::array();
    for (std::size_t i = 0; i < dim; ++i) {
        eig.push_back({round9(re[i]), round9(im[i])});
        max_re = std::max(max_re, re[i]);
    }
    json j{{"eigenvalues", eig}, {"max_real_part", round9(max_re)}, {"stable", max_re < 0.0}};
    double feedback = 0.0;
    check(cl_cascade_params(c.get(), nullptr, nullptr, nullptr, &feedback));
    if (feedback > 0.0) {
        double bound = 0.0;
        check(cl_feedback_stability_bound(c.get(), &bound));
        j["eps_max"] = round9(bound);
    }
    Output out(opt.out);
    emit_json(out, j);
    return 0;
}

// ---- sweep ---------------------------------------------------------------

struct SweepOptions {
    std::string config;
    std::string input;
    std::string param = "feedback";
    double from = 0.0;
    double to = 1.0;
    std::size_t count = 11;
    std::string norm = "exact";
    unsigned threads = 0;
    std::string out;
};

struct SweepRow {
    double value = 0.0;
    cl_status status = CL_OK;
    cl_signal_metrics metrics{};
    int stable = 0;
};

int run_sweep(const SweepOptions& opt) {
    auto base = load_cascade(opt.config);
    auto r = load_input(opt.input);
    const cl_norm_convention conv = parse_norm(opt.norm);
    if (opt.param != "feedback" && opt.param != "leak" && opt.param != "beta-scale") {
        usage_error("--param must be feedback, leak or beta-scale");
    }
    if (opt.count == 0) usage_error("--count must be positive");

    const std::size_t n = cascade_length(base.get());
    std::vector<double> alpha(n), beta(n);
    double leak = 0.0, feedback = 0.0;
    check(cl_cascade_params(base.get(), alpha.data(), beta.data(), &leak, &feedback));
    const bool with_amplitude = !cl_input_is_impulse(r.get());

    std::vector<SweepRow> rows(opt.count);
    auto evaluate = [&](std::size_t i) {
        SweepRow& row = rows[i];
        const double t = opt.count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(opt.count - 1);
        row.value = opt.from + t * (opt.to - opt.from);
        std::vector<double> b = beta;
        double l = leak, fb = feedback;
        if (opt.param == "feedback") fb = row.value;
        else if (opt.param == "leak") l = row.value;
        else for (double& x : b) x *= row.value;
        cl_cascade* c = nullptr;
        row.status = cl_cascade_create(n, alpha.data(), b.data(), l, fb, &c);
        if (row.status != CL_OK) return;
        CascadePtr owned(c);
        row.status = cl_is_stable(c, nullptr, &row.stable);
        if (row.status == CL_OK) row.status = cl_metrics(c, r.get(), conv, with_amplitude ? 1 : 0, &row.metrics);
    };

    const unsigned hw = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers = std::min<std::size_t>(hw, opt.count);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < opt.count; i += workers) evaluate(i);
        });
    }
    for (auto& th : pool) th.join();

    Output out(opt.out);
    std::ostream& os = out.stream();
    os << opt.param << ",K,tau,sigma,amplitude,stable,status\n";
    for (const auto& row : rows) {
        os << fmt9(row.value);
        if (row.status == CL_OK) {
            os << "," << fmt9(row.metrics.gain) << "," << fmt9(row.metrics.tau) << "," << fmt9(row.metrics.sigma)
               << "," << (with_amplitude ? fmt9(row.metrics.amplitude) : std::string("nan"));
        } else {
            os << ",nan,nan,nan,nan";
        }
        os << "," << (row.stable ? "true" : "false") << "," << cl_status_name(row.status) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Analysis of weakly activated signaling cascades"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(cl_version()));

    GainOptions gain;
    auto* g = app.add_subcommand("gain", "Internal gain K and amplification verdict");
    g->add_option("-c,--config", gain.config, "Cascade JSON file or inline JSON")->required();
    g->add_option("--sweep", gain.sweep, "Also print |G(jw)| at this many frequencies");
    g->add_option("--omega-max", gain.omega_max, "Upper sweep frequency (default 100x fastest rate)");
    g->add_option("-o,--out", gain.out, "Write to file instead of stdout");

    MetricsOptions metrics;
    auto* m = app.add_subcommand("metrics", "Signaling time, duration, amplitude");
    m->add_option("-c,--config", metrics.config, "Cascade JSON file or inline JSON")->required();
    m->add_option("-i,--input", metrics.input, "Input JSON file or inline JSON")->required();
    m->add_option("--norm", metrics.norm, "Amplitude norm convention: exact or paper");
    m->add_option("--step", metrics.step, "Report tau and sigma of stage i (1-based)");
    m->add_flag("--table", metrics.table, "Aligned table instead of JSON");
    m->add_flag("--skip-amplitude", metrics.skip_amplitude, "Omit the amplitude (needed for impulse input)");
    m->add_option("-o,--out", metrics.out, "Write to file instead of stdout");

    DesignOptions design;
    auto* d = app.add_subcommand("design", "Optimal off-rate and cascade length");
    d->add_option("--alpha", design.alpha, "Common on-rate");
    d->add_option("--alpha-product", design.alpha_product, "Product of on-rates");
    d->add_option("--gain", design.gain, "Target internal gain K");
    d->add_option("--leak", design.leak, "Output leak rate")->capture_default_str();
    d->add_option("--feedback", design.feedback, "Feedback strength eps (requires --alphas)");
    d->add_option("--alphas", design.alphas, "On-rates alpha_1..alpha_n for feedback design")->delimiter(',');
    d->add_flag("--table", design.table, "Print the optimal length over a gain range");
    d->add_option("--gain-range", design.gain_range, "lo:hi[:step] for --table");
    d->add_option("-o,--out", design.out, "Write to file instead of stdout");

    SimulateOptions sim;
    auto* s = app.add_subcommand("simulate", "Time-domain simulation as CSV");
    s->add_option("-c,--config", sim.config, "Cascade JSON file or inline JSON")->required();
    s->add_option("-i,--input", sim.input, "Input JSON file or inline JSON")->required();
    s->add_option("--t-end", sim.t_end, "End time (default from the slowest rate)");
    s->add_option("--dt", sim.dt, "Step size (default CASCADE_LAB_PRECISION or rate-based)");
    s->add_flag("--nonlinear", sim.nonlinear, "Saturating model");
    s->add_option("--xtot", sim.xtot, "Total amounts for --nonlinear")->delimiter(',');
    s->add_option("--delays", sim.delays, "Per-stage transfer delays")->delimiter(',');
    s->add_flag("--check", sim.check, "Append a JSON footer comparing against analytic values");
    s->add_option("-o,--out", sim.out, "Write to file instead of stdout");

    StabilityOptions stab;
    auto* st = app.add_subcommand("stability", "Eigenvalues and stability verdict");
    st->add_option("-c,--config", stab.config, "Cascade JSON file or inline JSON")->required();
    st->add_option("-p,--perturbation", stab.perturbation, "Perturbation JSON file or inline JSON");
    st->add_option("-o,--out", stab.out, "Write to file instead of stdout");

    SweepOptions sweep;
    auto* sw = app.add_subcommand("sweep", "Metrics over a parameter grid (CSV)");
    sw->add_option("-c,--config", sweep.config, "Cascade JSON file or inline JSON")->required();
    sw->add_option("-i,--input", sweep.input, "Input JSON file or inline JSON")->required();
    sw->add_option("--param", sweep.param, "feedback, leak or beta-scale")->capture_default_str();
    sw->add_option("--from", sweep.from, "First grid value")->capture_default_str();
    sw->add_option("--to", sweep.to, "Last grid value")->capture_default_str();
    sw->add_option("--count", sweep.count, "Grid points")->capture_default_str();
    sw->add_option("--norm", sweep.norm, "Amplitude norm convention: exact or paper");
    sw->add_option("--threads", sweep.threads, "Worker threads (default: hardware)");
    sw->add_option("-o,--out", sweep.out, "Write to file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*g) return run_gain(gain);
        if (*m) return run_metrics(metrics);
        if (*d) return run_design(design);
        if (*s) return run_simulate(sim);
        if (*st) return run_stability(stab);
        if (*sw) return run_sweep(sweep);
    } catch (const Exit& e) {
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "cascade_lab: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
