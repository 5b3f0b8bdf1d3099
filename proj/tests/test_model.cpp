#include <doctest.h>

#include <cmath>
#include <limits>

#include "cascade/model.hpp"
#include "oracles.hpp"

using namespace cascade;

namespace {

ErrorCode code_of(const auto& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidInput;
}

bool rejects(const Cascade& c) {
    try {
        validate(c);
        return false;
    } catch (const Error&) {
        return true;
    }
}

}  // namespace

TEST_CASE("validate accepts a unit cascade") {
    CHECK_NOTHROW(validate(Cascade{2, {1, 1}, {1, 1}, 1, 0}));
}

TEST_CASE("validate reports field and 1-based index of a negative rate") {
    try {
        validate(Cascade{2, {1, -1}, {1, 1}, 1, 0});
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonPositiveRate);
        CHECK(e.field() == "alpha");
        CHECK(e.index() == 2);
    }
    try {
        validate(Cascade{3, {1, 1, 1}, {1, 1, 0}, 1, 0});
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.field() == "beta");
        CHECK(e.index() == 3);
    }
}

TEST_CASE("validate length and scalar checks") {
    CHECK(code_of([] { validate(Cascade{3, {1, 1, 1}, {1, 1}, 1, 0}); }) == ErrorCode::LengthMismatch);
    CHECK(code_of([] { validate(Cascade{0, {}, {}, 1, 0}); }) == ErrorCode::LengthMismatch);
    CHECK(code_of([] { validate(Cascade{1, {1}, {1}, -0.1, 0}); }) == ErrorCode::NonPositiveRate);
    CHECK(code_of([] { validate(Cascade{1, {1}, {1}, 1, -0.1}); }) == ErrorCode::NonPositiveRate);
    CHECK(code_of([] { validate(Cascade{1, {std::nan("")}, {1}, 1, 0}); }) == ErrorCode::NonPositiveRate);
    CHECK_NOTHROW(validate(Cascade{1, {1}, {1}, 0.0, 0}));
}

TEST_CASE("unstable feedback is accepted at construction") {
    CHECK_NOTHROW(Cascade::make(2, {1, 2}, {1, 1}, 1, 100.0));
}

TEST_CASE("constructors reject exactly what validate rejects") {
    oracle::Gen gen(11);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = gen.index(0, 4);
        Cascade c;
        c.n = n;
        const std::size_t na = gen.index(0, 1) ? n : gen.index(0, 5);
        const std::size_t nb = gen.index(0, 1) ? n : gen.index(0, 5);
        for (std::size_t i = 0; i < na; ++i) c.alpha.push_back(gen.uniform(-0.5, 2));
        for (std::size_t i = 0; i < nb; ++i) c.beta.push_back(gen.uniform(-0.5, 2));
        c.leak = gen.uniform(-0.3, 2);
        c.feedback = gen.uniform(-0.3, 2);
        bool make_threw = false;
        try {
            const Cascade built = Cascade::make(c.n, c.alpha, c.beta, c.leak, c.feedback);
            CHECK(built == c);
        } catch (const Error&) {
            make_threw = true;
        }
        CHECK(make_threw == rejects(c));
    }
}

TEST_CASE("uniform builds identical stages") {
    const Cascade c = Cascade::uniform(3, 1.2, 0.5, 1.0, 0.1);
    CHECK(c.n == 3);
    CHECK(c.alpha == std::vector<double>{1.2, 1.2, 1.2});
    CHECK(c.beta == std::vector<double>{0.5, 0.5, 0.5});
    CHECK(c.feedback == 0.1);
}

TEST_CASE("input validation") {
    CHECK_NOTHROW(validate(InputSignal{Impulse{}}));
    CHECK(code_of([] { validate(InputSignal{DecayingExp{1, 0}}); }) == ErrorCode::InvalidInput);
    CHECK(code_of([] { validate(InputSignal{Peak{-1, 1}}); }) == ErrorCode::InvalidInput);
    CHECK(code_of([] { validate(InputSignal{Rect{1, 0}}); }) == ErrorCode::InvalidInput);
    CHECK(code_of([] { validate(InputSignal{Sinc{0}}); }) == ErrorCode::InvalidInput);
    CHECK(code_of([] { validate(InputSignal{Sampled{{0, 1, 1}, {0, 1, 2}}}); }) == ErrorCode::InvalidInput);
    CHECK(code_of([] { validate(InputSignal{Sampled{{0, 1}, {0}}}); }) == ErrorCode::InvalidInput);
    CHECK(code_of([] {
              validate(InputSignal{Sampled{{0, 1}, {0, std::numeric_limits<double>::infinity()}}});
          }) == ErrorCode::InvalidInput);
    CHECK_NOTHROW(validate(InputSignal{Sampled{{0, 0.5, 2}, {1, -1, 0}}}));
}

TEST_CASE("input values") {
    CHECK(input_value(DecayingExp{2, 3}, 0.5) == doctest::Approx(2 * std::exp(-1.5)));
    CHECK(input_value(Peak{5, 2}, 0.5) == doctest::Approx(2.5 * std::exp(-1.0)));
    CHECK(input_value(Rect{2, 3}, 2.9) == 2.0);
    CHECK(input_value(Rect{2, 3}, 3.1) == 0.0);
    CHECK(input_value(Peak{5, 2}, -1.0) == 0.0);
    CHECK(input_value(Impulse{}, 0.3) == 0.0);
    const double eps = 0.5, r = std::sqrt(M_PI / eps);
    CHECK(input_value(Sinc{eps}, 0.0) == doctest::Approx(2 * r * eps / M_PI));
    CHECK(input_value(Sinc{eps}, 3.0) == doctest::Approx(2 * r / (M_PI * 3.0) * std::sin(1.5)));
    const Sampled s{{0, 1, 3}, {0, 2, -2}};
    CHECK(input_value(s, 0.5) == doctest::Approx(1.0));
    CHECK(input_value(s, 2.0) == doctest::Approx(0.0));
    CHECK(input_value(s, 3.0) == doctest::Approx(-2.0));
    CHECK(input_value(s, 3.5) == 0.0);
}

TEST_CASE("input transforms match closed forms and numerical Laplace integrals") {
    const std::vector<std::complex<double>> points{{0.0, 0.0}, {0.3, 0.0}, {1.0, 2.0}, {0.0, 5.0}, {2.0, -1.0}};
    for (const auto s : points) {
        CHECK(std::abs(input_laplace(DecayingExp{2, 1.5}, s) - oracle::laplace_exp(2, 1.5, s)) < 1e-12);
        CHECK(std::abs(input_laplace(Peak{5, 2}, s) - oracle::laplace_peak(5, 2, s)) < 1e-12);
        CHECK(std::abs(input_laplace(Rect{2, 3}, s) - oracle::laplace_rect(2, 3, s)) < 1e-9);
    }
    CHECK(input_laplace(Impulse{}, {3.0, 1.0}) == std::complex<double>(1.0, 0.0));

    // piecewise-linear sampled input against fine trapezoid quadrature of R(t) e^{-st}
    const Sampled samp{{0.0, 0.4, 1.0, 2.5}, {0.0, 1.0, 0.3, 0.0}};
    for (const auto s : points) {
        const double dt = 1e-5;
        std::complex<double> acc = 0.0;
        for (double t = 0.0; t <= 2.5 + 1e-12; t += dt) {
            const double w = (t == 0.0 || t + dt > 2.5 + 1e-12) ? 0.5 : 1.0;
            acc += w * input_value(samp, t) * std::exp(-s * t);
        }
        acc *= dt;
        CHECK(std::abs(input_laplace(samp, s) - acc) < 1e-6);
    }
}

TEST_CASE("sinc transform on the real axis and its imaginary-axis boundary") {
    const double eps = 0.7;
    for (double s : {0.0, 0.2, 1.5}) {
        CHECK(input_laplace(Sinc{eps}, {s, 0.0}).real() == doctest::Approx(oracle::laplace_sinc_real(eps, s)));
    }
    // boundary value is the limit from the right half-plane
    for (double w : {0.3, 1.9}) {
        const auto boundary = input_laplace(Sinc{eps}, {0.0, w});
        const auto inside = input_laplace(Sinc{eps}, {1e-9, w});
        CHECK(std::abs(boundary - inside) < 1e-6);
    }
}

TEST_CASE("trajectory layout") {
    Trajectory traj(0.1, 5, 3);
    CHECK(traj.steps() == 5);
    CHECK(traj.n_states() == 3);
    CHECK(traj.row(2).size() == 4);
    traj.row(2)[0] = 7.0;
    traj.row(2)[3] = 9.0;
    CHECK(traj.input(2) == 7.0);
    CHECK(traj.state(2, 3) == 9.0);
    CHECK(traj.at(2, Channel::state(3)) == 9.0);
    CHECK(traj.time(4) == doctest::Approx(0.4));
    const auto col = traj.column(Channel::input());
    CHECK(col.size() == 5);
    CHECK(col[2] == 7.0);
}
