#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cascade/stability.hpp"
#include "cascade/xfer.hpp"
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

std::vector<double> sorted_real(const std::vector<std::complex<double>>& eig) {
    std::vector<double> out;
    for (const auto& z : eig) out.push_back(z.real());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("system matrix layout") {
    const Eigen::MatrixXd a = build_system_matrix(Cascade::make(2, {1, 2}, {3, 4}, 5));
    Eigen::MatrixXd expected(3, 3);
    expected << -3, 0, 0, 2, -4, 0, 0, 1, -5;
    CHECK(a == expected);

    const Cascade fb = Cascade::make(3, {1, 2, 3}, {1, 1, 1}, 1, 0.25);
    Eigen::MatrixXd diff = build_system_matrix(fb) - build_system_matrix(Cascade::make(3, {1, 2, 3}, {1, 1, 1}, 1));
    CHECK(diff(0, 2) == 0.25);
    diff(0, 2) = 0.0;
    CHECK(diff.isZero(0.0));
}

TEST_CASE("eigenvalues") {
    // lower triangular: the diagonal exactly
    Eigen::MatrixXd low(3, 3);
    low << -1, 0, 0, 5, -2.5, 0, 7, 3, -0.125;
    const auto e = eigenvalues(low);
    CHECK(e[0] == std::complex<double>(-1, 0));
    CHECK(e[1] == std::complex<double>(-2.5, 0));
    CHECK(e[2] == std::complex<double>(-0.125, 0));

    Eigen::MatrixXd toy(2, 2);
    toy << -1, 0.6, 2, -1;
    const auto t = sorted_real(eigenvalues(toy));
    CHECK(t[0] == doctest::Approx(-1 - std::sqrt(1.2)));
    CHECK(t[1] == doctest::Approx(-1 + std::sqrt(1.2)));

    Eigen::MatrixXd sym(3, 3);
    sym << 2, 1, 0, 1, 2, 1, 0, 1, 2;
    const auto s = eigenvalues(sym);
    for (const auto& z : s) CHECK(z.imag() == doctest::Approx(0.0));
    const auto sr = sorted_real(s);
    CHECK(sr[0] == doctest::Approx(2 - std::sqrt(2.0)));
    CHECK(sr[1] == doctest::Approx(2.0));
    CHECK(sr[2] == doctest::Approx(2 + std::sqrt(2.0)));

    CHECK(code_of([] { eigenvalues(Eigen::MatrixXd(2, 3)); }) == ErrorCode::InvalidInput);
    CHECK(code_of([] { eigenvalues(Eigen::MatrixXd::Ones(65, 65)); }) == ErrorCode::InvalidInput);
}

TEST_CASE("property: eigenpair residuals on random dense matrices") {
    oracle::Gen gen(61);
    for (int trial = 0; trial < 50; ++trial) {
        const auto dim = static_cast<Eigen::Index>(gen.index(2, 40));
        Eigen::MatrixXd a(dim, dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = gen.uniform(-1, 1);
        }
        const auto eig = eigenvalues(a);
        REQUIRE(eig.size() == static_cast<std::size_t>(dim));
        const double norm = a.norm();
        for (const auto& lambda : eig) {
            // smallest singular value of (A - lambda I) bounds the best residual
            Eigen::MatrixXcd shifted = a.cast<std::complex<double>>();
            shifted.diagonal().array() -= lambda;
            const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(shifted);
            CHECK(svd.singularValues()(dim - 1) <= 1e-8 * norm);
        }
        // trace is the eigenvalue sum
        std::complex<double> sum = 0.0;
        for (const auto& z : eig) sum += z;
        CHECK(std::abs(sum - a.trace()) < 1e-9 * std::max(1.0, norm));
    }
}

TEST_CASE("stability verdicts") {
    CHECK(is_stable(Cascade::make(3, {1, 2, 3}, {0.5, 1, 2}, 1)));
    CHECK_FALSE(is_stable(Cascade::make(2, {1, 2}, {1, 1}, 1, 0.6)));
    CHECK(max_real_part(eigenvalues(build_system_matrix(Cascade::make(2, {1, 2}, {1, 1}, 1, 0.6)))) ==
          doctest::Approx(std::sqrt(1.2) - 1));
    CHECK_FALSE(is_stable(Cascade::uniform(2, 1, 1, 0)));

    PerturbationSpec down{{{3, 1, 0.7}, {4, 2, -2.0}, {4, 1, 5.0}}};
    const Cascade c = Cascade::make(3, {1, 2, 3}, {0.5, 1, 2}, 1);
    CHECK(is_stable(c, down));
    PerturbationSpec up{{{1, 3, 4.0}}};
    CHECK_FALSE(is_stable(c, up));

    CHECK(code_of([&] { is_stable(c, PerturbationSpec{{{2, 2, 1.0}}}); }) == ErrorCode::IndexOutOfRange);
    CHECK(code_of([&] { is_stable(c, PerturbationSpec{{{5, 1, 1.0}}}); }) == ErrorCode::IndexOutOfRange);
    CHECK(code_of([&] { is_stable(c, PerturbationSpec{{{0, 1, 1.0}}}); }) == ErrorCode::IndexOutOfRange);
}

TEST_CASE("property: any cascade without feedback is stable with eigenvalues -beta and -leak") {
    oracle::Gen gen(62);
    for (int trial = 0; trial < 200; ++trial) {
        const Cascade c = gen.cascade(12);
        PerturbationSpec pert;
        const std::size_t dim = c.n + 1;
        for (int k = 0; k < 5 && dim > 1; ++k) {
            const std::size_t row = gen.index(2, dim);
            const std::size_t col = gen.index(1, row - 1);
            pert.entries.push_back({row, col, gen.uniform(-3, 3)});
        }
        std::vector<double> expected(c.beta.begin(), c.beta.end());
        expected.push_back(c.leak);
        for (double& v : expected) v = -v;
        std::sort(expected.begin(), expected.end());
        CHECK(sorted_real(eigenvalues(build_system_matrix(c, pert))) == expected);
        CHECK(is_stable(c, pert));
    }
}

TEST_CASE("feedback stability bound") {
    CHECK(feedback_stability_bound(Cascade::make(2, {1, 2}, {1, 1}, 1)) == doctest::Approx(0.5));
    const Cascade c = Cascade::make(3, {1.5, 2, 0.5}, {0.7, 1.1, 2.0}, 1);
    Cascade scaled = c;
    for (double& b : scaled.beta) b *= 1.7;
    CHECK(feedback_stability_bound(scaled) == doctest::Approx(feedback_stability_bound(c) * std::pow(1.7, 3)));

    Cascade near = c;
    near.feedback = feedback_stability_bound(c) * (1 - 1e-6);
    CHECK(hinf_norm(near) > 1e5);
    near.feedback = feedback_stability_bound(c) * (1 + 1e-6);
    CHECK_THROWS_AS(hinf_norm(near), Error);
}

TEST_CASE("property: the eigenvalue crossing sits at the stability bound") {
    oracle::Gen gen(63);
    for (int trial = 0; trial < 40; ++trial) {
        Cascade c = gen.cascade(6);
        const double bound = feedback_stability_bound(c);
        auto growth = [&](double eps) {
            c.feedback = eps;
            return max_real_part(eigenvalues(build_system_matrix(c)));
        };
        double lo = 0.0, hi = 2.0 * bound;
        REQUIRE(growth(lo) < 0.0);
        REQUIRE(growth(hi) > 0.0);
        while (hi - lo > 1e-9 * bound) {
            const double mid = 0.5 * (lo + hi);
            (growth(mid) < 0.0 ? lo : hi) = mid;
        }
        CHECK(std::abs(0.5 * (lo + hi) - bound) <= 1e-6 * std::max(1.0, bound));
    }
}

TEST_CASE("property: feedback eigenvalues are roots of the characteristic polynomial") {
    oracle::Gen gen(64);
    for (int trial = 0; trial < 100; ++trial) {
        const Cascade c = gen.feedback_cascade(8, 1.5);
        double fb_term = c.feedback;
        for (std::size_t i = 1; i < c.n; ++i) fb_term *= c.alpha[i];
        for (const auto& lambda : eigenvalues(build_system_matrix(c))) {
            if (std::abs(lambda + c.leak) < 1e-9) continue;
            std::complex<double> prod = 1.0;
            double scale = 1.0;
            for (double b : c.beta) {
                prod *= lambda + b;
                scale *= std::abs(lambda) + b;
            }
            CHECK(std::abs(prod - fb_term) <= 1e-6 * std::max(scale, fb_term));
        }
    }
}
