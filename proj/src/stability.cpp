#include "cascade/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "cascade/xfer.hpp"

namespace cascade {

void validate(const PerturbationSpec& pert, std::size_t dim) {
    for (const auto& e : pert.entries) {
        if (e.row < 1 || e.row > dim || e.col < 1 || e.col > dim) {
            throw Error(ErrorCode::IndexOutOfRange,
                        "perturbation entry (" + std::to_string(e.row) + "," + std::to_string(e.col) +
                            ") outside the " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix",
                        "perturbation");
        }
        if (e.row == e.col) {
            throw Error(ErrorCode::IndexOutOfRange, "perturbations may not touch the diagonal", "perturbation",
                        e.row);
        }
        if (!std::isfinite(e.value)) {
            throw Error(ErrorCode::InvalidInput, "perturbation values must be finite", "perturbation");
        }
    }
}

Eigen::MatrixXd build_system_matrix(const Cascade& c) {
    validate(c);
    const auto dim = static_cast<Eigen::Index>(c.n + 1);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t i = 0; i < c.n; ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        a(k, k) = -c.beta[i];
        if (i > 0) a(k, k - 1) = c.alpha[i];
    }
    a(dim - 1, dim - 1) = -c.leak;
    a(dim - 1, dim - 2) = 1.0;
    if (c.feedback > 0.0) a(0, dim - 2) += c.feedback;
    return a;
}

Eigen::MatrixXd build_system_matrix(const Cascade& c, const PerturbationSpec& pert) {
    Eigen::MatrixXd a = build_system_matrix(c);
    validate(pert, c.n + 1);
    for (const auto& e : pert.entries) {
        a(static_cast<Eigen::Index>(e.row - 1), static_cast<Eigen::Index>(e.col - 1)) += e.value;
    }
    return a;
}

std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) throw Error(ErrorCode::InvalidInput, "matrix must be square");
    if (a.rows() == 0 || a.rows() > 64) {
        throw Error(ErrorCode::InvalidInput, "matrix dimension must be in 1..64");
    }
    if (!a.allFinite()) throw Error(ErrorCode::InvalidInput, "matrix has non-finite entries");

    const Eigen::Index dim = a.rows();
    const bool lower = a.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().isZero(0.0);
    const bool upper = a.triangularView<Eigen::StrictlyLower>().toDenseMatrix().isZero(0.0);
    std::vector<std::complex<double>> out;
    out.reserve(static_cast<std::size_t>(dim));
    if (lower || upper) {
        for (Eigen::Index i = 0; i < dim; ++i) out.emplace_back(a(i, i), 0.0);
        return out;
    }

    // Hessenberg reduction followed by shifted (Francis) QR.
    Eigen::EigenSolver<Eigen::MatrixXd> solver;
    solver.setMaxIterations(static_cast<Eigen::Index>(100 * dim));
    solver.compute(a, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::NoConvergence, "QR iteration did not converge");
    }
    const auto& ev = solver.eigenvalues();
    for (Eigen::Index i = 0; i < dim; ++i) out.push_back(ev(i));
    return out;
}

double max_real_part(const std::vector<std::complex<double>>& eig) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& z : eig) best = std::max(best, z.real());
    return best;
}

bool is_stable(const Cascade& c, const std::optional<PerturbationSpec>& pert) {
    const Eigen::MatrixXd a = pert ? build_system_matrix(c, *pert) : build_system_matrix(c);
    return max_real_part(eigenvalues(a)) < 0.0;
}

double feedback_stability_bound(const Cascade& c) {
    validate(c);
    return std::exp(detail::log_product(c.beta) - detail::log_product(c.alpha, 1));
}

}  // namespace cascade
