#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "cascade/model.hpp"

namespace cascade {

/// Extra couplings for kinase non-specificity. Rows and columns are 1-based
/// in the (n+1)x(n+1) system matrix; values are added to the existing entry.
struct PerturbationSpec {
    struct Entry {
        std::size_t row;
        std::size_t col;
        double value;
    };
    std::vector<Entry> entries;
};

/// Throws IndexOutOfRange for entries outside the matrix or on the diagonal.
void validate(const PerturbationSpec& pert, std::size_t dim);

/// Diagonal (-beta_1, ..., -beta_n, -leak), subdiagonal (alpha_2, ..., alpha_n, 1),
/// feedback at (1, n).
Eigen::MatrixXd build_system_matrix(const Cascade& c);
Eigen::MatrixXd build_system_matrix(const Cascade& c, const PerturbationSpec& pert);

/// All eigenvalues of a real square matrix of dimension <= 64. Triangular
/// matrices return their diagonal exactly. Throws NoConvergence if the QR
/// iteration does not settle within 100 * dimension sweeps.
std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& a);

double max_real_part(const std::vector<std::complex<double>>& eig);

/// True iff every eigenvalue of the (optionally perturbed) system matrix has
/// negative real part.
bool is_stable(const Cascade& c, const std::optional<PerturbationSpec>& pert = std::nullopt);

/// beta_1...beta_n / (alpha_2...alpha_n): feedback strengths below this keep
/// the cascade stable.
double feedback_stability_bound(const Cascade& c);

}  // namespace cascade
