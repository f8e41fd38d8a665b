#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ltree/pairing.hpp"

namespace ltree {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class TensorKind { Exact, Empirical };

/// Dense n x n x n x n joint probability table. States are 0-based in the
/// C++ API; storage is column-major so the {12|34} unfolding is a plain
/// reshape (first index fastest).
class JointTensor4 {
public:
    JointTensor4(int n, TensorKind kind);
    JointTensor4(int n, std::vector<double> entries, TensorKind kind);

    int states() const noexcept { return n_; }
    TensorKind kind() const noexcept { return kind_; }

    double operator()(int x1, int x2, int x3, int x4) const { return data_[offset(x1, x2, x3, x4)]; }
    double& operator()(int x1, int x2, int x3, int x4) { return data_[offset(x1, x2, x3, x4)]; }

    std::span<const double> entries() const noexcept { return data_; }
    double total() const;

    /// Throws InvalidArgument unless entries are finite, nonnegative and sum
    /// to one within `tol`.
    void validate(double tol = 1e-9) const;

    /// Axis permutation: result(y) = this(x) where y[i] = x[axes[i]].
    JointTensor4 permuted(const std::array<int, 4>& axes) const;

    /// Marginal over the first two axes (sums out axes 3 and 4).
    Matrix marginal12() const;

private:
    std::size_t offset(int x1, int x2, int x3, int x4) const noexcept {
        const auto n = static_cast<std::size_t>(n_);
        return static_cast<std::size_t>(x1) +
               n * (static_cast<std::size_t>(x2) +
                    n * (static_cast<std::size_t>(x3) + n * static_cast<std::size_t>(x4)));
    }

    int n_;
    TensorKind kind_;
    std::vector<double> data_;
};

/// n^2 x n^2 matricization for the given pairing. For {13|24} the entry
/// P(x1,x2,x3,x4) sits at row x1 + n*x3, column x2 + n*x4 (0-based), and
/// analogously for the other two pairings.
Matrix unfold(const JointTensor4& p, Pairing grouping);

struct SpectralSummary {
    Vector singular_values; // nonincreasing
    double nuclear_norm = 0.0;
    double frobenius_norm = 0.0;
};

/// Full singular value set via a dense decomposition. Throws
/// NumericalFailure on non-finite input or non-convergence.
SpectralSummary spectral(const Matrix& m);

/// Sum of singular values; same failure behaviour as spectral().
double nuclear_norm(const Matrix& m);

Matrix kronecker(const Matrix& a, const Matrix& b);

/// Column-wise Kronecker product; throws InvalidArgument on a column-count mismatch.
Matrix khatri_rao(const Matrix& a, const Matrix& b);

inline constexpr double kDefaultRankTolerance = 1e-8;

/// Number of singular values above tol * sigma_1 (0 for the zero matrix).
int numerical_rank(const Matrix& m, double tol = kDefaultRankTolerance);

} // namespace ltree
