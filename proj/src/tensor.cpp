#include "ltree/tensor.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "ltree/errors.hpp"

namespace ltree {

JointTensor4::JointTensor4(int n, TensorKind kind) : n_(n), kind_(kind) {
    if (n < 1) throw InvalidArgument("tensor state count must be positive");
    data_.assign(static_cast<std::size_t>(n) * n * n * n, 0.0);
}

JointTensor4::JointTensor4(int n, std::vector<double> entries, TensorKind kind)
    : n_(n), kind_(kind), data_(std::move(entries)) {
    if (n < 1) throw InvalidArgument("tensor state count must be positive");
    if (data_.size() != static_cast<std::size_t>(n) * n * n * n) {
        throw InvalidArgument("tensor entry count must be n^4");
    }
}

double JointTensor4::total() const { return std::accumulate(data_.begin(), data_.end(), 0.0); }

void JointTensor4::validate(double tol) const {
    for (double v : data_) {
        if (!std::isfinite(v) || v < 0.0) {
            throw InvalidArgument("tensor entries must be finite and nonnegative");
        }
    }
    if (std::abs(total() - 1.0) > tol) {
        throw InvalidArgument("tensor entries must sum to 1, got " + std::to_string(total()));
    }
}

JointTensor4 JointTensor4::permuted(const std::array<int, 4>& axes) const {
    JointTensor4 result(n_, kind_);
    std::array<int, 4> x{};
    for (x[3] = 0; x[3] < n_; ++x[3])
        for (x[2] = 0; x[2] < n_; ++x[2])
            for (x[1] = 0; x[1] < n_; ++x[1])
                for (x[0] = 0; x[0] < n_; ++x[0])
                    result(x[axes[0]], x[axes[1]], x[axes[2]], x[axes[3]]) = (*this)(x[0], x[1], x[2], x[3]);
    return result;
}

Matrix JointTensor4::marginal12() const {
    Matrix m = Matrix::Zero(n_, n_);
    for (int x4 = 0; x4 < n_; ++x4)
        for (int x3 = 0; x3 < n_; ++x3)
            for (int x2 = 0; x2 < n_; ++x2)
                for (int x1 = 0; x1 < n_; ++x1) m(x1, x2) += (*this)(x1, x2, x3, x4);
    return m;
}

Matrix unfold(const JointTensor4& p, Pairing grouping) {
    const int n = p.states();
    Matrix out(n * n, n * n);
    for (int x4 = 0; x4 < n; ++x4)
        for (int x3 = 0; x3 < n; ++x3)
            for (int x2 = 0; x2 < n; ++x2)
                for (int x1 = 0; x1 < n; ++x1) {
                    const double v = p(x1, x2, x3, x4);
                    switch (grouping) {
                    case Pairing::P12_34: out(x1 + n * x2, x3 + n * x4) = v; break;
                    case Pairing::P13_24: out(x1 + n * x3, x2 + n * x4) = v; break;
                    case Pairing::P14_23: out(x1 + n * x4, x2 + n * x3) = v; break;
                    }
                }
    return out;
}

SpectralSummary spectral(const Matrix& m) {
    if (!m.allFinite()) throw NumericalFailure("spectral: matrix has non-finite entries");
    SpectralSummary s;
    if (m.size() == 0) return s;
    Eigen::BDCSVD<Matrix> svd(m);
    if (svd.info() != Eigen::Success) {
        throw NumericalFailure("spectral: singular value decomposition did not converge");
    }
    s.singular_values = svd.singularValues();
    s.nuclear_norm = s.singular_values.sum();
    s.frobenius_norm = std::sqrt(s.singular_values.squaredNorm());
    return s;
}

double nuclear_norm(const Matrix& m) { return spectral(m).nuclear_norm; }

Matrix kronecker(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Matrix khatri_rao(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) {
        throw InvalidArgument("khatri_rao: column counts differ (" + std::to_string(a.cols()) +
                              " vs " + std::to_string(b.cols()) + ")");
    }
    Matrix out(a.rows() * b.rows(), a.cols());
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            out.col(j).segment(i * b.rows(), b.rows()) = a(i, j) * b.col(j);
    return out;
}

int numerical_rank(const Matrix& m, double tol) {
    if (!(tol > 0.0)) throw InvalidArgument("numerical_rank: tolerance must be positive");
    const SpectralSummary s = spectral(m);
    if (s.singular_values.size() == 0 || s.singular_values(0) == 0.0) return 0;
    const double cut = tol * s.singular_values(0);
    int rank = 0;
    for (Eigen::Index i = 0; i < s.singular_values.size(); ++i)
        if (s.singular_values(i) > cut) ++rank;
    return rank;
}

} // namespace ltree
