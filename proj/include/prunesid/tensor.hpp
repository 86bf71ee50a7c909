#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace prunesid {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// T x D visual-token embeddings, one token per row. Entries are always
/// finite and both dimensions are at least one.
class TokenMatrix {
public:
    /// Throws ErrorKind::invalid_input naming the first non-finite entry.
    explicit TokenMatrix(RowMatrix values);

    static TokenMatrix from_values(std::span<const double> values, std::size_t tokens, std::size_t dims);
    static TokenMatrix from_values(std::span<const float> values, std::size_t tokens, std::size_t dims);

    std::size_t tokens() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    std::size_t dims() const noexcept { return static_cast<std::size_t>(values_.cols()); }
    const RowMatrix& values() const noexcept { return values_; }
    double operator()(std::size_t token, std::size_t dim) const {
        return values_(static_cast<Eigen::Index>(token), static_cast<Eigen::Index>(dim));
    }

private:
    RowMatrix values_;
};

/// Sigmoid-rescaled tokens with the per-dimension token mean removed.
struct CenteredMatrix {
    RowMatrix values;
    Eigen::RowVectorXd mean;
};

/// Truncated factorisation M ~= U diag(S) V^T. S is descending and each V
/// column has its largest-magnitude entry positive.
struct SvdFactors {
    Matrix U;
    Vector S;
    Matrix V;
};

/// Symmetric T x T cosine similarities. Rows with zero norm have similarity
/// 0 against every token, including themselves.
class SimilarityMatrix {
public:
    explicit SimilarityMatrix(Matrix values) : values_(std::move(values)) {}

    std::size_t size() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    double operator()(std::size_t i, std::size_t j) const {
        return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    const Matrix& values() const noexcept { return values_; }

private:
    Matrix values_;
};

/// Unit-normalised token rows, used to evaluate cosine similarities lazily
/// without materialising the T x T matrix.
class UnitRows {
public:
    explicit UnitRows(const TokenMatrix& tokens);

    std::size_t size() const noexcept { return static_cast<std::size_t>(rows_.rows()); }
    double similarity(std::size_t i, std::size_t j) const {
        if (i == j) return nonzero_[i] ? 1.0 : 0.0;
        return rows_.row(static_cast<Eigen::Index>(i)).dot(rows_.row(static_cast<Eigen::Index>(j)));
    }
    bool nonzero(std::size_t i) const { return nonzero_[i] != 0; }
    const RowMatrix& values() const noexcept { return rows_; }

private:
    RowMatrix rows_;
    std::vector<unsigned char> nonzero_;
};

TokenMatrix sigmoid_rescale(const TokenMatrix& tokens);

CenteredMatrix center_tokens(const TokenMatrix& rescaled);

/// center_tokens(sigmoid_rescale(tokens)) in one pass over fresh storage.
CenteredMatrix rescale_and_center(const TokenMatrix& tokens);

SimilarityMatrix pairwise_similarity(const TokenMatrix& tokens);
SimilarityMatrix pairwise_similarity(const UnitRows& rows);

inline constexpr int default_power_iterations = 4;
inline constexpr Eigen::Index default_oversampling = 8;

/// Randomised subspace iteration (Gaussian sketch, `iters` power passes with
/// re-orthonormalisation). Deterministic for a given seed.
SvdFactors truncated_svd(const Eigen::Ref<const Matrix>& m, Eigen::Index rank,
                         int iters = default_power_iterations, std::uint64_t seed = 0);

/// Dense one-sided Jacobi SVD for reference checks. Refuses inputs with more
/// than 4096 entries.
SvdFactors exact_svd_oracle(const Eigen::Ref<const Matrix>& m);

/// Flip singular-vector pairs so that each V column's largest-magnitude entry
/// is positive (first index wins ties).
void canonicalize_signs(SvdFactors& factors);

}  // namespace prunesid
