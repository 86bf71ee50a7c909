#include "prunesid/tensor.hpp"

#include "prunesid/error.hpp"

#include <cmath>
#include <string>

namespace prunesid {

TokenMatrix::TokenMatrix(RowMatrix values) : values_(std::move(values)) {
    if (values_.rows() < 1 || values_.cols() < 1) {
        fail(ErrorKind::invalid_input, "token matrix must have at least one row and one column, got " +
                                           std::to_string(values_.rows()) + "x" + std::to_string(values_.cols()));
    }
    for (Eigen::Index r = 0; r < values_.rows(); ++r) {
        for (Eigen::Index c = 0; c < values_.cols(); ++c) {
            if (!std::isfinite(values_(r, c))) {
                fail(ErrorKind::invalid_input, "non-finite value at row " + std::to_string(r) + ", col " +
                                                   std::to_string(c));
            }
        }
    }
}

namespace {

template <typename T>
TokenMatrix from_span(std::span<const T> values, std::size_t tokens, std::size_t dims) {
    if (values.size() != tokens * dims) {
        fail(ErrorKind::invalid_input, "expected " + std::to_string(tokens * dims) + " values for a " +
                                           std::to_string(tokens) + "x" + std::to_string(dims) +
                                           " matrix, got " + std::to_string(values.size()));
    }
    RowMatrix m(static_cast<Eigen::Index>(tokens), static_cast<Eigen::Index>(dims));
    for (std::size_t i = 0; i < values.size(); ++i) m.data()[i] = static_cast<double>(values[i]);
    return TokenMatrix(std::move(m));
}

}  // namespace

TokenMatrix TokenMatrix::from_values(std::span<const double> values, std::size_t tokens, std::size_t dims) {
    return from_span(values, tokens, dims);
}

TokenMatrix TokenMatrix::from_values(std::span<const float> values, std::size_t tokens, std::size_t dims) {
    return from_span(values, tokens, dims);
}

UnitRows::UnitRows(const TokenMatrix& tokens)
    : rows_(tokens.values().rows(), tokens.values().cols()), nonzero_(tokens.tokens(), 0) {
    const RowMatrix& src = tokens.values();
    for (Eigen::Index i = 0; i < rows_.rows(); ++i) {
        const double norm = src.row(i).norm();
        if (norm > 0.0) {
            rows_.row(i) = src.row(i) / norm;
            nonzero_[static_cast<std::size_t>(i)] = 1;
        } else {
            rows_.row(i).setZero();
        }
    }
}

TokenMatrix sigmoid_rescale(const TokenMatrix& tokens) {
    RowMatrix out(tokens.values().rows(), tokens.values().cols());
    out.array() = 1.0 / (1.0 + (-tokens.values().array()).exp());
    return TokenMatrix(std::move(out));
}

namespace {

// Row-major storage makes a row-by-row sum the cache-friendly way to get column means.
void subtract_column_means(CenteredMatrix& m) {
    m.mean = Eigen::RowVectorXd::Zero(m.values.cols());
    for (Eigen::Index i = 0; i < m.values.rows(); ++i) m.mean += m.values.row(i);
    m.mean /= static_cast<double>(m.values.rows());
    for (Eigen::Index i = 0; i < m.values.rows(); ++i) m.values.row(i) -= m.mean;
}

}  // namespace

CenteredMatrix center_tokens(const TokenMatrix& rescaled) {
    CenteredMatrix out;
    out.values = rescaled.values();
    subtract_column_means(out);
    return out;
}

CenteredMatrix rescale_and_center(const TokenMatrix& tokens) {
    CenteredMatrix out;
    out.values.resize(tokens.values().rows(), tokens.values().cols());
    out.values.array() = 1.0 / (1.0 + (-tokens.values().array()).exp());
    subtract_column_means(out);
    return out;
}

SimilarityMatrix pairwise_similarity(const UnitRows& rows) {
    const std::size_t n = rows.size();
    Matrix s(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        s(ii, ii) = rows.similarity(i, i);
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            s(ii, jj) = s(jj, ii) = rows.similarity(i, j);
        }
    }
    return SimilarityMatrix(std::move(s));
}

SimilarityMatrix pairwise_similarity(const TokenMatrix& tokens) { return pairwise_similarity(UnitRows(tokens)); }

}  // namespace prunesid
