#pragma once

#include "prunesid/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace testing {

using prunesid::Matrix;
using prunesid::RowMatrix;
using prunesid::TokenMatrix;

inline RowMatrix gaussian_rows(std::size_t rows, std::size_t cols, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, scale);
    RowMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
    return m;
}

inline TokenMatrix gaussian_tokens(std::size_t rows, std::size_t cols, std::uint64_t seed, double scale = 1.0) {
    return TokenMatrix(gaussian_rows(rows, cols, seed, scale));
}

// Plain cosine, written out longhand so it shares nothing with UnitRows.
inline double cosine(const TokenMatrix& x, std::size_t i, std::size_t j) {
    double dot = 0.0, ni = 0.0, nj = 0.0;
    for (std::size_t d = 0; d < x.dims(); ++d) {
        dot += x(i, d) * x(j, d);
        ni += x(i, d) * x(i, d);
        nj += x(j, d) * x(j, d);
    }
    if (ni == 0.0 || nj == 0.0) return 0.0;
    return dot / std::sqrt(ni * nj);
}

// Textbook greedy NMS: repeatedly take the best remaining token, then strike
// every remaining token too similar to it.
template <typename Sim>
std::vector<std::size_t> naive_nms(std::vector<std::size_t> group, const std::vector<double>& score, Sim sim,
                                   double tau) {
    std::vector<std::size_t> kept;
    std::vector<bool> alive(group.size(), true);
    while (true) {
        std::size_t best = group.size();
        for (std::size_t a = 0; a < group.size(); ++a) {
            if (!alive[a]) continue;
            if (best == group.size() || score[group[a]] > score[group[best]] ||
                (score[group[a]] == score[group[best]] && group[a] < group[best])) {
                best = a;
            }
        }
        if (best == group.size()) break;
        kept.push_back(group[best]);
        alive[best] = false;
        for (std::size_t a = 0; a < group.size(); ++a) {
            if (alive[a] && sim(group[best], group[a]) >= tau) alive[a] = false;
        }
    }
    return kept;
}

struct PlantedClusters {
    TokenMatrix tokens;
    std::vector<std::size_t> label;
    std::size_t clusters;
};

// Tokens scattered tightly around C orthonormal directions, sizes 8..24 per
// cluster, rows shuffled. Redrawn until intra-cluster cosine > 0.9 and
// cross-cluster cosine < 0.2 hold for every pair.
inline PlantedClusters planted_clusters(std::size_t clusters, std::size_t dims, std::uint64_t seed,
                                        double noise = 0.08) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> size(8, 24);
    for (;;) {
        Matrix g(static_cast<Eigen::Index>(dims), static_cast<Eigen::Index>(clusters));
        for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = normal(rng);
        Eigen::HouseholderQR<Matrix> qr(g);
        const Matrix centres = qr.householderQ() * Matrix::Identity(g.rows(), g.cols());

        std::vector<std::size_t> label;
        for (std::size_t c = 0; c < clusters; ++c)
            for (std::size_t n = size(rng); n > 0; --n) label.push_back(c);
        std::shuffle(label.begin(), label.end(), rng);

        RowMatrix m(static_cast<Eigen::Index>(label.size()), static_cast<Eigen::Index>(dims));
        for (std::size_t i = 0; i < label.size(); ++i) {
            for (std::size_t d = 0; d < dims; ++d) {
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) =
                    3.0 * centres(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(label[i])) +
                    noise * normal(rng);
            }
        }
        PlantedClusters out{TokenMatrix(std::move(m)), std::move(label), clusters};
        bool ok = true;
        for (std::size_t i = 0; i < out.label.size() && ok; ++i) {
            for (std::size_t j = i + 1; j < out.label.size() && ok; ++j) {
                const double c = cosine(out.tokens, i, j);
                ok = out.label[i] == out.label[j] ? c > 0.9 : c < 0.2;
            }
        }
        if (ok) return out;
    }
}

inline std::size_t clusters_covered(const PlantedClusters& p, const std::vector<std::size_t>& subset) {
    std::vector<bool> seen(p.clusters, false);
    std::size_t n = 0;
    for (const std::size_t i : subset) {
        if (!seen[p.label[i]]) {
            seen[p.label[i]] = true;
            ++n;
        }
    }
    return n;
}

// Largest principal angle between the column spans of two orthonormal bases,
// via its sine (acos near 1 is too coarse for small angles).
inline double max_principal_angle(const Matrix& a, const Matrix& b) {
    const Matrix residual = b - a * (a.transpose() * b);
    Eigen::JacobiSVD<Matrix> svd(residual);
    return std::asin(std::min(1.0, svd.singularValues()(0)));
}

// Random orthonormal bases around a prescribed spectrum.
inline Matrix with_spectrum(std::size_t rows, std::size_t cols, const std::vector<double>& sigma, std::uint64_t seed) {
    const auto k = static_cast<Eigen::Index>(sigma.size());
    const Matrix u = Eigen::HouseholderQR<Matrix>(gaussian_rows(rows, sigma.size(), seed)).householderQ() *
                     Matrix::Identity(static_cast<Eigen::Index>(rows), k);
    const Matrix v = Eigen::HouseholderQR<Matrix>(gaussian_rows(cols, sigma.size(), seed + 1)).householderQ() *
                     Matrix::Identity(static_cast<Eigen::Index>(cols), k);
    return u * Eigen::Map<const prunesid::Vector>(sigma.data(), k).asDiagonal() * v.transpose();
}

}  // namespace testing
