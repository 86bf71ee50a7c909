#include "prunesid/tensor.hpp"

#include "prunesid/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace prunesid {
namespace {

Matrix orthonormal_basis(const Matrix& y) {
    Eigen::HouseholderQR<Matrix> qr(y);
    return qr.householderQ() * Matrix::Identity(y.rows(), y.cols());
}

// Extend `basis` so that column `col` is a unit vector orthogonal to all
// other nonzero columns. Used for singular vectors of exactly-zero values.
void complete_column(Matrix& basis, Eigen::Index col, const std::vector<bool>& filled) {
    for (Eigen::Index e = 0; e < basis.rows(); ++e) {
        Vector candidate = Vector::Unit(basis.rows(), e);
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index k = 0; k < basis.cols(); ++k) {
                if (!filled[static_cast<std::size_t>(k)] || k == col) continue;
                candidate -= basis.col(k).dot(candidate) * basis.col(k);
            }
        }
        const double norm = candidate.norm();
        if (norm > 1e-8) {
            basis.col(col) = candidate / norm;
            return;
        }
    }
    fail(ErrorKind::internal, "could not complete orthonormal basis");
}

}  // namespace

void canonicalize_signs(SvdFactors& factors) {
    for (Eigen::Index j = 0; j < factors.V.cols(); ++j) {
        Eigen::Index pivot = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < factors.V.rows(); ++i) {
            const double mag = std::abs(factors.V(i, j));
            if (mag > best) {
                best = mag;
                pivot = i;
            }
        }
        if (factors.V(pivot, j) < 0.0) {
            factors.V.col(j) *= -1.0;
            if (j < factors.U.cols()) factors.U.col(j) *= -1.0;
        }
    }
}

SvdFactors truncated_svd(const Eigen::Ref<const Matrix>& m, Eigen::Index rank, int iters, std::uint64_t seed) {
    const Eigen::Index smaller = std::min(m.rows(), m.cols());
    if (rank < 1 || rank > smaller) {
        fail(ErrorKind::parameter, "svd rank " + std::to_string(rank) + " outside [1, " + std::to_string(smaller) +
                                       "] for a " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                                       " matrix");
    }
    if (iters < 2) fail(ErrorKind::parameter, "svd needs at least 2 power iterations, got " + std::to_string(iters));

    const Eigen::Index width = std::min(rank + default_oversampling, smaller);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix sketch(m.cols(), width);
    for (Eigen::Index c = 0; c < width; ++c)
        for (Eigen::Index r = 0; r < m.cols(); ++r) sketch(r, c) = normal(rng);

    Matrix range = orthonormal_basis(m * sketch);
    for (int it = 0; it < iters; ++it) {
        const Matrix co_range = orthonormal_basis(m.transpose() * range);
        range = orthonormal_basis(m * co_range);
    }

    // m ~= range * B with B = range^T m. Factor B^T = Qb Rb, then Rb = Ur S Vr^T,
    // so m ~= (range Vr) S (Qb Ur)^T.
    const Matrix projected_t = m.transpose() * range;
    Eigen::HouseholderQR<Matrix> qr(projected_t);
    const Matrix qb = qr.householderQ() * Matrix::Identity(projected_t.rows(), width);
    const Matrix rb = qr.matrixQR().topRows(width).triangularView<Eigen::Upper>();
    Eigen::JacobiSVD<Matrix> small(rb, Eigen::ComputeFullU | Eigen::ComputeFullV);

    SvdFactors out;
    out.S = small.singularValues().head(rank);
    out.V = qb * small.matrixU().leftCols(rank);
    out.U = range * small.matrixV().leftCols(rank);
    canonicalize_signs(out);
    return out;
}

SvdFactors exact_svd_oracle(const Eigen::Ref<const Matrix>& m) {
    if (m.size() == 0) fail(ErrorKind::parameter, "exact svd of an empty matrix");
    if (m.size() > 4096) {
        fail(ErrorKind::guard, "exact svd oracle is limited to 4096 entries, got " + std::to_string(m.rows()) + "x" +
                                   std::to_string(m.cols()));
    }

    const bool transposed = m.rows() < m.cols();
    Matrix work = transposed ? Matrix(m.transpose()) : Matrix(m);
    const Eigen::Index n = work.cols();
    Matrix right = Matrix::Identity(n, n);

    constexpr double tolerance = 1e-15;
    for (int sweep = 0; sweep < 100; ++sweep) {
        bool rotated = false;
        for (Eigen::Index p = 0; p + 1 < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double alpha = work.col(p).squaredNorm();
                const double beta = work.col(q).squaredNorm();
                const double gamma = work.col(p).dot(work.col(q));
                if (gamma == 0.0 || std::abs(gamma) <= tolerance * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (Eigen::Index k = 0; k < work.rows(); ++k) {
                    const double a = work(k, p);
                    const double b = work(k, q);
                    work(k, p) = c * a - s * b;
                    work(k, q) = s * a + c * b;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double a = right(k, p);
                    const double b = right(k, q);
                    right(k, p) = c * a - s * b;
                    right(k, q) = s * a + c * b;
                }
            }
        }
        if (!rotated) break;
    }

    std::vector<double> sigma(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) sigma[static_cast<std::size_t>(j)] = work.col(j).norm();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return sigma[static_cast<std::size_t>(a)] > sigma[static_cast<std::size_t>(b)];
    });

    Matrix left(work.rows(), n);
    Matrix right_sorted(n, n);
    Vector values(n);
    std::vector<bool> filled(static_cast<std::size_t>(n), false);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        const double s = sigma[static_cast<std::size_t>(src)];
        values(k) = s;
        right_sorted.col(k) = right.col(src);
        if (s > 0.0) {
            left.col(k) = work.col(src) / s;
            filled[static_cast<std::size_t>(k)] = true;
        }
    }
    for (Eigen::Index k = 0; k < n; ++k) {
        if (!filled[static_cast<std::size_t>(k)]) {
            complete_column(left, k, filled);
            filled[static_cast<std::size_t>(k)] = true;
        }
    }

    SvdFactors out;
    out.S = values;
    if (transposed) {
        out.U = std::move(right_sorted);
        out.V = std::move(left);
    } else {
        out.U = std::move(left);
        out.V = std::move(right_sorted);
    }
    canonicalize_signs(out);
    return out;
}

}  // namespace prunesid
