#pragma once

#include <algorithm>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "fracwalk/common.hpp"
#include "fracwalk/errors.hpp"
#include "fracwalk/walk.hpp"

namespace fracwalk {

/// Moore-Penrose inverse through an SVD with relative cutoff rank_tol * sigma_max.
/// The zero matrix maps to the (transposed) zero matrix.
inline Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& a, double rank_tol = kDefaultRankTol) {
    if (a.size() == 0) return Eigen::MatrixXd::Zero(a.cols(), a.rows());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    Eigen::VectorXd inverted = Eigen::VectorXd::Zero(sv.size());
    const double cutoff = rank_tol * sv(0);
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff && sv(i) > 0) inverted(i) = 1.0 / sv(i);
    return svd.matrixV() * inverted.asDiagonal() * svd.matrixU().transpose();
}

/// A = left * right with rank(left) = rank(right) = rank(A) = rank.
/// The factors are the balanced square-root split of the truncated SVD, a
/// deterministic representative of the invertible-factor freedom.
struct FullRankFactors {
    Eigen::MatrixXd left;   // m x r, full column rank
    Eigen::MatrixXd right;  // r x n, full row rank
    int rank = 0;
    // sigma_r / sigma_{r+1}: how cleanly the cutoff separates the spectrum.
    double spectral_gap = std::numeric_limits<double>::infinity();
};

inline FullRankFactors full_rank_factorization(const Eigen::MatrixXd& a,
                                               double rank_tol = kDefaultRankTol) {
    const int rows = static_cast<int>(a.rows());
    const int cols = static_cast<int>(a.cols());
    FullRankFactors factors;
    factors.left = Eigen::MatrixXd::Zero(rows, 0);
    factors.right = Eigen::MatrixXd::Zero(0, cols);
    if (a.size() == 0) return factors;

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cutoff = rank_tol * sv(0);
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff && sv(i) > 0) ++rank;
    factors.rank = rank;
    if (rank == 0) return factors;

    const Eigen::VectorXd roots = sv.head(rank).cwiseSqrt();
    factors.left = svd.matrixU().leftCols(rank) * roots.asDiagonal();
    factors.right = roots.asDiagonal() * svd.matrixV().leftCols(rank).transpose();
    if (rank < sv.size() && sv(rank) > 0) factors.spectral_gap = sv(rank - 1) / sv(rank);
    return factors;
}

/// The two hidden-block products that three-step data pins down:
/// two_step = P12 P21 and three_step = P12 P22 P21.
struct HiddenProducts {
    Eigen::MatrixXd two_step;
    Eigen::MatrixXd three_step;
};

inline HiddenProducts hidden_products(const ObservationData& data) {
    if (data.horizon() < 3)
        throw InsufficientData("three-step data is required; recovery is impossible below it");
    const Eigen::MatrixXd& m1 = data.mats[0];
    const Eigen::MatrixXd& m2 = data.mats[1];
    const Eigen::MatrixXd& m3 = data.mats[2];
    HiddenProducts products;
    products.two_step = m2 - m1 * m1;
    products.three_step = m3 - m1 * m2 - m2 * m1 + m1 * m1 * m1;
    return products;
}

/// Transition matrix recovered from Lambda_3 up to the hidden-coordinate
/// gauge. Q agrees with the data exactly on the observable block and carries
/// the chosen full-rank factors in its off-diagonal blocks.
struct CanonicalRepresentative {
    int observable_count = 0;
    int hidden_rank = 0;
    Eigen::MatrixXd q;   // (N + r) x (N + r)
    Eigen::MatrixXd r1;  // N x r
    Eigen::MatrixXd r2;  // r x N
    double rank_gap = std::numeric_limits<double>::infinity();
};

/// Assembles the representative from given full-rank factors of P12 P21.
inline CanonicalRepresentative canonical_from_factors(const ObservationData& data,
                                                      Eigen::MatrixXd r1, Eigen::MatrixXd r2,
                                                      double rank_tol = kDefaultRankTol) {
    const HiddenProducts products = hidden_products(data);
    const int n_obs = data.observable_count;
    const int rank = static_cast<int>(r1.cols());
    if (r1.rows() != n_obs || r2.cols() != n_obs || r2.rows() != rank)
        throw DimensionMismatch("factor shapes must be N x r and r x N");

    CanonicalRepresentative rep;
    rep.observable_count = n_obs;
    rep.hidden_rank = rank;
    rep.q = Eigen::MatrixXd(n_obs + rank, n_obs + rank);
    rep.q.topLeftCorner(n_obs, n_obs) = data.mats[0];
    if (rank > 0) {
        rep.q.topRightCorner(n_obs, rank) = r1;
        rep.q.bottomLeftCorner(rank, n_obs) = r2;
        rep.q.bottomRightCorner(rank, rank) =
            pseudoinverse(r1, rank_tol) * products.three_step * pseudoinverse(r2, rank_tol);
    }
    rep.r1 = std::move(r1);
    rep.r2 = std::move(r2);
    return rep;
}

/// Factorizes the two-step product P12 P21 = R1 R2 at the given rank
/// tolerance and conjugates the hidden block into the factor gauge.
/// When the underlying graph satisfies (A1) the recovered rank equals the
/// hidden count; in general it is only a lower bound.
inline CanonicalRepresentative recover_canonical(const ObservationData& data,
                                                 double rank_tol = kDefaultRankTol) {
    const HiddenProducts products = hidden_products(data);
    FullRankFactors factors = full_rank_factorization(products.two_step, rank_tol);
    CanonicalRepresentative rep = canonical_from_factors(data, std::move(factors.left),
                                                         std::move(factors.right), rank_tol);
    rep.rank_gap = factors.spectral_gap;
    return rep;
}

inline int recovered_vertex_count(const CanonicalRepresentative& rep) {
    return rep.observable_count + rep.hidden_rank;
}

/// Largest deviation of the observable blocks of P^k and Q^k over k <= k_max.
/// The two matrices may have different sizes; they only share the observable
/// count. Gauge-equivalent pairs stay at numerical zero for every k.
inline double verify_redundancy(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q,
                                int observable_count, int k_max) {
    if (p.rows() < observable_count || q.rows() < observable_count)
        throw DimensionMismatch("both matrices must contain the observable block");
    if (k_max < 1) throw InvalidArgument("k_max must be at least 1");
    double worst = 0.0;
    Eigen::MatrixXd p_power = p;
    Eigen::MatrixXd q_power = q;
    for (int k = 1; k <= k_max; ++k) {
        if (k > 1) {
            p_power = p_power * p;
            q_power = q_power * q;
        }
        const double dev = max_abs(Eigen::MatrixXd(
            p_power.topLeftCorner(observable_count, observable_count) -
            q_power.topLeftCorner(observable_count, observable_count)));
        worst = std::max(worst, dev);
    }
    return worst;
}

}  // namespace fracwalk
