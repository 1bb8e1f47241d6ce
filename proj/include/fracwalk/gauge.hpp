#pragma once

#include <optional>
#include <utility>

#include <Eigen/Dense>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "fracwalk/common.hpp"
#include "fracwalk/errors.hpp"
#include "fracwalk/recovery.hpp"
#include "fracwalk/walk.hpp"

namespace fracwalk {

/// Invertible mixer of hidden coordinates; acts by conjugation with Id_N + A.
struct GaugeElement {
    Eigen::MatrixXd a;

    int dim() const { return static_cast<int>(a.rows()); }
};

inline GaugeElement make_gauge(Eigen::MatrixXd a, double rank_tol = kDefaultRankTol) {
    if (a.rows() != a.cols()) throw DimensionMismatch("gauge element must be square");
    if (a.size() > 0) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
        const auto& sv = svd.singularValues();
        if (!(sv(sv.size() - 1) > rank_tol * sv(0)))
            throw SingularGauge("gauge element is numerically singular");
    }
    return GaugeElement{std::move(a)};
}

/// (Id_N + A) P (Id_N + A^-1): invisible to all observable data.
inline Eigen::MatrixXd gauge_action(const GaugeElement& gauge, const Eigen::MatrixXd& p,
                                    int observable_count) {
    const int hidden = gauge.dim();
    if (p.rows() != p.cols() || p.rows() != observable_count + hidden)
        throw DimensionMismatch("gauge dimension must match the hidden block");
    if (hidden == 0) return p;
    const Eigen::MatrixXd inv_a = gauge.a.fullPivLu().inverse();
    Blocks b = split_blocks(p, observable_count);
    b.p12 = b.p12 * inv_a;
    b.p21 = gauge.a * b.p21;
    b.p22 = gauge.a * b.p22 * inv_a;
    return reassemble(b);
}

inline Eigen::MatrixXd gauge_action_diagonal(const Eigen::VectorXd& diag_a, const Eigen::MatrixXd& p,
                                             int observable_count) {
    for (int i = 0; i < diag_a.size(); ++i)
        if (!(diag_a(i) > 0)) throw InvalidArgument("diagonal gauge must be positive");
    return gauge_action(GaugeElement{Eigen::MatrixXd(diag_a.asDiagonal())}, p, observable_count);
}

enum class SignClass { positive, nonnegative, fails };

/// Report on the three conditions characterizing row-normalizations of
/// symmetric kernels: signs, row sums, and transitivity of P over P^T.
struct ConditionReport {
    SignClass p1 = SignClass::fails;
    double p2_residual = 0.0;
    double p3_residual = 0.0;
    bool p3_applicable = false;
    bool overall = false;
};

namespace detail {

// Hadamard quotient P over P^T. Entries where both P(x,y) and P(y,x) vanish
// only occur on the diagonal of admissible inputs and are pinned to 1, the
// value every transitive matrix takes there.
inline bool quotient_matrix(const Eigen::MatrixXd& p, Eigen::MatrixXd& quotient) {
    const int n = static_cast<int>(p.rows());
    quotient.resize(n, n);
    for (int x = 0; x < n; ++x) {
        quotient(x, x) = 1.0;
        for (int y = 0; y < n; ++y) {
            if (y == x) continue;
            if (p(y, x) == 0.0 || p(x, y) == 0.0) return false;
            quotient(x, y) = p(x, y) / p(y, x);
        }
    }
    return true;
}

inline double transitivity_defect(const Eigen::MatrixXd& quotient) {
    const int n = static_cast<int>(quotient.rows());
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j) {
                const double defect =
                    std::abs(quotient(i, k) * quotient(k, j) - quotient(i, j)) /
                    std::abs(quotient(i, j));
                worst = std::max(worst, defect);
            }
    return worst;
}

}  // namespace detail

inline ConditionReport check_conditions(const Eigen::MatrixXd& p, bool strict_positive,
                                        double tol = kDefaultConditionTol) {
    const int n = static_cast<int>(p.rows());
    if (p.cols() != n) throw DimensionMismatch("condition check needs a square matrix");
    ConditionReport report;

    const double min_entry = p.minCoeff();
    report.p1 = min_entry > 0   ? SignClass::positive
                : min_entry >= 0 ? SignClass::nonnegative
                                 : SignClass::fails;

    report.p2_residual = (p.rowwise().sum() - Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff();

    Eigen::MatrixXd quotient;
    report.p3_applicable = detail::quotient_matrix(p, quotient);
    report.p3_residual = report.p3_applicable ? detail::transitivity_defect(quotient) : 0.0;

    const bool p1_ok = strict_positive ? report.p1 == SignClass::positive
                                       : report.p1 != SignClass::fails;
    report.overall = p1_ok && report.p2_residual <= tol && report.p3_applicable &&
                     report.p3_residual <= tol;
    return report;
}

/// Interaction matrix underlying a transition matrix, anchored at vertex 0:
/// m(0) = 1, m(x) = P(0,x) / P(x,0), C = diag(m) P. The true kernel is
/// lambda * C for one unknown positive factor.
struct RecoveredInteraction {
    Eigen::MatrixXd c;
    Eigen::VectorXd row_norms;
    int anchor = 0;
};

inline RecoveredInteraction recover_interaction(const Eigen::MatrixXd& p,
                                                double tol = kDefaultConditionTol) {
    const int n = static_cast<int>(p.rows());
    const ConditionReport report = check_conditions(p, /*strict_positive=*/false, tol);
    bool off_diagonal_positive = true;
    for (int x = 0; x < n && off_diagonal_positive; ++x)
        for (int y = 0; y < n; ++y)
            if (y != x && !(p(x, y) > 0)) {
                off_diagonal_positive = false;
                break;
            }
    if (!off_diagonal_positive || report.p1 == SignClass::fails ||
        report.p2_residual > tol || !report.p3_applicable || report.p3_residual > tol)
        throw ConditionsViolated("matrix does not normalize a positive symmetric kernel");

    RecoveredInteraction out;
    out.anchor = 0;
    out.row_norms = Eigen::VectorXd(n);
    out.row_norms(0) = 1.0;
    for (int x = 1; x < n; ++x) out.row_norms(x) = p(0, x) / p(x, 0);
    Eigen::MatrixXd c = out.row_norms.asDiagonal() * p;
    const double asymmetry = max_abs(Eigen::MatrixXd(c - c.transpose()));
    if (asymmetry > tol * std::max(1.0, max_abs(c)))
        throw ConditionsViolated("recovered kernel is not symmetric within tolerance");
    out.c = 0.5 * (c + c.transpose());
    return out;
}

/// Membership in A': the gauge keeps row sums intact exactly when
/// (1_N, A^-1 1_M) lies in the eigenspace of P~ for the eigenvalue 1.
/// For positive P~ that eigenspace is spanned by the constant vector, so the
/// test collapses to A 1 = 1.
inline bool check_A_prime(const GaugeElement& gauge, const Eigen::MatrixXd& p_tilde,
                          int observable_count, double tol = kDefaultConditionTol) {
    const int hidden = gauge.dim();
    if (p_tilde.rows() != p_tilde.cols() || p_tilde.rows() != observable_count + hidden)
        throw DimensionMismatch("gauge dimension must match the hidden block");
    Eigen::VectorXd v = Eigen::VectorXd::Ones(observable_count + hidden);
    if (hidden > 0) {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(gauge.a);
        if (!lu.isInvertible()) throw SingularGauge("gauge element is singular");
        v.tail(hidden) = lu.solve(Eigen::VectorXd::Ones(hidden));
    }
    return max_abs(Eigen::VectorXd(p_tilde * v - v)) <= tol;
}

/// Conditions of the gauged matrix for a positive diagonal gauge. Signs and
/// quotient transitivity survive the conjugation; the row sums only survive
/// when the diagonal is identically one.
inline ConditionReport check_diagonal_preservation(const Eigen::VectorXd& diag_a,
                                                   const Eigen::MatrixXd& p_tilde,
                                                   int observable_count,
                                                   double tol = kDefaultConditionTol) {
    const Eigen::MatrixXd gauged = gauge_action_diagonal(diag_a, p_tilde, observable_count);
    const bool strict = p_tilde.minCoeff() > 0;
    return check_conditions(gauged, strict, tol);
}

/// Unique gauge element with P = g(A, P~), recovered as A = P21 * pinv(P~21).
/// Requires P~21 of full row rank; returns nothing when the best candidate
/// fails to reproduce P within tol.
inline std::optional<GaugeElement> solve_gauge(const Eigen::MatrixXd& p,
                                               const Eigen::MatrixXd& p_tilde,
                                               int observable_count,
                                               double tol = kDefaultConditionTol,
                                               double rank_tol = kDefaultRankTol) {
    if (p.rows() != p.cols() || p_tilde.rows() != p_tilde.cols() || p.rows() != p_tilde.rows())
        throw DimensionMismatch("both matrices must be square and equally sized");
    const int hidden = static_cast<int>(p.rows()) - observable_count;
    if (hidden < 0 || observable_count < 1)
        throw InvalidArgument("observable count must lie in [1, n]");
    if (hidden == 0) return GaugeElement{Eigen::MatrixXd(0, 0)};

    const Blocks target = split_blocks(p, observable_count);
    const Blocks source = split_blocks(p_tilde, observable_count);
    {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(source.p21);
        const auto& sv = svd.singularValues();
        int rank = 0;
        for (int i = 0; i < sv.size(); ++i)
            if (sv(i) > rank_tol * sv(0)) ++rank;
        if (rank < hidden) throw RankDeficient("P~21 does not have full row rank");
    }
    Eigen::MatrixXd a = target.p21 * pseudoinverse(source.p21, rank_tol);
    GaugeElement gauge{std::move(a)};
    {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(gauge.a);
        const auto& sv = svd.singularValues();
        if (!(sv(sv.size() - 1) > rank_tol * sv(0))) return std::nullopt;
    }
    const double residual = max_abs(Eigen::MatrixXd(gauge_action(gauge, p_tilde, observable_count) - p));
    if (residual > tol) return std::nullopt;
    return gauge;
}

}  // namespace fracwalk
