#pragma once

#include <Eigen/Dense>

#include <cmath>

namespace fracwalk {

// Relative cutoff for numerical rank decisions: singular values below
// rank_tol * sigma_max are treated as zero.
inline constexpr double kDefaultRankTol = 1e-9;

// Relative tolerance for deciding that a real value is an integer or a
// perfect square during geometric reconstruction.
inline constexpr double kDefaultIntTol = 1e-6;

// Residual tolerance for the transition-matrix conditions (row sums,
// quotient transitivity, gauge residuals).
inline constexpr double kDefaultConditionTol = 1e-10;

inline double max_abs(const Eigen::MatrixXd& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double max_abs(const Eigen::VectorXd& v) {
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

// True when |value - round(value)| <= tol * max(1, |value|).
inline bool is_near_integer(double value, double tol) {
    return std::abs(value - std::round(value)) <= tol * std::max(1.0, std::abs(value));
}

}  // namespace fracwalk
