#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fracwalk/common.hpp"
#include "fracwalk/errors.hpp"
#include "fracwalk/graph.hpp"

namespace fracwalk {

inline Eigen::VectorXd validated_conductivity(const Eigen::VectorXd& gamma, int n) {
    if (gamma.size() != n) throw DimensionMismatch("conductivity length must equal vertex count");
    for (int x = 0; x < n; ++x)
        if (!(gamma(x) > 0)) throw NonpositiveConductivity("gamma must be strictly positive");
    return gamma;
}

/// Symmetric jump kernel gamma^1/2(x) gamma^1/2(y) / d(x,y)^alpha with staying
/// weight theta * gamma(x) on the diagonal.
struct InteractionMatrix {
    Eigen::MatrixXd c;
    double alpha = 0.0;
    double theta = 0.0;

    int size() const { return static_cast<int>(c.rows()); }
};

inline InteractionMatrix build_interaction(const Graph& g, const Eigen::VectorXd& gamma,
                                           double alpha, double theta) {
    if (alpha <= 0) throw InvalidArgument("alpha must be positive");
    if (theta < 0) throw InvalidArgument("theta must be nonnegative");
    const Eigen::VectorXd gam = validated_conductivity(gamma, g.n());
    const DistanceMatrix dist = all_pairs_distances(g);
    const int n = g.n();
    Eigen::VectorXd sqrt_gamma = gam.cwiseSqrt();
    Eigen::MatrixXd c(n, n);
    for (int x = 0; x < n; ++x) {
        c(x, x) = theta * gam(x);
        for (int y = x + 1; y < n; ++y) {
            const double value =
                sqrt_gamma(x) * sqrt_gamma(y) / std::pow(static_cast<double>(dist(x, y)), alpha);
            c(x, y) = value;
            c(y, x) = value;
        }
    }
    return InteractionMatrix{std::move(c), alpha, theta};
}

/// Row-stochastic matrix together with the row norms that produced it.
/// Detailed balance m(x) P(x,y) = m(y) P(y,x) is inherited from the symmetry
/// of the interaction matrix.
struct TransitionMatrix {
    Eigen::MatrixXd p;
    int observable_count = 0;
    Eigen::VectorXd row_norms;

    int size() const { return static_cast<int>(p.rows()); }
    int hidden_count() const { return size() - observable_count; }
};

inline TransitionMatrix normalize(const InteractionMatrix& interaction, int observable_count) {
    const int n = interaction.size();
    if (observable_count < 1 || observable_count > n)
        throw InvalidArgument("observable count must lie in [1, n]");
    Eigen::VectorXd m = interaction.c.rowwise().sum();
    for (int x = 0; x < n; ++x)
        if (!(m(x) > 0)) throw ZeroRowSum("row " + std::to_string(x) + " of C sums to zero");
    Eigen::MatrixXd p = m.cwiseInverse().asDiagonal() * interaction.c;
    return TransitionMatrix{std::move(p), observable_count, std::move(m)};
}

inline TransitionMatrix build_transition(const Graph& g, const Eigen::VectorXd& gamma,
                                         double alpha, double theta) {
    return normalize(build_interaction(g, gamma, alpha, theta), g.observable_count());
}

/// 2x2 block split over (observable, hidden) coordinates.
struct Blocks {
    Eigen::MatrixXd p11, p12, p21, p22;
};

inline Blocks split_blocks(const Eigen::MatrixXd& p, int observable_count) {
    const int n = static_cast<int>(p.rows());
    if (p.cols() != n) throw DimensionMismatch("block split needs a square matrix");
    if (observable_count < 1 || observable_count > n)
        throw InvalidArgument("observable count must lie in [1, n]");
    const int hidden = n - observable_count;
    return Blocks{p.topLeftCorner(observable_count, observable_count),
                  p.topRightCorner(observable_count, hidden),
                  p.bottomLeftCorner(hidden, observable_count),
                  p.bottomRightCorner(hidden, hidden)};
}

inline Blocks split_blocks(const TransitionMatrix& p) {
    return split_blocks(p.p, p.observable_count);
}

inline Eigen::MatrixXd reassemble(const Blocks& b) {
    const int observable = static_cast<int>(b.p11.rows());
    const int hidden = static_cast<int>(b.p22.rows());
    Eigen::MatrixXd p(observable + hidden, observable + hidden);
    p.topLeftCorner(observable, observable) = b.p11;
    p.topRightCorner(observable, hidden) = b.p12;
    p.bottomLeftCorner(hidden, observable) = b.p21;
    p.bottomRightCorner(hidden, hidden) = b.p22;
    return p;
}

/// The sequence Lambda_K: upper-left observable blocks of P, P^2, ..., P^K.
struct ObservationData {
    int observable_count = 0;
    std::vector<Eigen::MatrixXd> mats;

    int horizon() const { return static_cast<int>(mats.size()); }
};

inline ObservationData exact_observation_data(const Eigen::MatrixXd& p, int observable_count,
                                              int horizon) {
    const int n = static_cast<int>(p.rows());
    if (p.cols() != n) throw DimensionMismatch("transition matrix must be square");
    if (observable_count < 1 || observable_count > n)
        throw InvalidArgument("observable count must lie in [1, n]");
    if (horizon < 1) throw InvalidArgument("horizon must be at least 1");
    ObservationData data{observable_count, {}};
    data.mats.reserve(horizon);
    Eigen::MatrixXd power = p;
    data.mats.push_back(power.topLeftCorner(observable_count, observable_count));
    for (int k = 2; k <= horizon; ++k) {
        power = power * p;
        data.mats.push_back(power.topLeftCorner(observable_count, observable_count));
    }
    return data;
}

inline ObservationData exact_observation_data(const TransitionMatrix& p, int horizon) {
    return exact_observation_data(p.p, p.observable_count, horizon);
}

/// Applies cns * sum_{y != x} gamma^1/2(x) gamma^1/2(y) (u(y) - u(x)) / d(x,y)^alpha.
inline Eigen::VectorXd apply_fractional_conductivity(const Graph& g, const Eigen::VectorXd& gamma,
                                                     double alpha, const Eigen::VectorXd& u,
                                                     double cns) {
    if (alpha <= 0) throw InvalidArgument("alpha must be positive");
    if (u.size() != g.n()) throw DimensionMismatch("u must have one entry per vertex");
    const Eigen::VectorXd gam = validated_conductivity(gamma, g.n());
    const DistanceMatrix dist = all_pairs_distances(g);
    const Eigen::VectorXd sqrt_gamma = gam.cwiseSqrt();
    Eigen::VectorXd out(g.n());
    for (int x = 0; x < g.n(); ++x) {
        double acc = 0.0;
        for (int y = 0; y < g.n(); ++y) {
            if (y == x) continue;
            acc += sqrt_gamma(x) * sqrt_gamma(y) * (u(y) - u(x)) /
                   std::pow(static_cast<double>(dist(x, y)), alpha);
        }
        out(x) = cns * acc;
    }
    return out;
}

inline Eigen::VectorXd apply_fractional_laplacian(const Graph& g, double alpha,
                                                  const Eigen::VectorXd& u, double cns) {
    return apply_fractional_conductivity(g, Eigen::VectorXd::Ones(g.n()), alpha, u, cns);
}

}  // namespace fracwalk
