#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fracwalk/errors.hpp"
#include "fracwalk/walk.hpp"

namespace fracwalk {

/// Marker for time steps where the walker sits outside the observable set.
inline constexpr int kHidden = -1;

namespace detail {

// mt19937_64 stream mapped to [0,1) through the top 53 bits, so a seed pins
// the trajectory exactly on every platform.
class UnitRng {
public:
    explicit UnitRng(std::uint64_t seed) : gen_(seed) {}
    double next() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 gen_;
};

}  // namespace detail

/// Samples a trajectory of the chain: length steps + 1, starting at start,
/// each step drawn from the current row of P by inverse CDF.
inline std::vector<int> simulate_walk(const TransitionMatrix& p, int start, long steps,
                                      std::uint64_t seed) {
    const int n = p.size();
    if (start < 0 || start >= n) throw InvalidStart("start vertex outside [0, n)");
    if (steps < 1) throw InvalidArgument("need at least one step");
    detail::UnitRng rng(seed);
    std::vector<int> trajectory;
    trajectory.reserve(static_cast<std::size_t>(steps) + 1);
    int state = start;
    trajectory.push_back(state);
    for (long t = 0; t < steps; ++t) {
        const double u = rng.next();
        double acc = 0.0;
        int next = n - 1;
        for (int y = 0; y < n; ++y) {
            acc += p.p(state, y);
            if (u < acc) {
                next = y;
                break;
            }
        }
        state = next;
        trajectory.push_back(state);
    }
    return trajectory;
}

/// Observable record of a trajectory: vertex id when the walker is seen in B,
/// kHidden otherwise. Hidden identities never reach the stream.
struct ObservationStream {
    int observable_count = 0;
    std::vector<int> steps;

    long length() const { return static_cast<long>(steps.size()); }
};

inline ObservationStream observe(const std::vector<int>& trajectory, int observable_count) {
    if (observable_count == 0) throw EmptyObservableSet("observable set must be non-empty");
    if (observable_count < 0) throw InvalidArgument("observable count must be nonnegative");
    ObservationStream stream{observable_count, {}};
    stream.steps.reserve(trajectory.size());
    for (int v : trajectory) stream.steps.push_back(v < observable_count ? v : kHidden);
    return stream;
}

/// Empirical estimate of Lambda_K from one observation stream. Rows whose
/// observable vertex never occurs in the counting window are undefined, not
/// zero; visit_counts tells them apart.
struct EmpiricalData {
    ObservationData estimate;
    std::vector<long> visit_counts;
    int horizon = 0;

    bool row_defined(int x) const { return visit_counts.at(x) > 0; }
};

/// estimate[k-1](x,y) = #{t <= T-K : stream sees x at t and y at t+k}
///                    / #{t <= T-K : stream sees x at t}.
/// The denominator window is clamped at T-K for every k, so a single visit
/// count serves the whole horizon.
inline EmpiricalData estimate_observation_data(const ObservationStream& stream, int horizon) {
    if (horizon < 1) throw InvalidArgument("horizon must be at least 1");
    const long last_time = stream.length() - 1;
    if (last_time <= horizon) throw InvalidArgument("stream shorter than the horizon");
    const int n_obs = stream.observable_count;

    std::vector<long> visits(n_obs, 0);
    std::vector<Eigen::MatrixXd> counts(horizon, Eigen::MatrixXd::Zero(n_obs, n_obs));
    for (int step : stream.steps)
        if (step != kHidden && (step < 0 || step >= n_obs))
            throw InvalidArgument("stream id outside the observable range");
    for (long t = 0; t + horizon <= last_time; ++t) {
        const int x = stream.steps[static_cast<std::size_t>(t)];
        if (x == kHidden) continue;
        ++visits[x];
        for (int k = 1; k <= horizon; ++k) {
            const int y = stream.steps[static_cast<std::size_t>(t + k)];
            if (y != kHidden) counts[k - 1](x, y) += 1.0;
        }
    }

    EmpiricalData data{ObservationData{n_obs, {}}, visits, horizon};
    data.estimate.mats.reserve(horizon);
    for (int k = 0; k < horizon; ++k) {
        Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(n_obs, n_obs);
        for (int x = 0; x < n_obs; ++x)
            if (visits[x] > 0) mat.row(x) = counts[k].row(x) / static_cast<double>(visits[x]);
        data.estimate.mats.push_back(std::move(mat));
    }
    return data;
}

}  // namespace fracwalk
