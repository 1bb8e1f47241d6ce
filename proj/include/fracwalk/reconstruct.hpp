#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "fracwalk/common.hpp"
#include "fracwalk/errors.hpp"
#include "fracwalk/graph.hpp"

namespace fracwalk {

/// Kernel of the form f(x,y) = sigma1(x) sigma2(y) / d(x,y) off the diagonal.
/// The diagonal carries no information and is stored as zero.
struct KernelMatrix {
    Eigen::MatrixXd f;

    int size() const { return static_cast<int>(f.rows()); }
};

inline KernelMatrix make_kernel(Eigen::MatrixXd f) {
    const int n = static_cast<int>(f.rows());
    if (f.cols() != n) throw DimensionMismatch("kernel must be square");
    for (int x = 0; x < n; ++x) {
        f(x, x) = 0.0;
        for (int y = 0; y < n; ++y)
            if (y != x && !(f(x, y) > 0))
                throw NonpositiveEntry("kernel entries must be positive off the diagonal");
    }
    return KernelMatrix{std::move(f)};
}

/// f(x,y) = (g1(x) C(x,y) g2(y))^(1/alpha), which factors as
/// (g1 gamma^1/2)^(1/alpha)(x) * (g2 gamma^1/2)^(1/alpha)(y) / d(x,y) for
/// fractional-conductivity kernels C.
inline KernelMatrix kernel_from_interaction(const Eigen::MatrixXd& c, double alpha,
                                            const Eigen::VectorXd& g1, const Eigen::VectorXd& g2) {
    const int n = static_cast<int>(c.rows());
    if (c.cols() != n) throw DimensionMismatch("interaction matrix must be square");
    if (g1.size() != n || g2.size() != n)
        throw DimensionMismatch("gauge vectors must have one entry per vertex");
    if (alpha <= 0) throw InvalidArgument("alpha must be positive");
    for (int x = 0; x < n; ++x)
        if (!(g1(x) > 0) || !(g2(x) > 0)) throw NonpositiveEntry("gauge vectors must be positive");
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(n, n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            if (y == x) continue;
            if (!(c(x, y) > 0))
                throw NonpositiveEntry("interaction entries must be positive off the diagonal");
            f(x, y) = std::pow(g1(x) * c(x, y) * g2(y), 1.0 / alpha);
        }
    return KernelMatrix{std::move(f)};
}

namespace detail {

// Witness sets absorb floating-point ties around the extrema.
inline constexpr double kWitnessTol = 1e-9;

// Any cutoff strictly between 4/3 and 3/2 separates the leaf pairs whose
// ratio identifies roles (R = 2M*/(M*+1) with M* >= 3) from the rest.
inline constexpr double kRoleCutoff = 1.45;

struct RatioScan {
    double min_value = 0.0;
    double max_value = 0.0;
    std::vector<int> argmin;
    std::vector<int> argmax;

    double ratio() const { return max_value / min_value; }
};

inline void check_triple(int n, int a, int b, int c) {
    if (a < 0 || a >= n || b < 0 || b >= n || c < 0 || c >= n || a == b || b == c || a == c)
        throw DegenerateTriple("triple points must be distinct vertices");
}

// F_abc over X \ {a,b}: equals q_abc * d(b,x) / d(a,x) with the unknown
// factor q_abc cancelling in every downstream ratio.
inline RatioScan scan_f_ratio(const KernelMatrix& fm, int a, int b, int c) {
    const int n = fm.size();
    check_triple(n, a, b, c);
    RatioScan scan;
    scan.min_value = std::numeric_limits<double>::infinity();
    scan.max_value = -std::numeric_limits<double>::infinity();
    std::vector<double> values(n, 0.0);
    for (int x = 0; x < n; ++x) {
        if (x == a || x == b) continue;
        const double value = fm.f(a, x) * fm.f(b, c) / (fm.f(b, x) * fm.f(a, c));
        values[x] = value;
        scan.min_value = std::min(scan.min_value, value);
        scan.max_value = std::max(scan.max_value, value);
    }
    for (int x = 0; x < n; ++x) {
        if (x == a || x == b) continue;
        if (values[x] >= scan.max_value * (1.0 - kWitnessTol)) scan.argmax.push_back(x);
        if (values[x] <= scan.min_value * (1.0 + kWitnessTol)) scan.argmin.push_back(x);
    }
    return scan;
}

inline int default_third_point(int n, int a, int b) {
    for (int c = 0; c < n; ++c)
        if (c != a && c != b) return c;
    throw DegeneratePair("no third vertex available");
}

inline bool is_perfect_square(double value, double tol) {
    if (!is_near_integer(value, tol)) return false;
    const long long as_int = std::llround(value);
    if (as_int < 0) return false;
    const long long root = std::llround(std::sqrt(static_cast<double>(as_int)));
    return root * root == as_int;
}

}  // namespace detail

inline Eigen::VectorXd f_ratio(const KernelMatrix& fm, int a, int b, int c) {
    const int n = fm.size();
    detail::check_triple(n, a, b, c);
    Eigen::VectorXd values = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
    for (int x = 0; x < n; ++x) {
        if (x == a || x == b) continue;
        values(x) = fm.f(a, x) * fm.f(b, c) / (fm.f(b, x) * fm.f(a, c));
    }
    return values;
}

/// R_ab = max F_abc / min F_abc, independent of the third point c.
inline double pair_ratio(const KernelMatrix& fm, int a, int b) {
    const int n = fm.size();
    if (a < 0 || a >= n || b < 0 || b >= n || a == b)
        throw InvalidArgument("pair must consist of two distinct vertices");
    if (n < 3) throw DegeneratePair("ratio needs a third vertex");
    return detail::scan_f_ratio(fm, a, b, detail::default_third_point(n, a, b)).ratio();
}

/// Pairwise ratio statistics and the leaf / leaf-neighbour split they induce.
struct PairStatistics {
    Eigen::MatrixXd ratio;                            // R_ab, zero diagonal
    std::vector<Edge> fractional_pairs;               // pairs with R not an integer
    std::vector<int> leaves;                          // L
    std::vector<int> neighbours;                      // Nb, the leaves' unique neighbours
    std::map<int, int> own_neighbour;                 // leaf -> its neighbour
    std::vector<std::vector<std::vector<int>>> argmin_sets;  // per ordered pair (a,b), a < b
    std::vector<std::vector<std::vector<int>>> argmax_sets;
};

/// Splits the non-integer-ratio pairs into leaves and their neighbours.
///
/// One pair with R > 4/3 is disambiguated through the witness-set test of the
/// geometry (whose side the maximizers' own maximizers fall on); the split
/// then propagates through the perfect-square laws: leaf-leaf and
/// neighbour-neighbour ratios are perfect squares, a leaf against a foreign
/// neighbour gives d^2 - 1, never a perfect square.
inline PairStatistics classify_pairs(const KernelMatrix& fm, double tol_int = kDefaultIntTol) {
    const int n = fm.size();
    if (n < 3) throw DegeneratePair("classification needs at least three vertices");
    PairStatistics stats;
    stats.ratio = Eigen::MatrixXd::Zero(n, n);
    stats.argmin_sets.assign(n, std::vector<std::vector<int>>(n));
    stats.argmax_sets.assign(n, std::vector<std::vector<int>>(n));

    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            const auto scan = detail::scan_f_ratio(fm, a, b, detail::default_third_point(n, a, b));
            stats.ratio(a, b) = scan.ratio();
            stats.ratio(b, a) = scan.ratio();
            stats.argmin_sets[a][b] = scan.argmin;
            stats.argmax_sets[a][b] = scan.argmax;
            if (!is_near_integer(scan.ratio(), tol_int)) stats.fractional_pairs.push_back({a, b});
        }

    Edge anchor_pair{-1, -1};
    double best_ratio = 0.0;
    for (const Edge& pair : stats.fractional_pairs) {
        const double r = stats.ratio(pair.first, pair.second);
        if (r > detail::kRoleCutoff && r > best_ratio) {
            best_ratio = r;
            anchor_pair = pair;
        }
    }
    if (anchor_pair.first < 0)
        throw NotClassifiable("no leaf pair with ratio above 4/3; the graph violates (A2)");

    // Witness test on the anchor pair (a, b): collect the maximizers of
    // F_{y, xlow, a} over all maximizers y of F_abc. The pair meets that set
    // exactly when a is the neighbour and b the leaf.
    const auto [a, b] = anchor_pair;
    const auto base = detail::scan_f_ratio(fm, a, b, detail::default_third_point(n, a, b));
    const int x_low = *std::min_element(base.argmin.begin(), base.argmin.end());
    bool touches_pair = false;
    for (int y : base.argmax) {
        const auto z_scan = detail::scan_f_ratio(fm, y, x_low, a);
        for (int z : z_scan.argmax)
            if (z == a || z == b) touches_pair = true;
    }
    const int anchor_leaf = touches_pair ? b : a;
    const int anchor_neighbour = touches_pair ? a : b;

    std::vector<char> is_leaf(n, 0), is_neighbour(n, 0);
    is_leaf[anchor_leaf] = 1;
    is_neighbour[anchor_neighbour] = 1;
    stats.own_neighbour[anchor_leaf] = anchor_neighbour;

    for (const Edge& pair : stats.fractional_pairs) {
        if (pair == anchor_pair) continue;
        const auto [u, v] = pair;
        if (u == anchor_leaf || v == anchor_leaf)
            throw NotClassifiable("a leaf appears in two leaf pairs");
        int leaf = -1, neighbour = -1;
        if (u == anchor_neighbour || v == anchor_neighbour) {
            neighbour = (u == anchor_neighbour) ? u : v;
            leaf = (u == anchor_neighbour) ? v : u;
        } else {
            const bool u_square = detail::is_perfect_square(stats.ratio(anchor_leaf, u), tol_int);
            const bool v_square = detail::is_perfect_square(stats.ratio(anchor_leaf, v), tol_int);
            if (u_square == v_square)
                throw NotClassifiable("perfect-square propagation is inconsistent");
            leaf = u_square ? u : v;
            neighbour = u_square ? v : u;
        }
        if (is_neighbour[leaf] || is_leaf[neighbour])
            throw NotClassifiable("conflicting leaf / neighbour roles");
        is_leaf[leaf] = 1;
        is_neighbour[neighbour] = 1;
        stats.own_neighbour[leaf] = neighbour;
    }

    for (int x = 0; x < n; ++x) {
        if (is_leaf[x] && is_neighbour[x])
            throw NotClassifiable("conflicting leaf / neighbour roles");
        if (is_leaf[x]) stats.leaves.push_back(x);
        if (is_neighbour[x]) stats.neighbours.push_back(x);
    }
    if (stats.leaves.size() < 2)
        throw NotClassifiable("fewer than two leaves identified; the graph violates (A2)");
    return stats;
}

namespace detail {

inline int round_distance(double value, double tol_int) {
    if (!is_near_integer(value, tol_int))
        throw NonIntegerDistance("recovered distance " + std::to_string(value) +
                                 " is not close to an integer");
    const int rounded = static_cast<int>(std::llround(value));
    if (rounded < 1) throw MetricViolation("recovered distance below one");
    return rounded;
}

inline void validate_metric(const Eigen::MatrixXi& d) {
    const int n = static_cast<int>(d.rows());
    for (int x = 0; x < n; ++x) {
        if (d(x, x) != 0) throw MetricViolation("nonzero diagonal");
        for (int y = 0; y < n; ++y) {
            if (d(x, y) != d(y, x)) throw MetricViolation("asymmetric distances");
            if (x != y && d(x, y) < 1) throw MetricViolation("distance below one");
        }
    }
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            for (int z = 0; z < n; ++z)
                if (d(x, z) > d(x, y) + d(y, z)) throw MetricViolation("triangle inequality fails");
}

}  // namespace detail

/// Full hop metric from the kernel and a successful classification.
///
/// Leaf-leaf distances come from 1 + sqrt(R); the rows of two reference
/// leaves follow from the one-sided ratio identity (d-1)/d; everything else
/// comes from the general three-point formula. Every value must round to an
/// integer within tol_int and the rounded matrix must be a graph metric.
inline DistanceMatrix recover_distances(const KernelMatrix& fm, const PairStatistics& stats,
                                        double tol_int = kDefaultIntTol) {
    const int n = fm.size();
    if (stats.leaves.size() < 2) throw NotClassifiable("need two classified leaves");
    Eigen::MatrixXi d = Eigen::MatrixXi::Constant(n, n, -1);
    for (int x = 0; x < n; ++x) d(x, x) = 0;

    for (int la : stats.leaves)
        for (int lb : stats.leaves) {
            if (la >= lb) continue;
            const int dist = detail::round_distance(1.0 + std::sqrt(stats.ratio(la, lb)), tol_int);
            d(la, lb) = dist;
            d(lb, la) = dist;
        }

    const int ref_a = stats.leaves[0];
    const int ref_c = stats.leaves[1];
    // Row of a reference leaf: F_abc(x) * d(b,c) / d(a,c) = (d(a,x) - 1) / d(a,x)
    // with b the leaf's own neighbour and c another leaf.
    const auto fill_leaf_row = [&](int leaf, int other_leaf) {
        const int nb = stats.own_neighbour.at(leaf);
        const int leaf_to_other = d(leaf, other_leaf);
        const int nb_to_other = leaf_to_other - 1;
        if (nb_to_other < 1) throw MetricViolation("reference leaves are too close");
        const Eigen::VectorXd ratios = f_ratio(fm, leaf, nb, other_leaf);
        for (int x = 0; x < n; ++x) {
            if (x == leaf || d(leaf, x) >= 0) continue;
            if (x == nb) {
                d(leaf, x) = 1;
                d(x, leaf) = 1;
                continue;
            }
            const double one_sided =
                ratios(x) * static_cast<double>(nb_to_other) / static_cast<double>(leaf_to_other);
            if (!(one_sided < 1.0)) throw MetricViolation("leaf-row ratio must stay below one");
            const int dist = detail::round_distance(1.0 / (1.0 - one_sided), tol_int);
            d(leaf, x) = dist;
            d(x, leaf) = dist;
        }
    };
    fill_leaf_row(ref_a, ref_c);
    fill_leaf_row(ref_c, ref_a);

    const double ref_dist = static_cast<double>(d(ref_a, ref_c));
    for (int y = 0; y < n; ++y) {
        if (y == ref_a || y == ref_c) continue;
        const Eigen::VectorXd ratios = f_ratio(fm, ref_a, y, ref_c);
        for (int x = 0; x < n; ++x) {
            if (x == y || x == ref_a || x == ref_c) continue;
            const double value =
                ratios(x) * static_cast<double>(d(y, ref_c)) * static_cast<double>(d(ref_a, x)) / ref_dist;
            const int dist = detail::round_distance(value, tol_int);
            if (d(y, x) >= 0 && d(y, x) != dist)
                throw MetricViolation("inconsistent distance between two recovery routes");
            d(y, x) = dist;
        }
    }
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            if (d(x, y) < 0) throw MetricViolation("distance left undetermined");
    detail::validate_metric(d);
    return DistanceMatrix{std::move(d)};
}

inline std::vector<Edge> edges_from_distances(const DistanceMatrix& d) {
    std::vector<Edge> edges;
    for (int x = 0; x < d.size(); ++x)
        for (int y = x + 1; y < d.size(); ++y)
            if (d(x, y) == 1) edges.push_back({x, y});
    return edges;
}

struct SigmaFactors {
    Eigen::VectorXd sigma1;
    Eigen::VectorXd sigma2;
    double rank_one_residual = 0.0;
};

/// Rank-one factorization sigma = sigma1 sigma2^T with sigma1(0) = 1.
inline SigmaFactors rank_one_factor(const Eigen::MatrixXd& sigma) {
    const int n = static_cast<int>(sigma.rows());
    if (sigma.cols() != n || n < 1) throw DimensionMismatch("sigma matrix must be square");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sigma, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd u = svd.matrixU().col(0);
    Eigen::VectorXd v = svd.singularValues()(0) * svd.matrixV().col(0);
    if (u(0) == 0) throw RankDefect("factorization cannot satisfy the scale convention");
    v *= u(0);
    u /= u(0);
    SigmaFactors factors{std::move(u), std::move(v), 0.0};
    const double scale = max_abs(sigma);
    factors.rank_one_residual =
        max_abs(Eigen::MatrixXd(sigma - factors.sigma1 * factors.sigma2.transpose())) /
        (scale > 0 ? scale : 1.0);
    if (factors.rank_one_residual > 1e-8)
        throw RankDefect("rank-one residual above tolerance");
    return factors;
}

/// sigma1(x) sigma2(y) from the kernel and the recovered metric. Off-diagonal
/// entries are f(x,y) d(x,y); the diagonal follows from the three-point
/// identity and is independent of which two helper vertices are used.
inline SigmaFactors recover_sigma(const KernelMatrix& fm, const DistanceMatrix& d) {
    const int n = fm.size();
    if (d.size() != n) throw DimensionMismatch("kernel and metric sizes differ");
    if (n < 3) throw DegeneratePair("sigma recovery needs three vertices");
    Eigen::MatrixXd sigma(n, n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            if (x != y) sigma(x, y) = fm.f(x, y) * static_cast<double>(d(x, y));
    for (int x = 0; x < n; ++x) {
        int helper_y = (x == 0) ? 1 : 0;
        int helper_z = (x <= 1) ? 2 : 1;
        sigma(x, x) = sigma(helper_y, x) * sigma(x, helper_z) / sigma(helper_y, helper_z);
    }
    SigmaFactors factors = rank_one_factor(sigma);
    for (int x = 0; x < n; ++x)
        if (!(factors.sigma1(x) > 0) || !(factors.sigma2(x) > 0))
            throw RankDefect("sigma factors must be positive");
    return factors;
}

/// End-to-end output of the geometric reconstruction.
struct ReconstructionResult {
    DistanceMatrix distances;
    std::vector<Edge> edges;
    std::vector<int> leaves;
    std::vector<int> neighbours;
    Eigen::VectorXd sigma1;
    Eigen::VectorXd sigma2;
    double rank_one_residual = 0.0;
    std::string scale_convention = "sigma1[0] = 1";
};

inline ReconstructionResult reconstruct_full(const KernelMatrix& fm,
                                             double tol_int = kDefaultIntTol) {
    const PairStatistics stats = classify_pairs(fm, tol_int);
    DistanceMatrix distances = recover_distances(fm, stats, tol_int);
    std::vector<Edge> edges = edges_from_distances(distances);
    SigmaFactors sigma = recover_sigma(fm, distances);
    ReconstructionResult result;
    result.distances = std::move(distances);
    result.edges = std::move(edges);
    result.leaves = stats.leaves;
    result.neighbours = stats.neighbours;
    result.sigma1 = std::move(sigma.sigma1);
    result.sigma2 = std::move(sigma.sigma2);
    result.rank_one_residual = sigma.rank_one_residual;
    return result;
}

}  // namespace fracwalk
