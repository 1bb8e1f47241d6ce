#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fracwalk/errors.hpp"
#include "fracwalk/gauge.hpp"
#include "fracwalk/graph.hpp"
#include "fracwalk/recovery.hpp"
#include "fracwalk/reconstruct.hpp"
#include "fracwalk/simulate.hpp"
#include "fracwalk/walk.hpp"

namespace fracwalk::io {

using nlohmann::json;

/// Tunables shared by the command-line pipeline.
struct ExperimentConfig {
    double alpha = 2.5;
    double theta = 1.0;
    double rank_tol = kDefaultRankTol;
    double int_tol = kDefaultIntTol;
    std::uint64_t seed = 0;
    long steps = 200000;
    int horizon = 3;
    long burn_in = 1000;
};

// --- canonical serialization ------------------------------------------------

namespace detail {

inline std::string format_double(double value) {
    if (!std::isfinite(value)) return "null";  // JSON has no inf/nan
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

inline void dump_value(const json& j, std::string& out, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string pad_inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += pad_inner + json(it.key()).dump() + ": ";
                dump_value(it.value(), out, indent + 1);
            }
            out += "\n" + pad + "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            bool first = true;
            for (const auto& item : j) {
                if (!first) out += ",\n";
                first = false;
                out += pad_inner;
                dump_value(item, out, indent + 1);
            }
            out += "\n" + pad + "]";
            return;
        }
        case json::value_t::number_float:
            out += format_double(j.get<double>());
            return;
        default:
            out += j.dump();
            return;
    }
}

}  // namespace detail

/// Deterministic JSON text: keys sorted, floats at up to 17 significant
/// digits via %.17g so round trips are lossless and reruns byte-identical.
inline std::string dump_canonical(const json& j) {
    std::string out;
    detail::dump_value(j, out, 0);
    out += "\n";
    return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream stream(path, std::ios::binary | std::ios::trunc);
    if (!stream) throw ParseError("cannot open for writing: " + path);
    stream << content;
    if (!stream) throw ParseError("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream stream(path, std::ios::binary);
    if (!stream) throw ParseError("cannot open: " + path);
    std::ostringstream buffer;
    buffer << stream.rdbuf();
    return buffer.str();
}

inline json parse_json_file(const std::string& path) {
    try {
        return json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

namespace detail {

// Field access on untrusted JSON surfaces ParseError, never a raw
// json exception.
template <typename F>
auto translated(const char* what, F&& access) {
    try {
        return access();
    } catch (const json::exception& e) {
        throw ParseError(std::string(what) + ": " + e.what());
    }
}

}  // namespace detail

// --- matrices and vectors ---------------------------------------------------

inline json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json matrix_to_json(const Eigen::MatrixXi& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Eigen::MatrixXd matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw ParseError("matrix must be a non-empty array of rows");
    const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
    if (cols == 0) throw ParseError("matrix rows must be non-empty arrays");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
        const auto& row = j.at(r);
        if (!row.is_array() || row.size() != cols) throw ParseError("ragged matrix rows");
        for (std::size_t c = 0; c < cols; ++c) {
            if (!row.at(c).is_number()) throw ParseError("matrix entries must be numbers");
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row.at(c).get<double>();
        }
    }
    return m;
}

inline json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

inline Eigen::VectorXd vector_from_json(const json& j) {
    if (!j.is_array()) throw ParseError("vector must be an array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j.at(i).is_number()) throw ParseError("vector entries must be numbers");
        v(static_cast<Eigen::Index>(i)) = j.at(i).get<double>();
    }
    return v;
}

/// Comma-separated rows of doubles, one row per line.
inline Eigen::MatrixXd read_csv_matrix(const std::string& path) {
    std::istringstream input(read_text_file(path));
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(input, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ParseError(path + ": bad CSV cell '" + cell + "'");
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError(path + ": ragged CSV rows");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(path + ": empty CSV matrix");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return m;
}

// --- graph files -------------------------------------------------------------

struct GraphFile {
    Graph graph;
    std::optional<Eigen::VectorXd> gamma;
    std::optional<double> alpha;
    std::optional<double> theta;
};

inline GraphFile parse_graph_json(const json& j) {
    return detail::translated("graph file", [&] {
        if (!j.is_object() || !j.contains("n") || !j.contains("observable") || !j.contains("edges"))
            throw ParseError("graph file needs fields n, observable, edges");
        if (!j.at("n").is_number_integer() || !j.at("observable").is_number_integer())
            throw ParseError("n and observable must be integers");
        const int n = j.at("n").get<int>();
        const int observable = j.at("observable").get<int>();
        std::vector<Edge> edges;
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2) throw ParseError("edges must be [i, j] pairs");
            edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        }
        GraphFile file{Graph(n, observable, std::move(edges)), std::nullopt, std::nullopt,
                       std::nullopt};
        if (j.contains("gamma") && !j.at("gamma").is_null()) {
            Eigen::VectorXd gamma = vector_from_json(j.at("gamma"));
            file.gamma = validated_conductivity(gamma, n);
        }
        if (j.contains("alpha") && !j.at("alpha").is_null()) {
            file.alpha = j.at("alpha").get<double>();
            if (!(*file.alpha > 0)) throw ParseError("alpha must be positive");
        }
        if (j.contains("theta") && !j.at("theta").is_null()) {
            file.theta = j.at("theta").get<double>();
            if (*file.theta < 0) throw ParseError("theta must be nonnegative");
        }
        return file;
    });
}

inline GraphFile parse_graph(const std::string& path) { return parse_graph_json(parse_json_file(path)); }

inline json graph_to_json(const Graph& g, const std::optional<Eigen::VectorXd>& gamma = std::nullopt,
                          std::optional<double> alpha = std::nullopt,
                          std::optional<double> theta = std::nullopt) {
    json j;
    j["n"] = g.n();
    j["observable"] = g.observable_count();
    json edges = json::array();
    for (auto [a, b] : g.edges()) edges.push_back(json::array({a, b}));
    j["edges"] = std::move(edges);
    if (gamma) j["gamma"] = vector_to_json(*gamma);
    if (alpha) j["alpha"] = *alpha;
    if (theta) j["theta"] = *theta;
    return j;
}

// --- observation data --------------------------------------------------------

inline json observation_to_json(const ObservationData& data) {
    json j;
    j["N"] = data.observable_count;
    j["K"] = data.horizon();
    json mats = json::array();
    for (const auto& m : data.mats) mats.push_back(matrix_to_json(m));
    j["mats"] = std::move(mats);
    return j;
}

inline ObservationData observation_from_json(const json& j) {
    return detail::translated("observation file", [&] {
        if (!j.is_object() || !j.contains("N") || !j.contains("mats"))
            throw ParseError("observation file needs fields N and mats");
        ObservationData data{j.at("N").get<int>(), {}};
        if (data.observable_count < 1) throw ParseError("N must be positive");
        for (const auto& m : j.at("mats")) {
            Eigen::MatrixXd mat = matrix_from_json(m);
            if (mat.rows() != data.observable_count || mat.cols() != data.observable_count)
                throw ParseError("observation matrices must be N x N");
            data.mats.push_back(std::move(mat));
        }
        if (data.mats.empty()) throw ParseError("observation file carries no matrices");
        if (j.contains("K") && j.at("K").get<int>() != data.horizon())
            throw ParseError("K does not match the number of matrices");
        return data;
    });
}

inline json empirical_to_json(const EmpiricalData& data) {
    json j = observation_to_json(data.estimate);
    json counts = json::array();
    for (long c : data.visit_counts) counts.push_back(c);
    j["visit_counts"] = std::move(counts);
    return j;
}

// --- transitions, representatives, reports -----------------------------------

inline json transition_to_json(const TransitionMatrix& p) {
    json j;
    j["N"] = p.observable_count;
    j["P"] = matrix_to_json(p.p);
    j["row_norms"] = vector_to_json(p.row_norms);
    return j;
}

inline json canonical_to_json(const CanonicalRepresentative& rep) {
    json j;
    j["N"] = rep.observable_count;
    j["r"] = rep.hidden_rank;
    j["Q"] = matrix_to_json(rep.q);
    j["R1"] = matrix_to_json(rep.r1);
    j["R2"] = matrix_to_json(rep.r2);
    return j;
}

inline CanonicalRepresentative canonical_from_json(const json& j) {
    return detail::translated("canonical representative file", [&] {
        CanonicalRepresentative rep;
        rep.observable_count = j.at("N").get<int>();
        rep.hidden_rank = j.at("r").get<int>();
        rep.q = matrix_from_json(j.at("Q"));
        if (rep.hidden_rank > 0) {
            rep.r1 = matrix_from_json(j.at("R1"));
            rep.r2 = matrix_from_json(j.at("R2"));
        } else {
            rep.r1 = Eigen::MatrixXd::Zero(rep.observable_count, 0);
            rep.r2 = Eigen::MatrixXd::Zero(0, rep.observable_count);
        }
        return rep;
    });
}

inline json admissibility_to_json(const AdmissibilityReport& report) {
    json j;
    j["a1_ok"] = report.a1_ok;
    j["a1_rank"] = report.a1_rank;
    j["a2_ok"] = report.a2_ok;
    j["leaf_set"] = report.leaf_set;
    j["max_leaf_eccentricity"] = report.max_leaf_eccentricity;
    return j;
}

inline const char* sign_class_name(SignClass s) {
    switch (s) {
        case SignClass::positive: return "positive";
        case SignClass::nonnegative: return "nonnegative";
        default: return "fails";
    }
}

inline json conditions_to_json(const ConditionReport& report) {
    json j;
    j["p1"] = sign_class_name(report.p1);
    j["p2_residual"] = report.p2_residual;
    j["p3_residual"] = report.p3_residual;
    j["p3_applicable"] = report.p3_applicable;
    j["overall"] = report.overall;
    return j;
}

inline json reconstruction_to_json(const ReconstructionResult& result) {
    json j;
    j["n"] = result.distances.size();
    json edges = json::array();
    for (auto [a, b] : result.edges) edges.push_back(json::array({a, b}));
    j["edges"] = std::move(edges);
    j["leaves"] = result.leaves;
    j["neighbours"] = result.neighbours;
    j["distances"] = matrix_to_json(result.distances.hops);
    j["sigma1"] = vector_to_json(result.sigma1);
    j["sigma2"] = vector_to_json(result.sigma2);
    j["rank_one_residual"] = result.rank_one_residual;
    j["scale_convention"] = result.scale_convention;
    return j;
}

// --- observation streams -----------------------------------------------------

/// One line per time step: the observable vertex id, or "-" when hidden.
inline std::string stream_to_text(const ObservationStream& stream) {
    std::string out;
    for (int step : stream.steps) {
        if (step == kHidden)
            out += "-\n";
        else
            out += std::to_string(step) + "\n";
    }
    return out;
}

inline ObservationStream stream_from_text(const std::string& text, int observable_count) {
    if (observable_count < 1) throw EmptyObservableSet("observable set must be non-empty");
    ObservationStream stream{observable_count, {}};
    std::istringstream input(text);
    std::string line;
    while (std::getline(input, line)) {
        if (line.empty()) continue;
        if (line == "-") {
            stream.steps.push_back(kHidden);
            continue;
        }
        int value = 0;
        try {
            value = std::stoi(line);
        } catch (const std::exception&) {
            throw ParseError("bad stream line '" + line + "'");
        }
        if (value < 0 || value >= observable_count)
            throw ParseError("stream id outside the observable range");
        stream.steps.push_back(value);
    }
    return stream;
}

}  // namespace fracwalk::io
