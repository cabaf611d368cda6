#include "risknet/errors.hpp"
#include "risknet/experiment.hpp"

#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace risknet {

using nlohmann::json;

DynamicKind parse_dynamic_kind(std::string_view text) {
    if (text == "edge") return DynamicKind::Edge;
    if (text == "node") return DynamicKind::Node;
    if (text == "fair-edge") return DynamicKind::FairEdge;
    if (text == "fair-node") return DynamicKind::FairNode;
    throw ValidationError("dynamic must be one of edge, node, fair-edge, fair-node; got '" + std::string(text) + "'");
}

std::string to_string(DynamicKind kind) {
    switch (kind) {
        case DynamicKind::Edge: return "edge";
        case DynamicKind::Node: return "node";
        case DynamicKind::FairEdge: return "fair-edge";
        case DynamicKind::FairNode: return "fair-node";
    }
    return "?";
}

GraphKind ExperimentConfig::graph_kind() const {
    try {
        return parse_graph_kind(graph, n_agents);
    } catch (const InvalidParams& e) {
        throw ValidationError(std::string("graph: ") + e.what());
    }
}

Market ExperimentConfig::market() const {
    try {
        return validate_basis(SecurityBasis(basis));
    } catch (const Error& e) {
        throw ValidationError(std::string("market: ") + e.what());
    }
}

void ExperimentConfig::validate() const {
    if (n_agents < 2) throw ValidationError("N must be at least 2");
    if (trials < 1) throw ValidationError("trials must be at least 1");
    if (max_steps < 0) throw ValidationError("max_steps must be non-negative");
    if (!(stop_tol >= 0.0)) throw ValidationError("stop_tol must be non-negative");
    const Market m = market();
    if (position_low.size() != m.k() || position_high.size() != m.k()) {
        throw ValidationError("positions: low/high need one entry per security");
    }
    if (!(position_low.array() < position_high.array()).all()) {
        throw ValidationError("positions: low must be below high in every coordinate");
    }
    if (!(affinity_low > 0.0) || affinity_high < affinity_low) {
        throw ValidationError("risk.affinity must be positive with low <= high");
    }
    auto check_belief = [&](const Vector& b, const std::string& what) {
        try {
            RiskSpec::entropic(1.0, b).validate_for(m);
        } catch (const Error& e) {
            throw ValidationError(what + ": " + e.what());
        }
    };
    if (belief) check_belief(*belief, "risk.belief");
    if (!beliefs.empty()) {
        if (static_cast<int>(beliefs.size()) != n_agents) throw ValidationError("risk.beliefs needs one belief per agent");
        for (const auto& b : beliefs) check_belief(b, "risk.beliefs");
    }
    const GraphKind kind = graph_kind();
    try {
        const Graph g = generate_graph(kind, 0);
        if (!graph_connected(g)) throw ValidationError("graph must be connected");
    } catch (const InvalidParams& e) {
        throw ValidationError(std::string("graph: ") + e.what());
    }
}

namespace {

void reject_unknown(const json& object, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!object.is_object()) throw ParseError(where + " must be an object");
    for (const auto& [key, value] : object.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            throw ParseError("unknown key \"" + key + "\"" + (where.empty() ? "" : " in " + where));
        }
    }
}

Vector to_vector(const json& value, const std::string& field) {
    if (!value.is_array()) throw ParseError(field + " must be an array of numbers");
    Vector v(static_cast<Eigen::Index>(value.size()));
    for (std::size_t i = 0; i < value.size(); ++i) {
        if (!value[i].is_number()) throw ParseError(field + " must contain numbers");
        v[static_cast<Eigen::Index>(i)] = value[i].get<double>();
    }
    return v;
}

template <typename T>
T get_field(const json& object, const char* key, const std::string& field) {
    try {
        return object.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError("field " + field + ": " + e.what());
    }
}

Vector bound_vector(const json& value, Eigen::Index k, const std::string& field) {
    if (value.is_number()) return Vector::Constant(k, value.get<double>());
    return to_vector(value, field);
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
        throw ParseError("line " + std::to_string(line) + ": " + e.what());
    }
    reject_unknown(root, {"N", "graph", "dynamic", "seed", "trials", "max_steps", "stop_tol", "market", "risk",
                          "positions"},
                   "");

    ExperimentConfig config;
    if (root.contains("market")) {
        const json& market = root["market"];
        reject_unknown(market, {"outcomes", "basis"}, "market");
        int outcomes = market.contains("outcomes") ? get_field<int>(market, "outcomes", "market.outcomes") : 3;
        if (outcomes < 2) throw ValidationError("market.outcomes must be at least 2");
        if (market.contains("basis")) {
            const json& rows = market["basis"];
            if (!rows.is_array() || rows.empty()) throw ParseError("market.basis must be an array of rows");
            const auto k = rows[0].is_array() ? rows[0].size() : 0;
            if (rows.size() != static_cast<std::size_t>(outcomes)) {
                throw ValidationError("market.basis needs one row per outcome");
            }
            config.basis = Matrix(outcomes, static_cast<Eigen::Index>(k));
            for (std::size_t r = 0; r < rows.size(); ++r) {
                const Vector row = to_vector(rows[r], "market.basis");
                if (static_cast<std::size_t>(row.size()) != k || k == 0) {
                    throw ValidationError("market.basis must be rectangular");
                }
                config.basis.row(static_cast<Eigen::Index>(r)) = row.transpose();
            }
        } else {
            config.basis = Matrix::Identity(outcomes, outcomes);
        }
    }
    const Eigen::Index k = config.basis.cols();
    config.position_low = Vector::Constant(k, -50.0);
    config.position_high = Vector::Constant(k, 50.0);

    if (root.contains("N")) config.n_agents = get_field<int>(root, "N", "N");
    if (root.contains("graph")) config.graph = get_field<std::string>(root, "graph", "graph");
    if (root.contains("dynamic")) config.dynamic = parse_dynamic_kind(get_field<std::string>(root, "dynamic", "dynamic"));
    if (root.contains("seed")) config.seed = get_field<std::uint64_t>(root, "seed", "seed");
    if (root.contains("trials")) config.trials = get_field<int>(root, "trials", "trials");
    if (root.contains("max_steps")) config.max_steps = get_field<int>(root, "max_steps", "max_steps");
    if (root.contains("stop_tol")) config.stop_tol = get_field<double>(root, "stop_tol", "stop_tol");

    if (root.contains("risk")) {
        const json& risk = root["risk"];
        reject_unknown(risk, {"kind", "affinity", "belief", "beliefs"}, "risk");
        if (risk.contains("kind") && get_field<std::string>(risk, "kind", "risk.kind") != "entropic") {
            throw ValidationError("risk.kind must be \"entropic\"");
        }
        if (risk.contains("affinity")) {
            const json& b = risk["affinity"];
            if (b.is_number()) {
                config.affinity_low = config.affinity_high = b.get<double>();
            } else {
                const Vector range = to_vector(b, "risk.affinity");
                if (range.size() != 2) throw ValidationError("risk.affinity range needs [low, high]");
                config.affinity_low = range[0];
                config.affinity_high = range[1];
            }
        }
        if (risk.contains("belief")) config.belief = to_vector(risk["belief"], "risk.belief");
        if (risk.contains("beliefs")) {
            const json& all = risk["beliefs"];
            if (!all.is_array()) throw ParseError("risk.beliefs must be an array of arrays");
            for (const auto& b : all) config.beliefs.push_back(to_vector(b, "risk.beliefs"));
        }
    }
    if (root.contains("positions")) {
        const json& pos = root["positions"];
        reject_unknown(pos, {"low", "high"}, "positions");
        if (pos.contains("low")) config.position_low = bound_vector(pos["low"], k, "positions.low");
        if (pos.contains("high")) config.position_high = bound_vector(pos["high"], k, "positions.high");
    }
    config.validate();
    return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

}  // namespace risknet
