#include "risknet/graph.hpp"

#include "risknet/errors.hpp"
#include "risknet/union_find.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <queue>
#include <set>

namespace risknet {

void Graph::validate() const {
    if (n_vertices < 0) throw InvalidParams("negative vertex count");
    std::set<std::pair<int, int>> seen;
    for (auto [a, b] : edges) {
        if (a < 0 || b < 0 || a >= n_vertices || b >= n_vertices) throw InvalidParams("edge endpoint out of range");
        if (a == b) throw InvalidParams("self-loop");
        if (!seen.insert(std::minmax(a, b)).second) throw InvalidParams("parallel edge");
    }
}

std::vector<int> Graph::degrees() const {
    std::vector<int> deg(static_cast<std::size_t>(n_vertices), 0);
    for (auto [a, b] : edges) {
        ++deg[static_cast<std::size_t>(a)];
        ++deg[static_cast<std::size_t>(b)];
    }
    return deg;
}

std::vector<std::vector<int>> Graph::adjacency() const {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n_vertices));
    for (auto [a, b] : edges) {
        adj[static_cast<std::size_t>(a)].push_back(b);
        adj[static_cast<std::size_t>(b)].push_back(a);
    }
    return adj;
}

int GraphKind::n_vertices() const {
    switch (family) {
        case GraphFamily::Complete:
        case GraphFamily::Path:
        case GraphFamily::Cycle:
        case GraphFamily::BarabasiAlbert:
            return first;
        case GraphFamily::CompleteBipartite:
            return first + second;
        case GraphFamily::Hypercube:
            return first >= 0 && first < 30 ? 1 << first : -1;
    }
    return -1;
}

std::string GraphKind::to_string() const {
    switch (family) {
        case GraphFamily::Complete: return "complete:" + std::to_string(first);
        case GraphFamily::Path: return "path:" + std::to_string(first);
        case GraphFamily::Cycle: return "cycle:" + std::to_string(first);
        case GraphFamily::CompleteBipartite:
            return "bipartite:" + std::to_string(first) + "," + std::to_string(second);
        case GraphFamily::Hypercube: return "hypercube:" + std::to_string(first);
        case GraphFamily::BarabasiAlbert: return "ba:" + std::to_string(first) + "," + std::to_string(second);
    }
    return "?";
}

namespace {

std::vector<int> parse_ints(std::string_view text) {
    std::vector<int> out;
    while (!text.empty()) {
        const auto comma = text.find(',');
        const std::string_view token = text.substr(0, comma);
        int value = 0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc() || ptr != token.data() + token.size()) {
            throw InvalidParams("bad graph parameter '" + std::string(token) + "'");
        }
        out.push_back(value);
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

}  // namespace

GraphKind parse_graph_kind(std::string_view text, std::optional<int> n_vertices) {
    const auto colon = text.find(':');
    const std::string name(text.substr(0, colon));
    const std::vector<int> params =
        colon == std::string_view::npos ? std::vector<int>{} : parse_ints(text.substr(colon + 1));
    auto need = [&](std::size_t full) {
        // Either every parameter is given, or the vertex count comes from n_vertices.
        if (params.size() == full) return true;
        if (n_vertices && params.size() + 1 == full) return false;
        throw InvalidParams("graph '" + std::string(text) + "' has the wrong number of parameters");
    };

    GraphKind kind;
    if (name == "complete" || name == "path" || name == "cycle" || name == "star") {
        const int n = need(1) ? params[0] : *n_vertices;
        if (name == "complete") kind = GraphKind::complete(n);
        else if (name == "path") kind = GraphKind::path(n);
        else if (name == "cycle") kind = GraphKind::cycle(n);
        else kind = GraphKind::star(n);
    } else if (name == "bipartite") {
        kind = need(2) ? GraphKind::complete_bipartite(params[0], params[1])
                       : GraphKind::complete_bipartite(*n_vertices - params[0], params[0]);
    } else if (name == "hypercube") {
        int dims = 0;
        if (need(1)) {
            dims = params[0];
        } else {
            while ((1 << dims) < *n_vertices && dims < 30) ++dims;
        }
        kind = GraphKind::hypercube(dims);
    } else if (name == "ba" || name == "barabasi-albert") {
        kind = need(2) ? GraphKind::barabasi_albert(params[0], params[1])
                       : GraphKind::barabasi_albert(*n_vertices, params[0]);
    } else {
        throw InvalidParams("unknown graph kind '" + name + "'");
    }
    if (n_vertices && kind.n_vertices() != *n_vertices) {
        throw InvalidParams("graph '" + std::string(text) + "' has " + std::to_string(kind.n_vertices()) +
                            " vertices, expected " + std::to_string(*n_vertices));
    }
    return kind;
}

Graph generate_graph(const GraphKind& kind, std::uint64_t seed) {
    Rng rng(seed);
    return generate_graph(kind, rng);
}

Graph generate_graph(const GraphKind& kind, Rng& rng) {
    Graph g;
    const int a = kind.first;
    const int b = kind.second;
    switch (kind.family) {
        case GraphFamily::Complete:
            if (a < 1) throw InvalidParams("complete graph needs N >= 1");
            g.n_vertices = a;
            for (int i = 0; i < a; ++i)
                for (int j = i + 1; j < a; ++j) g.edges.emplace_back(i, j);
            break;
        case GraphFamily::Path:
            if (a < 2) throw InvalidParams("path needs N >= 2");
            g.n_vertices = a;
            for (int i = 0; i + 1 < a; ++i) g.edges.emplace_back(i, i + 1);
            break;
        case GraphFamily::Cycle:
            if (a < 3) throw InvalidParams("cycle needs N >= 3");
            g.n_vertices = a;
            for (int i = 0; i < a; ++i) g.edges.emplace_back(std::min(i, (i + 1) % a), std::max(i, (i + 1) % a));
            break;
        case GraphFamily::CompleteBipartite:
            if (a < 1 || b < 1) throw InvalidParams("complete bipartite graph needs M, K >= 1");
            g.n_vertices = a + b;
            for (int i = 0; i < a; ++i)
                for (int j = 0; j < b; ++j) g.edges.emplace_back(i, a + j);
            break;
        case GraphFamily::Hypercube:
            if (a < 1 || a > 20) throw InvalidParams("hypercube dimension must be in [1, 20]");
            g.n_vertices = 1 << a;
            for (int v = 0; v < g.n_vertices; ++v)
                for (int bit = 0; bit < a; ++bit) {
                    const int u = v ^ (1 << bit);
                    if (v < u) g.edges.emplace_back(v, u);
                }
            break;
        case GraphFamily::BarabasiAlbert: {
            if (b < 1 || a <= b) throw InvalidParams("Barabasi-Albert graph needs 1 <= m < N");
            g.n_vertices = a;
            std::vector<double> degree(static_cast<std::size_t>(a), 0.0);
            for (int i = 0; i < b; ++i)
                for (int j = i + 1; j < b; ++j) {
                    g.edges.emplace_back(i, j);
                    degree[static_cast<std::size_t>(i)] += 1.0;
                    degree[static_cast<std::size_t>(j)] += 1.0;
                }
            for (int v = b; v < a; ++v) {
                std::vector<double> weight(degree.begin(), degree.begin() + v);
                const bool all_zero = std::all_of(weight.begin(), weight.end(), [](double w) { return w == 0.0; });
                if (all_zero) std::fill(weight.begin(), weight.end(), 1.0);
                std::vector<int> targets;
                for (int e = 0; e < b; ++e) {
                    const int t = static_cast<int>(rng.discrete(weight));
                    weight[static_cast<std::size_t>(t)] = 0.0;
                    targets.push_back(t);
                }
                for (int t : targets) {
                    g.edges.emplace_back(t, v);
                    degree[static_cast<std::size_t>(t)] += 1.0;
                    degree[static_cast<std::size_t>(v)] += 1.0;
                }
            }
            break;
        }
    }
    return g;
}

Graph erdos_renyi(int n, double p, Rng& rng) {
    if (n < 1 || !(p >= 0.0 && p <= 1.0)) throw InvalidParams("Erdos-Renyi graph needs n >= 1 and p in [0, 1]");
    Graph g;
    g.n_vertices = n;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.uniform() < p) g.edges.emplace_back(i, j);
    return g;
}

Matrix laplacian(const Graph& g) {
    g.validate();
    Matrix l = Matrix::Zero(g.n_vertices, g.n_vertices);
    for (auto [a, b] : g.edges) {
        l(a, a) += 1.0;
        l(b, b) += 1.0;
        l(a, b) -= 1.0;
        l(b, a) -= 1.0;
    }
    return l;
}

Vector laplacian_spectrum(const Graph& g) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(laplacian(g), Eigen::EigenvaluesOnly);
    return eig.eigenvalues();
}

double lambda2_numeric(const Graph& g) {
    if (g.n_vertices < 2) throw InvalidParams("algebraic connectivity needs at least two vertices");
    const double value = laplacian_spectrum(g)[1];
    return std::abs(value) <= 1e-9 ? 0.0 : value;
}

double lambda2_closed_form(const GraphKind& kind) {
    const double a = kind.first;
    switch (kind.family) {
        case GraphFamily::Complete: return a;
        case GraphFamily::Path: return 2.0 * (1.0 - std::cos(std::numbers::pi / a));
        case GraphFamily::Cycle: return 2.0 * (1.0 - std::cos(2.0 * std::numbers::pi / a));
        case GraphFamily::CompleteBipartite: return std::min(kind.first, kind.second);
        case GraphFamily::Hypercube: return 2.0;
        case GraphFamily::BarabasiAlbert: break;
    }
    throw UnsupportedKind("no closed-form algebraic connectivity for " + kind.to_string());
}

bool graph_connected(const Graph& g) {
    if (g.n_vertices == 0) return false;
    UnionFind uf(g.n_vertices);
    for (auto [a, b] : g.edges) uf.unite(a, b);
    return uf.components() == 1;
}

int diameter(const Graph& g) {
    g.validate();
    const auto adj = g.adjacency();
    int best = 0;
    std::vector<int> dist(static_cast<std::size_t>(g.n_vertices));
    for (int source = 0; source < g.n_vertices; ++source) {
        std::fill(dist.begin(), dist.end(), -1);
        std::queue<int> frontier;
        dist[static_cast<std::size_t>(source)] = 0;
        frontier.push(source);
        int reached = 1;
        while (!frontier.empty()) {
            const int v = frontier.front();
            frontier.pop();
            for (int u : adj[static_cast<std::size_t>(v)]) {
                if (dist[static_cast<std::size_t>(u)] < 0) {
                    dist[static_cast<std::size_t>(u)] = dist[static_cast<std::size_t>(v)] + 1;
                    best = std::max(best, dist[static_cast<std::size_t>(u)]);
                    ++reached;
                    frontier.push(u);
                }
            }
        }
        if (reached != g.n_vertices) throw Disconnected("graph is disconnected");
    }
    return best;
}

double mohar_bound(const Graph& g) {
    const int diam = diameter(g);
    if (diam == 0) throw InvalidParams("Mohar bound needs at least two vertices");
    return 4.0 / (static_cast<double>(g.n_vertices) * diam);
}

SpectralReport rate_report(const Graph& g) {
    SpectralReport report;
    report.diameter = diameter(g);
    report.mohar_lower = mohar_bound(g);
    report.lambda2 = lambda2_numeric(g);
    report.n_edges = static_cast<int>(g.edges.size());
    report.rate_coefficient = report.n_edges / report.lambda2;
    return report;
}

}  // namespace risknet
