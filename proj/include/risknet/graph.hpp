#pragma once

#include "risknet/linalg.hpp"
#include "risknet/rng.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace risknet {

/// Simple undirected graph: no self-loops, no parallel edges.
struct Graph {
    int n_vertices = 0;
    std::vector<std::pair<int, int>> edges;

    /// Throws InvalidParams on bad endpoints, loops or duplicates.
    void validate() const;
    std::vector<int> degrees() const;
    std::vector<std::vector<int>> adjacency() const;
};

enum class GraphFamily { Complete, Path, Cycle, CompleteBipartite, Hypercube, BarabasiAlbert };

/// A graph family with its parameters:
///   Complete(N), Path(N), Cycle(N), CompleteBipartite(M, K) on M + K
///   vertices, Hypercube(K) on 2^K vertices, BarabasiAlbert(N, m).
struct GraphKind {
    GraphFamily family = GraphFamily::Complete;
    int first = 0;
    int second = 0;

    static GraphKind complete(int n) { return {GraphFamily::Complete, n, 0}; }
    static GraphKind path(int n) { return {GraphFamily::Path, n, 0}; }
    static GraphKind cycle(int n) { return {GraphFamily::Cycle, n, 0}; }
    static GraphKind complete_bipartite(int m, int k) { return {GraphFamily::CompleteBipartite, m, k}; }
    static GraphKind star(int n) { return complete_bipartite(n - 1, 1); }
    static GraphKind hypercube(int k) { return {GraphFamily::Hypercube, k, 0}; }
    static GraphKind barabasi_albert(int n, int m) { return {GraphFamily::BarabasiAlbert, n, m}; }

    int n_vertices() const;
    std::string to_string() const;
};

/// Parses "complete:6", "path:4", "cycle:4", "star:6", "bipartite:3,2",
/// "hypercube:3", "ba:20,2". With `n_vertices` set, the vertex count may be
/// omitted ("complete", "ba:2", "bipartite:2", "hypercube") and must agree.
GraphKind parse_graph_kind(std::string_view text, std::optional<int> n_vertices = std::nullopt);

/// Throws InvalidParams. Barabasi-Albert graphs grow from an m-vertex
/// clique; each new vertex attaches to m distinct existing vertices drawn
/// one after another with probability proportional to degree (uniformly
/// while every degree is zero). They have m (N - m) + m (m - 1) / 2 edges.
Graph generate_graph(const GraphKind& kind, std::uint64_t seed = 0);
Graph generate_graph(const GraphKind& kind, Rng& rng);

/// G(n, p) random graph; may be disconnected.
Graph erdos_renyi(int n, double p, Rng& rng);

/// D(G) - A(G).
Matrix laplacian(const Graph& g);

/// Ascending Laplacian eigenvalues.
Vector laplacian_spectrum(const Graph& g);

/// Second-smallest Laplacian eigenvalue; zero iff the graph is disconnected.
double lambda2_numeric(const Graph& g);

/// Algebraic connectivity for the families with a known formula. Throws
/// UnsupportedKind for Barabasi-Albert.
double lambda2_closed_form(const GraphKind& kind);

bool graph_connected(const Graph& g);

/// Longest shortest path (BFS from every vertex). Throws Disconnected.
int diameter(const Graph& g);

/// 4 / (N diam(G)). Throws Disconnected.
double mohar_bound(const Graph& g);

struct SpectralReport {
    double lambda2 = 0.0;
    int n_edges = 0;
    int diameter = 0;
    double mohar_lower = 0.0;
    double rate_coefficient = 0.0;  // |E| / lambda2
};

/// Throws Disconnected.
SpectralReport rate_report(const Graph& g);

}  // namespace risknet
