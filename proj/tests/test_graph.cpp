#include "doctest.h"
#include "risknet/coord_descent.hpp"
#include "risknet/errors.hpp"
#include "risknet/graph.hpp"

#include <cmath>
#include <numbers>
#include <set>

using namespace risknet;

TEST_CASE("edge counts") {
    CHECK(generate_graph(GraphKind::complete(4)).edges.size() == 6);
    CHECK(generate_graph(GraphKind::hypercube(3)).edges.size() == 12);
    CHECK(generate_graph(GraphKind::path(5)).edges.size() == 4);
    CHECK(generate_graph(GraphKind::cycle(5)).edges.size() == 5);
    CHECK(generate_graph(GraphKind::complete_bipartite(3, 2)).edges.size() == 6);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        CHECK(generate_graph(GraphKind::barabasi_albert(5, 2), seed).edges.size() == 7);
        CHECK(generate_graph(GraphKind::barabasi_albert(30, 3), seed).edges.size() == 3 * 27 + 3);
        CHECK(generate_graph(GraphKind::barabasi_albert(12, 1), seed).edges.size() == 11);
    }
}

TEST_CASE("Barabasi-Albert construction") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const Graph g = generate_graph(GraphKind::barabasi_albert(40, 2), seed);
        g.validate();
        CHECK(graph_connected(g));
        // Seed clique first, then each new vertex brings m edges to older ones.
        CHECK(g.edges.front() == std::pair<int, int>{0, 1});
        std::vector<int> newer(40, 0);
        for (const auto& [a, b] : g.edges) ++newer[static_cast<std::size_t>(std::max(a, b))];
        for (int v = 2; v < 40; ++v) CHECK(newer[static_cast<std::size_t>(v)] == 2);
    }
    const Graph a = generate_graph(GraphKind::barabasi_albert(25, 2), 7);
    const Graph b = generate_graph(GraphKind::barabasi_albert(25, 2), 7);
    CHECK(a.edges == b.edges);

    // Degree-proportional attachment: hubs from early vertices dominate.
    double early = 0, late = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto deg = generate_graph(GraphKind::barabasi_albert(50, 2), seed).degrees();
        early += deg[2];
        late += deg[45];
    }
    CHECK(early > 2 * late);
}

TEST_CASE("invalid parameters") {
    CHECK_THROWS_AS(generate_graph(GraphKind::complete(0)), InvalidParams);
    CHECK_THROWS_AS(generate_graph(GraphKind::barabasi_albert(3, 3)), InvalidParams);
    CHECK_THROWS_AS(generate_graph(GraphKind::barabasi_albert(3, 0)), InvalidParams);
    CHECK_THROWS_AS(generate_graph(GraphKind::hypercube(0)), InvalidParams);
    CHECK_THROWS_AS(generate_graph(GraphKind::cycle(2)), InvalidParams);
    Graph dup{3, {{0, 1}, {1, 0}}};
    CHECK_THROWS_AS(dup.validate(), InvalidParams);
    Graph loop{3, {{1, 1}}};
    CHECK_THROWS_AS(loop.validate(), InvalidParams);
    Graph out{2, {{0, 2}}};
    CHECK_THROWS_AS(out.validate(), InvalidParams);
}

TEST_CASE("graph kind parsing") {
    CHECK(parse_graph_kind("complete:6").n_vertices() == 6);
    CHECK(parse_graph_kind("star:6").first == 5);
    CHECK(parse_graph_kind("bipartite:3,2").n_vertices() == 5);
    CHECK(parse_graph_kind("hypercube:3").n_vertices() == 8);
    CHECK(parse_graph_kind("ba:20,2").second == 2);
    CHECK(parse_graph_kind("ba:2", 20).first == 20);
    CHECK(parse_graph_kind("complete", 7).first == 7);
    CHECK(parse_graph_kind("hypercube", 16).first == 4);
    CHECK_THROWS_AS(parse_graph_kind("hypercube", 12), InvalidParams);
    CHECK_THROWS_AS(parse_graph_kind("complete:6", 7), InvalidParams);
    CHECK_THROWS_AS(parse_graph_kind("torus:3"), InvalidParams);
    CHECK_THROWS_AS(parse_graph_kind("path:x"), InvalidParams);
    for (const char* text : {"complete:6", "path:4", "cycle:5", "bipartite:3,2", "hypercube:3", "ba:20,2"}) {
        const GraphKind k = parse_graph_kind(text);
        const GraphKind back = parse_graph_kind(k.to_string());
        CHECK(back.family == k.family);
        CHECK(back.first == k.first);
        CHECK(back.second == k.second);
    }
}

TEST_CASE("Laplacian examples") {
    Matrix single(2, 2);
    single << 1, -1, -1, 1;
    CHECK(laplacian(Graph{2, {{0, 1}}}) == single);

    const Vector path = laplacian_spectrum(generate_graph(GraphKind::path(3)));
    CHECK(std::abs(path[0]) <= 1e-12);
    CHECK(path[1] == doctest::Approx(1.0));
    CHECK(path[2] == doctest::Approx(3.0));

    const Matrix k3 = laplacian(generate_graph(GraphKind::complete(3)));
    CHECK((k3 - (3 * Matrix::Identity(3, 3) - Matrix::Ones(3, 3))).cwiseAbs().maxCoeff() == 0.0);
    const Vector k3s = laplacian_spectrum(generate_graph(GraphKind::complete(3)));
    CHECK(k3s[1] == doctest::Approx(3.0));
    CHECK(k3s[2] == doctest::Approx(3.0));
}

TEST_CASE("Laplacian structure on random graphs") {
    Rng rng(4);
    for (int t = 0; t < 20; ++t) {
        const Graph g = t % 2 ? generate_graph(GraphKind::barabasi_albert(15, 2), rng) : erdos_renyi(12, 0.4, rng);
        const Matrix l = laplacian(g);
        CHECK(l.rowwise().sum().cwiseAbs().maxCoeff() == 0.0);
        CHECK(l == l.transpose());
        const Eigen::SelfAdjointEigenSolver<Matrix> eig(l);
        CHECK(std::abs(eig.eigenvalues()[0]) <= 1e-9);
        if (graph_connected(g)) {
            const Vector v = eig.eigenvectors().col(0);
            CHECK((v.cwiseAbs() - Vector::Constant(v.size(), 1 / std::sqrt(double(v.size())))).cwiseAbs().maxCoeff() <=
                  1e-9);
        }
    }
}

TEST_CASE("algebraic connectivity") {
    CHECK(lambda2_numeric(generate_graph(GraphKind::complete(5))) == doctest::Approx(5.0));
    CHECK(lambda2_numeric(generate_graph(GraphKind::path(3))) == doctest::Approx(1.0));
    CHECK(lambda2_numeric(Graph{4, {{0, 1}, {2, 3}}}) == 0.0);
    CHECK(lambda2_closed_form(GraphKind::cycle(4)) == doctest::Approx(2.0));
    CHECK(lambda2_closed_form(GraphKind::complete_bipartite(3, 2)) == 2.0);
    CHECK(lambda2_closed_form(GraphKind::complete_bipartite(2, 3)) == 2.0);
    CHECK(lambda2_closed_form(GraphKind::hypercube(7)) == 2.0);
    CHECK(lambda2_closed_form(GraphKind::path(4)) == doctest::Approx(2 * (1 - std::cos(std::numbers::pi / 4))));
    CHECK_THROWS_AS(lambda2_closed_form(GraphKind::barabasi_albert(10, 2)), UnsupportedKind);
}

TEST_CASE("diameter and the Mohar bound") {
    const Graph star = generate_graph(GraphKind::complete_bipartite(4, 1));
    CHECK(diameter(star) == 2);
    CHECK(mohar_bound(star) == doctest::Approx(0.4));
    CHECK(lambda2_numeric(star) == doctest::Approx(1.0));
    CHECK(mohar_bound(generate_graph(GraphKind::complete(4))) == 1.0);
    const Graph p4 = generate_graph(GraphKind::path(4));
    CHECK(mohar_bound(p4) == doctest::Approx(1.0 / 3));
    CHECK(lambda2_numeric(p4) == doctest::Approx(0.58579).epsilon(1e-5));
    CHECK_THROWS_AS(diameter(Graph{4, {{0, 1}, {2, 3}}}), Disconnected);
    CHECK_THROWS_AS(mohar_bound(Graph{3, {{0, 1}}}), Disconnected);
}

TEST_CASE("rate reports") {
    const SpectralReport k6 = rate_report(generate_graph(GraphKind::complete(6)));
    CHECK(k6.rate_coefficient == doctest::Approx(2.5));
    CHECK(k6.n_edges == 15);
    const SpectralReport s6 = rate_report(generate_graph(GraphKind::star(6)));
    CHECK(s6.rate_coefficient == doctest::Approx(5.0));
    const SpectralReport p4 = rate_report(generate_graph(GraphKind::path(4)));
    CHECK(p4.rate_coefficient == doctest::Approx(5.1213).epsilon(1e-4));
    CHECK(p4.diameter == 3);
    CHECK(std::abs(p4.rate_coefficient - p4.n_edges / p4.lambda2) <= 1e-9);
    CHECK(p4.lambda2 >= p4.mohar_lower - 1e-9);
    CHECK_THROWS_AS(rate_report(Graph{3, {{0, 1}}}), Disconnected);
}

TEST_CASE("Laplacian is twice the sum of edge projectors") {
    const Graph g = generate_graph(GraphKind::cycle(6));
    Matrix sum = Matrix::Zero(6, 6);
    for (const auto& [a, b] : g.edges) sum += subset_projector({a, b}, 6, 1).dense();
    CHECK((laplacian(g) - 2 * sum).cwiseAbs().maxCoeff() <= 1e-10);
}
