#include "doctest.h"
#include "helpers.hpp"
#include "risknet/errors.hpp"
#include "risknet/market.hpp"

using namespace risknet;
using namespace testing_support;

namespace {

Matrix rows(std::initializer_list<std::initializer_list<double>> values) {
    Matrix m(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(values.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& row : values) {
        Eigen::Index j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

}  // namespace

TEST_CASE("identity bases have the all-ones cash vector") {
    for (int n : {2, 3, 5}) {
        const Market m = validate_basis(SecurityBasis::identity(n));
        CHECK(m.is_complete());
        CHECK((m.cash_vector() - Vector::Ones(n)).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("a basis without the constant payoff has no cash direction") {
    CHECK_THROWS_AS(validate_basis(SecurityBasis(rows({{1}, {2}}))), NoCashDirection);
}

TEST_CASE("malformed bases are rejected") {
    CHECK_THROWS_AS(SecurityBasis(rows({{1, 2}, {2, 4}, {3, 6}})), RankDeficient);
    CHECK_THROWS_AS(SecurityBasis(rows({{1, 0}})), InvalidArgument);
    CHECK_THROWS_AS(SecurityBasis(rows({{1, 0}, {0, NAN}})), InvalidArgument);
}

TEST_CASE("incomplete market with a non-trivial cash vector") {
    // Outcome payoffs (1,0), (1,1), (1,2): security 0 is cash itself.
    const Market m = validate_basis(SecurityBasis(rows({{1, 0}, {1, 1}, {1, 2}})));
    CHECK_FALSE(m.is_complete());
    for (int w = 0; w < 3; ++w) CHECK(m.payout(m.cash_vector(), w) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("payout") {
    const Market id = Market::complete(2);
    Vector r(2);
    r << 2, 0;
    CHECK(id.payout(r, 0) == 2.0);
    CHECK(id.payout(r, 1) == 0.0);
    CHECK_THROWS_AS(id.payout(r, 2), IndexOutOfRange);
    CHECK_THROWS_AS(id.payout(r, -1), IndexOutOfRange);

    const Market m = validate_basis(SecurityBasis(rows({{1, 0}, {1, 1}})));
    Vector s(2);
    s << 3, -1;
    CHECK(m.payout(s, 1) == doctest::Approx(2.0));
}

TEST_CASE("cash pays one everywhere and payouts are linear") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(4));
        Matrix phi(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) phi(i, j) = rng.uniform(-1, 1) + (i == j ? 3.0 : 0.0);
        const Market m = validate_basis(SecurityBasis(phi));
        const Vector r = random_vector(rng, n, -5, 5), s = random_vector(rng, n, -5, 5);
        for (int w = 0; w < n; ++w) {
            CHECK(std::abs(m.payout(m.cash_vector(), w) - 1.0) <= 1e-10);
            const double lhs = m.payout(r + s, w), rhs = m.payout(r, w) + m.payout(s, w);
            CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
        }
    }
}

TEST_CASE("price hull membership") {
    const Market id = Market::complete(2);
    Vector pi(2);
    pi << 0.5, 0.5;
    CHECK(id.price_hull_contains(pi, 1e-8));
    pi << 1.5, -0.5;
    CHECK_FALSE(id.price_hull_contains(pi, 1e-8));
    CHECK_THROWS_AS(id.price_hull_contains(pi, 0.0), InvalidArgument);

    // Not a market (no cash), but hull membership is about phi alone; use a
    // market whose hull is the corner triangle shifted by cash.
    const Market tri = validate_basis(SecurityBasis(rows({{1, 0, 0}, {1, 1, 0}, {1, 0, 1}})));
    Vector p(3);
    p << 1.0, 0.3, 0.3;
    const auto w = tri.hull_weights(p, 1e-8);
    REQUIRE(w.has_value());
    CHECK((*w - Vector{{0.4, 0.3, 0.3}}).cwiseAbs().maxCoeff() <= 1e-9);
    p << 1.0, 0.6, 0.6;
    CHECK_FALSE(tri.price_hull_contains(p, 1e-8));
}

TEST_CASE("hull contains every image of the simplex") {
    Rng rng(5);
    const Market m = validate_basis(SecurityBasis(rows({{1, 0, 0}, {1, 1, 0}, {1, 0, 1}, {1, 2, 2}})));
    for (int t = 0; t < 100; ++t) {
        const Vector q = random_simplex(rng, 4);
        CHECK(m.price_hull_contains(m.price_of(q), 1e-8));
    }
}

TEST_CASE("complete-market helpers") {
    const Market m = Market::complete(3);
    const Vector x{{1.0, -2.0, 0.5}};
    CHECK((m.position_with_payouts(x) - x).norm() <= 1e-14);
    CHECK((m.outcome_weights_of(x) - x).norm() <= 1e-14);
    const Vector stripped = m.without_cash(x);
    CHECK(std::abs(stripped.dot(m.cash_vector())) <= 1e-14);
    const Market inc = validate_basis(SecurityBasis(rows({{1, 0}, {1, 1}, {1, 2}})));
    CHECK_THROWS_AS(inc.outcome_weights_of(Vector::Zero(2)), InvalidArgument);
}

TEST_CASE("nnls matches the unconstrained solution when it is non-negative") {
    Matrix a = rows({{2, 0}, {0, 1}, {1, 1}});
    const Vector y = a * Vector{{1.0, 2.0}};
    CHECK((nnls(a, y) - Vector{{1.0, 2.0}}).norm() <= 1e-10);
    const Vector y2{{-1.0, 0.0, -1.0}};
    CHECK(nnls(a, y2).norm() <= 1e-14);
}
