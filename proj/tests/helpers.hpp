#pragma once

#include "risknet/rng.hpp"
#include "risknet/trade.hpp"

#include <cmath>

namespace testing_support {

using namespace risknet;

inline Vector random_vector(Rng& rng, int n, double low, double high) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.uniform(low, high);
    return v;
}

inline Vector random_simplex(Rng& rng, int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = -std::log(1.0 - rng.uniform());
    return v / v.sum();
}

/// Strictly positive belief, bounded away from zero.
inline Vector random_belief(Rng& rng, int n) {
    Vector v = random_simplex(rng, n);
    v = (v.array() + 0.05).matrix();
    return v / v.sum();
}

inline Network random_network(Rng& rng, const Market& market, int n, double b_low = 1.0, double b_high = 1.0,
                              bool random_beliefs = false, double box = 50.0) {
    Network agents;
    for (int i = 0; i < n; ++i) {
        const double b = b_low == b_high ? b_low : rng.uniform(b_low, b_high);
        const Vector belief = random_beliefs ? random_belief(rng, market.n_outcomes())
                                             : Vector::Constant(market.n_outcomes(), 1.0 / market.n_outcomes());
        agents.push_back({i, RiskSpec::entropic(b, belief), random_vector(rng, market.k(), -box, box)});
    }
    return agents;
}

inline Position total_position(const Network& agents) {
    Position total = Position::Zero(agents.front().position.size());
    for (const auto& a : agents) total += a.position;
    return total;
}

/// Largest sup-norm distance between the price maps of any two members.
inline double max_price_spread(const Market& market, const Network& agents, std::span<const AgentId> subset) {
    Vector low = Vector::Constant(market.k(), INFINITY), high = Vector::Constant(market.k(), -INFINITY);
    for (AgentId id : subset) {
        const auto& a = agents[static_cast<std::size_t>(id)];
        const PricePoint p = price_map(market, a.risk, a.position);
        low = low.cwiseMin(p);
        high = high.cwiseMax(p);
    }
    return (high - low).maxCoeff();
}

}  // namespace testing_support
