#include "risknet/trade.hpp"

#include "risknet/errors.hpp"
#include "risknet/union_find.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

namespace risknet {

// ---------------------------------------------------------------------------
// Dynamic specifications

TradePolicy TradeDynamicSpec::policy_for(std::size_t subset_index) const {
    if (policy == PolicyKind::Fair) return TradePolicy::fair();
    return {policy, takers.at(subset_index)};
}

void TradeDynamicSpec::validate(int n_agents) const {
    if (subsets.empty()) throw InvalidArgument("trade dynamic has no subsets");
    if (probabilities.size() != subsets.size()) {
        throw InvalidArgument("trade dynamic needs one probability per subset");
    }
    for (const auto& s : subsets) {
        if (s.size() < 2) throw InvalidArgument("trade subsets need at least two agents");
        std::set<AgentId> seen;
        for (AgentId id : s) {
            if (id < 0 || id >= n_agents) throw InvalidArgument("agent id " + std::to_string(id) + " out of range");
            if (!seen.insert(id).second) throw InvalidArgument("agent listed twice in a subset");
        }
    }
    double total = 0.0;
    for (double p : probabilities) {
        if (!(p > 0.0)) throw InvalidArgument("subset probabilities must be strictly positive");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("subset probabilities must sum to one");
    if (policy != PolicyKind::Fair) {
        if (takers.size() != subsets.size()) throw InvalidTaker("taker policy needs one taker per subset");
        for (std::size_t i = 0; i < subsets.size(); ++i) {
            if (std::find(subsets[i].begin(), subsets[i].end(), takers[i]) == subsets[i].end()) {
                throw InvalidTaker("taker " + std::to_string(takers[i]) + " is not in subset " + std::to_string(i));
            }
        }
    }
}

TradeDynamicSpec TradeDynamicSpec::uniform(std::vector<Subset> subsets, PolicyKind policy,
                                           std::vector<AgentId> takers) {
    TradeDynamicSpec spec;
    const double p = subsets.empty() ? 0.0 : 1.0 / static_cast<double>(subsets.size());
    spec.probabilities.assign(subsets.size(), p);
    spec.subsets = std::move(subsets);
    spec.policy = policy;
    spec.takers = std::move(takers);
    return spec;
}

TradeDynamicSpec edge_dynamic(std::span<const Edge> edges) {
    std::vector<Subset> subsets;
    std::vector<AgentId> takers;
    for (const auto& [a, b] : edges) {
        subsets.push_back({a, b});
        takers.push_back(a);
        subsets.push_back({b, a});
        takers.push_back(b);
    }
    return TradeDynamicSpec::uniform(std::move(subsets), PolicyKind::EdgeTaker, std::move(takers));
}

TradeDynamicSpec fair_edge_dynamic(std::span<const Edge> edges) {
    std::vector<Subset> subsets;
    for (const auto& [a, b] : edges) subsets.push_back({a, b});
    return TradeDynamicSpec::uniform(std::move(subsets), PolicyKind::Fair);
}

namespace {

std::vector<Subset> closed_neighbourhoods(std::span<const Edge> edges, int n_vertices) {
    std::vector<Subset> hoods(static_cast<std::size_t>(n_vertices));
    for (int v = 0; v < n_vertices; ++v) hoods[static_cast<std::size_t>(v)].push_back(v);
    for (const auto& [a, b] : edges) {
        hoods.at(static_cast<std::size_t>(a)).push_back(b);
        hoods.at(static_cast<std::size_t>(b)).push_back(a);
    }
    for (auto& h : hoods) std::sort(h.begin() + 1, h.end());
    return hoods;
}

}  // namespace

TradeDynamicSpec node_dynamic(std::span<const Edge> edges, int n_vertices) {
    std::vector<AgentId> takers(static_cast<std::size_t>(n_vertices));
    std::iota(takers.begin(), takers.end(), 0);
    return TradeDynamicSpec::uniform(closed_neighbourhoods(edges, n_vertices), PolicyKind::NodeTaker,
                                     std::move(takers));
}

TradeDynamicSpec fair_node_dynamic(std::span<const Edge> edges, int n_vertices) {
    return TradeDynamicSpec::uniform(closed_neighbourhoods(edges, n_vertices), PolicyKind::Fair);
}

TradeDynamicSpec market_maker_dynamic(int n_traders) {
    std::vector<Subset> subsets;
    std::vector<AgentId> takers;
    for (int t = 1; t <= n_traders; ++t) {
        subsets.push_back({0, t});
        takers.push_back(t);
    }
    return TradeDynamicSpec::uniform(std::move(subsets), PolicyKind::EdgeTaker, std::move(takers));
}

// ---------------------------------------------------------------------------
// Group equilibrium

namespace {

const AgentState& agent_at(const Network& agents, AgentId id) {
    if (id < 0 || static_cast<std::size_t>(id) >= agents.size()) {
        throw IndexOutOfRange("agent " + std::to_string(id) + " out of range");
    }
    return agents[static_cast<std::size_t>(id)];
}

Position aggregate_of(const Network& agents, std::span<const AgentId> subset) {
    Position total = agent_at(agents, subset.front()).position;
    for (std::size_t i = 1; i < subset.size(); ++i) total += agent_at(agents, subset[i]).position;
    return total;
}

bool shares_belief(const Network& agents, std::span<const AgentId> subset) {
    const Vector& first = agent_at(agents, subset.front()).risk.belief;
    for (AgentId id : subset) {
        if (agent_at(agents, id).risk.belief != first) return false;
    }
    return true;
}

bool closed_form_applies(const Market& market, const Network& agents, std::span<const AgentId> subset) {
    for (AgentId id : subset) {
        if (agent_at(agents, id).risk.kind != RiskKind::Entropic) return false;
    }
    return market.is_complete() || shares_belief(agents, subset);
}

double dual_market_risk(const Market& market, const Network& agents, std::span<const AgentId> subset,
                        const PricePoint& price, const Position& aggregate) {
    double penalties = 0.0;
    for (AgentId id : subset) penalties += penalty_value(market, agent_at(agents, id).risk, price);
    return -(penalties + price.dot(aggregate));
}

// Entropic agents: the optimal outcome weights are
//   q ~ exp((sum_i b_i log p_i - X[R]) / sum_i b_i).
Equilibrium closed_form_equilibrium(const Market& market, const Network& agents, std::span<const AgentId> subset) {
    const Position aggregate = aggregate_of(agents, subset);
    double total_affinity = 0.0;
    Vector weighted_log_belief = Vector::Zero(market.n_outcomes());
    for (AgentId id : subset) {
        const RiskSpec& risk = agent_at(agents, id).risk;
        risk.validate_for(market);
        total_affinity += risk.affinity;
        weighted_log_belief += risk.affinity * risk.belief.array().log().matrix();
    }
    const Vector exponent = (weighted_log_belief - market.payouts(aggregate)) / total_affinity;
    const double lse = log_sum_exp(exponent);
    const Vector q = (exponent.array() - lse).exp();

    Equilibrium eq;
    eq.closed_form = true;
    eq.price = market.price_of(q);

    Position assigned = Position::Zero(market.k());
    const bool common = shares_belief(agents, subset);
    for (std::size_t i = 0; i < subset.size(); ++i) {
        const RiskSpec& risk = agent_at(agents, subset[i]).risk;
        Position r;
        if (i + 1 == subset.size()) {
            r = aggregate - assigned;
        } else if (common) {
            r = (risk.affinity / total_affinity) * aggregate;
        } else {
            // Payout b_i (log p_i - exponent) tilts belief p_i exactly onto q.
            const Vector payout = risk.affinity * (risk.belief.array().log().matrix() - exponent);
            r = market.position_with_payouts(payout);
        }
        assigned += r;
        eq.allocation.push_back(std::move(r));
    }

    if (market.is_complete()) {
        double penalties = 0.0;
        for (AgentId id : subset) penalties += outcome_penalty(agent_at(agents, id).risk, q);
        eq.market_risk = -(penalties + eq.price.dot(aggregate));
    } else {
        eq.market_risk = dual_market_risk(market, agents, subset, eq.price, aggregate);
    }
    return eq;
}

// Damped Newton on the allocation with sum_i r_i = R held fixed. Each step
// solves the equality-constrained quadratic model through its KKT system;
// the risks are flat along cash, so the minimum-norm solution is used.
Equilibrium newton_equilibrium(const Market& market, const Network& agents, std::span<const AgentId> subset) {
    constexpr int kMaxIterations = 200;
    constexpr double kGradientTolerance = 1e-10;

    const int m = static_cast<int>(subset.size());
    const int k = market.k();
    const Position aggregate = aggregate_of(agents, subset);
    double total_affinity = 0.0;
    for (AgentId id : subset) {
        agent_at(agents, id).risk.validate_for(market);
        total_affinity += agent_at(agents, id).risk.affinity;
    }

    std::vector<Position> r;
    for (AgentId id : subset) r.push_back((agent_at(agents, id).risk.affinity / total_affinity) * aggregate);

    auto total_risk = [&](const std::vector<Position>& alloc) {
        double sum = 0.0;
        for (int i = 0; i < m; ++i) sum += risk_value(market, agents[static_cast<std::size_t>(subset[static_cast<std::size_t>(i)])].risk, alloc[static_cast<std::size_t>(i)]);
        return sum;
    };
    // Gradient of each risk is minus its price; the norm of its component
    // orthogonal to the constraint measures price disagreement.
    auto gradients = [&](const std::vector<Position>& alloc, Matrix& grads) {
        grads.resize(k, m);
        for (int i = 0; i < m; ++i) {
            grads.col(i) = -price_map(market, agents[static_cast<std::size_t>(subset[static_cast<std::size_t>(i)])].risk, alloc[static_cast<std::size_t>(i)]);
        }
        const Vector mean = grads.rowwise().mean();
        return (grads.colwise() - mean).norm();
    };

    Matrix grads;
    double grad_norm = gradients(r, grads);
    double value = total_risk(r);
    int iter = 0;
    for (; iter < kMaxIterations && grad_norm > kGradientTolerance; ++iter) {
        const int dim = m * k + k;
        Matrix kkt = Matrix::Zero(dim, dim);
        Vector rhs = Vector::Zero(dim);
        for (int i = 0; i < m; ++i) {
            const RiskSpec& risk = agents[static_cast<std::size_t>(subset[static_cast<std::size_t>(i)])].risk;
            kkt.block(i * k, i * k, k, k) = risk_hessian(market, risk, r[static_cast<std::size_t>(i)]);
            kkt.block(i * k, m * k, k, k) = Matrix::Identity(k, k);
            kkt.block(m * k, i * k, k, k) = Matrix::Identity(k, k);
            rhs.segment(i * k, k) = -grads.col(i);
        }
        const Vector solution = kkt.completeOrthogonalDecomposition().solve(rhs);
        std::vector<Position> direction(static_cast<std::size_t>(m));
        double slope = 0.0;
        Position drift = Position::Zero(k);
        for (int i = 0; i < m; ++i) {
            direction[static_cast<std::size_t>(i)] = solution.segment(i * k, k);
            drift += direction[static_cast<std::size_t>(i)];
            slope += grads.col(i).dot(direction[static_cast<std::size_t>(i)]);
        }
        // Keep the iterate exactly on the constraint.
        direction.back() -= drift;

        double t = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            std::vector<Position> trial = r;
            for (int i = 0; i < m; ++i) trial[static_cast<std::size_t>(i)] += t * direction[static_cast<std::size_t>(i)];
            const double trial_value = total_risk(trial);
            Matrix trial_grads;
            const double trial_norm = gradients(trial, trial_grads);
            const bool armijo = trial_value <= value + 1e-4 * t * std::min(slope, 0.0);
            // Near the optimum the objective stops resolving progress; accept
            // steps that shrink the gradient without raising the risk.
            const bool flat = trial_value <= value + 1e-13 * (1.0 + std::abs(value)) && trial_norm < grad_norm;
            if (std::isfinite(trial_value) && (armijo || flat)) {
                r = std::move(trial);
                value = trial_value;
                grads = std::move(trial_grads);
                grad_norm = trial_norm;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;
    }
    if (!(grad_norm <= kGradientTolerance)) {
        throw SolverDiverged("equilibrium solver stopped at gradient norm " + std::to_string(grad_norm) +
                             " after " + std::to_string(iter) + " iterations");
    }

    Equilibrium eq;
    eq.iterations = iter;
    eq.price = -grads.rowwise().mean();
    eq.allocation = std::move(r);
    eq.market_risk = dual_market_risk(market, agents, subset, eq.price, aggregate);
    return eq;
}

}  // namespace

Equilibrium solve_equilibrium(const Market& market, const Network& agents, std::span<const AgentId> subset,
                              SolverPath path) {
    if (subset.empty()) throw InvalidArgument("equilibrium needs a nonempty subset");
    if (path == SolverPath::Auto) {
        path = closed_form_applies(market, agents, subset) ? SolverPath::ClosedForm : SolverPath::Newton;
    }
    if (path == SolverPath::ClosedForm) {
        if (!closed_form_applies(market, agents, subset)) {
            throw InvalidArgument("closed-form equilibrium needs entropic agents with a shared belief or a complete market");
        }
        return closed_form_equilibrium(market, agents, subset);
    }
    return newton_equilibrium(market, agents, subset);
}

PricePoint equilibrium_price(const Market& market, const Network& agents, std::span<const AgentId> subset) {
    return solve_equilibrium(market, agents, subset).price;
}

double surplus(const Market& market, const Network& agents, std::span<const AgentId> subset) {
    if (subset.empty()) throw InvalidArgument("surplus needs a nonempty subset");
    if (subset.size() == 1) {
        agent_at(agents, subset.front());
        return 0.0;
    }
    const Equilibrium eq = solve_equilibrium(market, agents, subset);
    double total = 0.0;
    for (AgentId id : subset) total += risk_value(market, agent_at(agents, id).risk, agent_at(agents, id).position);
    return total - eq.market_risk;
}

std::vector<AgentId> all_agents(const Network& agents) {
    std::vector<AgentId> ids(agents.size());
    std::iota(ids.begin(), ids.end(), 0);
    return ids;
}

double global_surplus(const Market& market, const Network& agents) {
    const auto ids = all_agents(agents);
    return surplus(market, agents, ids);
}

// ---------------------------------------------------------------------------
// Trades

TradeRecord clear_trade(const Market& market, Network& agents, std::span<const AgentId> subset,
                        const TradePolicy& policy) {
    if (subset.empty()) throw InvalidArgument("trade needs a nonempty subset");
    std::size_t taker_slot = subset.size();
    if (policy.kind != PolicyKind::Fair) {
        auto it = std::find(subset.begin(), subset.end(), policy.taker);
        if (it == subset.end()) throw InvalidTaker("taker " + std::to_string(policy.taker) + " is not in the subset");
        taker_slot = static_cast<std::size_t>(it - subset.begin());
    }

    const std::size_t m = subset.size();
    std::vector<double> old_risk(m);
    for (std::size_t i = 0; i < m; ++i) {
        const AgentState& a = agent_at(agents, subset[i]);
        old_risk[i] = risk_value(market, a.risk, a.position);
    }
    Equilibrium eq = solve_equilibrium(market, agents, subset);
    const double old_total = std::accumulate(old_risk.begin(), old_risk.end(), 0.0);
    const double extracted = old_total - eq.market_risk;

    std::vector<double> base_risk(m);
    for (std::size_t i = 0; i < m; ++i) {
        base_risk[i] = risk_value(market, agent_at(agents, subset[i]).risk, eq.allocation[i]);
    }

    // Cash c_i moves agent i's risk from base_risk[i] to base_risk[i] - c_i.
    std::vector<double> cash(m, 0.0);
    if (policy.kind == PolicyKind::Fair) {
        const double share = extracted / static_cast<double>(m);
        for (std::size_t i = 0; i < m; ++i) cash[i] = base_risk[i] - old_risk[i] + share;
    } else {
        double paid = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == taker_slot) continue;
            cash[i] = base_risk[i] - old_risk[i];
            paid += cash[i];
        }
        cash[taker_slot] = -paid;
    }

    TradeRecord record;
    record.surplus_extracted = extracted;
    record.post_prices = eq.price;
    const Vector& cash_vector = market.cash_vector();
    for (std::size_t i = 0; i < m; ++i) {
        AgentState& a = agents[static_cast<std::size_t>(subset[i])];
        a.position = eq.allocation[i] + cash[i] * cash_vector;
        const double new_risk = risk_value(market, a.risk, a.position);
        record.per_agent_risk_drop.emplace_back(a.id, old_risk[i] - new_risk);
    }
    return record;
}

std::vector<Position> proportional_equilibrium(const Market& market, const RiskSpec& base_risk,
                                               std::span<const double> affinities, const Position& r0) {
    base_risk.validate_for(market);
    if (affinities.empty()) throw InvalidArgument("proportional equilibrium needs at least one agent");
    double total = 0.0;
    for (double b : affinities) {
        if (!(b > 0.0)) throw NonPositiveAffinity("affinities must be positive");
        total += b;
    }
    std::vector<Position> out;
    out.reserve(affinities.size());
    for (double b : affinities) out.push_back((b / total) * r0);
    return out;
}

bool is_connected(std::span<const Subset> subsets, int n_agents) {
    if (n_agents <= 0) return false;
    UnionFind uf(n_agents);
    for (const auto& s : subsets) {
        for (std::size_t i = 1; i < s.size(); ++i) uf.unite(s.front(), s[i]);
    }
    return uf.components() == 1;
}

TradeRecord dynamic_step(const Market& market, Network& agents, const TradeDynamicSpec& dynamic, Rng& rng,
                         int step) {
    const std::size_t index = dynamic.subsets.size() == 1 ? 0 : rng.discrete(dynamic.probabilities);
    TradeRecord record = clear_trade(market, agents, dynamic.subsets[index], dynamic.policy_for(index));
    record.step = step;
    record.subset_index = static_cast<int>(index);
    return record;
}

SimulationTrace run_dynamic(const Market& market, Network& agents, const TradeDynamicSpec& dynamic,
                            const RunOptions& options, Rng& rng) {
    const int n = static_cast<int>(agents.size());
    dynamic.validate(n);

    SimulationTrace trace;
    trace.connected = is_connected(dynamic.subsets, n);
    if (!trace.connected) trace.warnings.emplace_back("trade dynamic is not connected; no common fixed point");

    const auto ids = all_agents(agents);
    trace.market_risk = solve_equilibrium(market, agents, ids).market_risk;

    std::vector<double> risks(static_cast<std::size_t>(n));
    Matrix prices(n, market.k());
    for (int i = 0; i < n; ++i) {
        const AgentState& a = agents[static_cast<std::size_t>(i)];
        risks[static_cast<std::size_t>(i)] = risk_value(market, a.risk, a.position);
        if (options.record_prices) prices.row(i) = price_map(market, a.risk, a.position).transpose();
    }
    auto current_surplus = [&] {
        return std::accumulate(risks.begin(), risks.end(), 0.0) - trace.market_risk;
    };
    trace.initial_risks = risks;
    trace.initial_surplus = current_surplus();

    double phi = trace.initial_surplus;
    for (int step = 1; step <= options.max_steps && phi > options.stop_tol; ++step) {
        const TradeRecord record = dynamic_step(market, agents, dynamic, rng, step);
        for (const auto& s : std::span(dynamic.subsets[static_cast<std::size_t>(record.subset_index)])) {
            const AgentState& a = agents[static_cast<std::size_t>(s)];
            risks[static_cast<std::size_t>(s)] = risk_value(market, a.risk, a.position);
            if (options.record_prices) prices.row(s) = price_map(market, a.risk, a.position).transpose();
        }
        phi = current_surplus();
        TraceStep entry;
        entry.step = step;
        entry.subset_index = record.subset_index;
        entry.surplus = phi;
        entry.surplus_extracted = record.surplus_extracted;
        entry.risks = risks;
        if (options.record_prices) entry.prices = prices;
        trace.steps.push_back(std::move(entry));
    }
    trace.converged = phi <= options.stop_tol;
    return trace;
}

}  // namespace risknet
