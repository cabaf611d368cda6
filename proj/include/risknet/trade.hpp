#pragma once

#include "risknet/risk.hpp"
#include "risknet/rng.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace risknet {

using AgentId = int;
using Subset = std::vector<AgentId>;

struct AgentState {
    AgentId id = 0;
    RiskSpec risk;
    Position position;
};

/// Agents of one network; agent i is stored at index i.
using Network = std::vector<AgentState>;

enum class PolicyKind {
    EdgeTaker,  // the taker of each edge keeps the surplus
    NodeTaker,  // the centre of each neighbourhood keeps the surplus
    Fair,       // every member's risk drops by the same amount
};

struct TradePolicy {
    PolicyKind kind = PolicyKind::Fair;
    AgentId taker = -1;

    static TradePolicy fair() { return {PolicyKind::Fair, -1}; }
    static TradePolicy edge_taker(AgentId taker) { return {PolicyKind::EdgeTaker, taker}; }
    static TradePolicy node_taker(AgentId taker) { return {PolicyKind::NodeTaker, taker}; }
};

/// Subsets S_1..S_m, their selection probabilities, and how each trade's
/// surplus is shared.
struct TradeDynamicSpec {
    std::vector<Subset> subsets;
    std::vector<double> probabilities;
    PolicyKind policy = PolicyKind::Fair;
    std::vector<AgentId> takers;  // one per subset for the taker policies

    TradePolicy policy_for(std::size_t subset_index) const;

    /// Subsets of size >= 2 with ids below n_agents, probabilities positive
    /// and summing to one within 1e-12, a taker in each subset when needed.
    void validate(int n_agents) const;

    static TradeDynamicSpec uniform(std::vector<Subset> subsets, PolicyKind policy,
                                    std::vector<AgentId> takers = {});
};

using Edge = std::pair<int, int>;

/// Edge dynamic on an undirected graph: each edge appears in both
/// orientations and the first endpoint of an orientation is its taker.
TradeDynamicSpec edge_dynamic(std::span<const Edge> edges);
TradeDynamicSpec fair_edge_dynamic(std::span<const Edge> edges);

/// Node dynamic: one subset per vertex, its closed neighbourhood; the vertex
/// itself is the taker.
TradeDynamicSpec node_dynamic(std::span<const Edge> edges, int n_vertices);
TradeDynamicSpec fair_node_dynamic(std::span<const Edge> edges, int n_vertices);

/// Market-maker star: the maker is agent 0 and every trader 1..n_traders
/// trades only with it, taking the whole surplus so the maker's risk stays
/// constant.
TradeDynamicSpec market_maker_dynamic(int n_traders);

/// Result of the group problem: the consensus price, a zero-surplus
/// allocation of the aggregate position, and the minimal total risk.
struct Equilibrium {
    PricePoint price;
    std::vector<Position> allocation;  // aligned with the subset order
    double market_risk = 0.0;          // infimal convolution at the aggregate
    bool closed_form = false;
    int iterations = 0;
};

enum class SolverPath { Auto, ClosedForm, Newton };

/// Solves min over Pi of sum_i alpha_i(pi) + <pi, R> for the aggregate R of
/// the subset. The linear term carries a plus sign so that price_map of every
/// returned allocation equals the returned price.
///
/// ClosedForm applies to entropic agents that share a belief or trade in a
/// complete market; Newton is the generic damped Newton on allocations with
/// the conservation constraint (its multiplier is the price). Auto picks the
/// closed form when it applies. Throws SolverDiverged when Newton fails to
/// bring the gradient norm to 1e-10 in 200 iterations.
Equilibrium solve_equilibrium(const Market& market, const Network& agents, std::span<const AgentId> subset,
                              SolverPath path = SolverPath::Auto);

PricePoint equilibrium_price(const Market& market, const Network& agents, std::span<const AgentId> subset);

/// Total risk of the subset minus its minimal total risk.
double surplus(const Market& market, const Network& agents, std::span<const AgentId> subset);

double global_surplus(const Market& market, const Network& agents);

std::vector<AgentId> all_agents(const Network& agents);

struct TradeRecord {
    int step = 0;
    int subset_index = -1;
    double surplus_extracted = 0.0;
    PricePoint post_prices;
    std::vector<std::pair<AgentId, double>> per_agent_risk_drop;
};

/// Executes the trade on the subset in place: the aggregate is reallocated
/// to zero surplus and cash is moved according to the policy. Agents outside
/// the subset are untouched. Throws InvalidTaker.
TradeRecord clear_trade(const Market& market, Network& agents, std::span<const AgentId> subset,
                        const TradePolicy& policy);

/// Equilibrium of agents sharing one base risk at different affinities:
/// agent i holds b_i r0 / sum_j b_j.
std::vector<Position> proportional_equilibrium(const Market& market, const RiskSpec& base_risk,
                                               std::span<const double> affinities, const Position& r0);

/// True iff the hypergraph on n agents with the given hyperedges is connected.
bool is_connected(std::span<const Subset> subsets, int n_agents);

/// Samples one subset from the dynamic and clears it.
TradeRecord dynamic_step(const Market& market, Network& agents, const TradeDynamicSpec& dynamic, Rng& rng,
                         int step = 0);

struct TraceStep {
    int step = 0;
    int subset_index = -1;
    double surplus = 0.0;  // global surplus after the step
    double surplus_extracted = 0.0;
    std::vector<double> risks;  // per agent, after the step
    Matrix prices;              // row i: price map of agent i after the step
};

struct SimulationTrace {
    double market_risk = 0.0;  // constant over a run
    double initial_surplus = 0.0;
    std::vector<double> initial_risks;
    std::vector<TraceStep> steps;
    bool connected = true;
    bool converged = false;
    std::vector<std::string> warnings;

    double final_surplus() const { return steps.empty() ? initial_surplus : steps.back().surplus; }
};

struct RunOptions {
    int max_steps = 1000;
    double stop_tol = 1e-8;
    bool record_prices = true;
};

/// Applies dynamic steps until the global surplus is at most stop_tol or
/// max_steps is reached. A disconnected dynamic runs anyway with a warning.
SimulationTrace run_dynamic(const Market& market, Network& agents, const TradeDynamicSpec& dynamic,
                            const RunOptions& options, Rng& rng);

}  // namespace risknet
