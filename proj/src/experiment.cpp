#include "risknet/errors.hpp"
#include "risknet/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numeric>
#include <thread>

namespace risknet {

TradeDynamicSpec build_dynamic(DynamicKind kind, const Graph& graph) {
    switch (kind) {
        case DynamicKind::Edge: return edge_dynamic(graph.edges);
        case DynamicKind::Node: return node_dynamic(graph.edges, graph.n_vertices);
        case DynamicKind::FairEdge: return fair_edge_dynamic(graph.edges);
        case DynamicKind::FairNode: return fair_node_dynamic(graph.edges, graph.n_vertices);
    }
    throw InvalidArgument("unknown dynamic kind");
}

TrialInstance sample_trial(const ExperimentConfig& config, const Market& market, int trial) {
    TrialInstance inst;
    inst.trial = trial;
    inst.seed = child_seed(config.seed, static_cast<std::uint64_t>(trial));
    inst.rng = Rng(inst.seed);
    inst.graph = generate_graph(config.graph_kind(), inst.rng);
    const int n = config.n_agents;
    const Vector uniform = Vector::Constant(market.n_outcomes(), 1.0 / market.n_outcomes());
    for (int i = 0; i < n; ++i) {
        AgentState agent;
        agent.id = i;
        const double b = config.affinity_low == config.affinity_high
                             ? config.affinity_low
                             : inst.rng.uniform(config.affinity_low, config.affinity_high);
        const Vector& belief = !config.beliefs.empty() ? config.beliefs[static_cast<std::size_t>(i)]
                               : config.belief         ? *config.belief
                                                       : uniform;
        agent.risk = RiskSpec::entropic(b, belief);
        agent.position = Position(market.k());
        for (int c = 0; c < market.k(); ++c) {
            agent.position[c] = inst.rng.uniform(config.position_low[c], config.position_high[c]);
        }
        inst.agents.push_back(std::move(agent));
    }
    inst.dynamic = build_dynamic(config.dynamic, inst.graph);
    return inst;
}

namespace {

struct TrialOutcome {
    std::optional<TrialTrace> trace;
    std::vector<CaptureRecord> records;
    std::optional<std::string> error;
};

TrialOutcome run_trial(const ExperimentConfig& config, const Market& market, int trial) {
    TrialOutcome out;
    try {
        TrialInstance inst = sample_trial(config, market, trial);
        RunOptions options;
        options.max_steps = config.max_steps;
        options.stop_tol = config.stop_tol;
        options.record_prices = false;
        SimulationTrace trace = run_dynamic(market, inst.agents, inst.dynamic, options, inst.rng);
        const std::vector<int> degree = inst.graph.degrees();
        const std::vector<double>& final_risks = trace.steps.empty() ? trace.initial_risks : trace.steps.back().risks;
        for (int i = 0; i < config.n_agents; ++i) {
            const double drop = trace.initial_risks[static_cast<std::size_t>(i)] - final_risks[static_cast<std::size_t>(i)];
            CaptureRecord record;
            record.trial = trial;
            record.agent = i;
            record.degree = degree[static_cast<std::size_t>(i)];
            record.capture_fraction = trace.initial_surplus > 0.0 ? drop / trace.initial_surplus : 0.0;
            out.records.push_back(record);
        }
        out.trace = TrialTrace{trial, std::move(trace)};
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, unsigned threads) {
    config.validate();
    const Market market = config.market();
    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(config.trials));

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(config.trials));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int t = next++; t < config.trials; t = next++) {
            outcomes[static_cast<std::size_t>(t)] = run_trial(config, market, t);
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    }

    ExperimentResult result;
    result.n_agents = config.n_agents;
    for (int t = 0; t < config.trials; ++t) {
        auto& o = outcomes[static_cast<std::size_t>(t)];
        if (o.error) {
            result.failures.push_back({t, *o.error});
            continue;
        }
        result.traces.push_back(std::move(*o.trace));
        result.records.insert(result.records.end(), o.records.begin(), o.records.end());
    }
    return result;
}

// ---------------------------------------------------------------------------
// Analysis

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
        i = j + 1;
    }
    return ranks;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw InvalidArgument("spearman: size mismatch");
    if (x.size() < 2) return 0.0;
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

CaptureSummary analyze_capture(const std::vector<CaptureRecord>& records) {
    if (records.empty()) throw EmptyInput("no capture records to analyze");
    std::map<int, std::vector<double>> by_degree;
    std::vector<double> degree, capture;
    int n_agents = 0;
    for (const auto& r : records) {
        by_degree[r.degree].push_back(r.capture_fraction);
        degree.push_back(r.degree);
        capture.push_back(r.capture_fraction);
        n_agents = std::max(n_agents, r.agent + 1);
    }
    CaptureSummary summary;
    for (const auto& [d, values] : by_degree) {
        DegreeSummary row;
        row.degree = d;
        row.count = static_cast<int>(values.size());
        row.mean_capture = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
        row.median_capture = median_of(values);
        summary.by_degree.push_back(row);
    }
    summary.spearman = spearman(degree, capture);
    summary.fair_line = 1.0 / n_agents;
    return summary;
}

std::pair<double, double> bootstrap_spearman(const std::vector<CaptureRecord>& records, int resamples,
                                             double confidence, std::uint64_t seed) {
    if (records.empty()) throw EmptyInput("no capture records to bootstrap");
    std::map<int, std::vector<const CaptureRecord*>> by_trial;
    for (const auto& r : records) by_trial[r.trial].push_back(&r);
    std::vector<const std::vector<const CaptureRecord*>*> trials;
    for (const auto& [t, rs] : by_trial) trials.push_back(&rs);

    Rng rng(seed);
    std::vector<double> stats;
    stats.reserve(static_cast<std::size_t>(resamples));
    for (int b = 0; b < resamples; ++b) {
        std::vector<double> degree, capture;
        for (std::size_t i = 0; i < trials.size(); ++i) {
            const auto* pick = trials[rng.below(trials.size())];
            for (const auto* r : *pick) {
                degree.push_back(r->degree);
                capture.push_back(r->capture_fraction);
            }
        }
        stats.push_back(spearman(degree, capture));
    }
    std::sort(stats.begin(), stats.end());
    const double alpha = 0.5 * (1.0 - confidence);
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(stats.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, stats.size() - 1);
        return stats[lo] + (pos - static_cast<double>(lo)) * (stats[hi] - stats[lo]);
    };
    return {quantile(alpha), quantile(1.0 - alpha)};
}

}  // namespace risknet
