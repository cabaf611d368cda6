#pragma once

#include "risknet/graph.hpp"
#include "risknet/trade.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace risknet {

enum class DynamicKind { Edge, Node, FairEdge, FairNode };

DynamicKind parse_dynamic_kind(std::string_view text);
std::string to_string(DynamicKind kind);

/// One experiment: market, agent population, network family and dynamic.
/// Defaults: complete 3-outcome market, 20 entropic agents with b = 1 and
/// uniform beliefs, positions uniform in [-50, 50]^k, Barabasi-Albert graphs
/// with m = 2, fair edge dynamic, 10 trials of at most 200 steps,
/// stop_tol 1e-8, seed 1.
struct ExperimentConfig {
    Matrix basis = Matrix::Identity(3, 3);
    int n_agents = 20;
    RiskKind risk_kind = RiskKind::Entropic;
    double affinity_low = 1.0;
    double affinity_high = 1.0;
    std::optional<Vector> belief;  // shared; uniform when absent
    std::vector<Vector> beliefs;   // per agent, overrides `belief`
    Vector position_low = Vector::Constant(3, -50.0);
    Vector position_high = Vector::Constant(3, 50.0);
    std::string graph = "ba:2";
    DynamicKind dynamic = DynamicKind::FairEdge;
    int trials = 10;
    int max_steps = 200;
    double stop_tol = 1e-8;
    std::uint64_t seed = 1;

    /// Throws ValidationError naming the violated invariant.
    void validate() const;
    GraphKind graph_kind() const;
    Market market() const;
};

/// Parses a JSON config. Unknown keys and malformed JSON raise ParseError
/// (with the line for syntax errors); invariant violations raise
/// ValidationError.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// One sampled trial: graph, agents and dynamic, plus the generator that
/// drives the dynamic afterwards.
struct TrialInstance {
    int trial = 0;
    std::uint64_t seed = 0;
    Graph graph;
    Network agents;
    TradeDynamicSpec dynamic;
    Rng rng{0};
};

TradeDynamicSpec build_dynamic(DynamicKind kind, const Graph& graph);

/// Trial seeds are child_seed(config.seed, trial); the same trial always
/// samples the same instance.
TrialInstance sample_trial(const ExperimentConfig& config, const Market& market, int trial);

struct CaptureRecord {
    int trial = 0;
    int agent = 0;
    int degree = 0;
    double capture_fraction = 0.0;  // agent's risk drop / initial global surplus
};

struct TrialTrace {
    int trial = 0;
    SimulationTrace trace;
};

struct TrialFailure {
    int trial = 0;
    std::string message;
};

struct ExperimentResult {
    std::vector<TrialTrace> traces;
    std::vector<CaptureRecord> records;
    std::vector<TrialFailure> failures;
    int n_agents = 0;
};

/// Runs every trial (concurrently when `threads` > 1); results are ordered
/// by trial. Engine errors in a trial are recorded, not rethrown.
ExperimentResult run_experiment(const ExperimentConfig& config, unsigned threads = 0);

/// Spearman rank correlation with average ranks for ties; zero when either
/// side is constant.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

struct DegreeSummary {
    int degree = 0;
    int count = 0;
    double mean_capture = 0.0;
    double median_capture = 0.0;
};

struct CaptureSummary {
    std::vector<DegreeSummary> by_degree;
    double spearman = 0.0;
    double fair_line = 0.0;  // 1 / N
};

/// Throws EmptyInput.
CaptureSummary analyze_capture(const std::vector<CaptureRecord>& records);

/// Percentile bootstrap interval of the degree/capture Spearman correlation,
/// resampling whole trials.
std::pair<double, double> bootstrap_spearman(const std::vector<CaptureRecord>& records, int resamples,
                                             double confidence, std::uint64_t seed);

struct TraceRow {
    int trial = 0;
    int step = 0;
    double surplus = 0.0;
    double surplus_fraction = 0.0;  // remaining share of the initial surplus
    int subset = -1;
};

std::vector<TraceRow> trace_rows(const std::vector<TrialTrace>& traces);

struct OutputOptions {
    bool svg = false;
};

/// Writes trace.csv, capture.csv, summary.csv and optionally trace.svg and
/// capture.svg into out_dir. Throws IoError.
void emit_outputs(const ExperimentResult& result, const std::filesystem::path& out_dir,
                  const OutputOptions& options = {});

std::string format_double(double value);
std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path);
std::vector<CaptureRecord> read_capture_csv(const std::filesystem::path& path);

std::string trace_svg(const std::vector<TrialTrace>& traces);
std::string capture_svg(const std::vector<CaptureRecord>& records, int n_agents);

}  // namespace risknet
