#include "CLI11.hpp"
#include "risknet/coord_descent.hpp"
#include "risknet/errors.hpp"
#include "risknet/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <string>

using namespace risknet;

namespace {

std::string join(const Vector& v) {
    std::string out;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += format_double(v[i]);
    }
    return out;
}

int simulate(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& out_dir, bool svg,
             unsigned threads) {
    ExperimentConfig config = load_config(config_path);
    if (seed) config.seed = *seed;
    const ExperimentResult result = run_experiment(config, threads);
    emit_outputs(result, out_dir, OutputOptions{svg});

    for (const auto& f : result.failures) std::cerr << "trial " << f.trial << " failed: " << f.message << '\n';
    for (const auto& t : result.traces)
        for (const auto& w : t.trace.warnings) std::cerr << "trial " << t.trial << ": " << w << '\n';

    int converged = 0;
    for (const auto& t : result.traces) converged += t.trace.converged ? 1 : 0;
    std::cout << "trials " << result.traces.size() << ", converged " << converged << ", failed "
              << result.failures.size() << '\n';
    if (!result.records.empty()) {
        std::cout << "degree/capture spearman " << format_double(analyze_capture(result.records).spearman) << '\n';
    }
    std::cout << "wrote " << out_dir << '\n';
    return result.failures.empty() ? 0 : 2;
}

int equilibrium(const std::string& config_path, std::optional<std::uint64_t> seed, int trial) {
    ExperimentConfig config = load_config(config_path);
    if (seed) config.seed = *seed;
    const Market market = config.market();
    const TrialInstance inst = sample_trial(config, market, trial);
    const auto ids = all_agents(inst.agents);
    const Equilibrium eq = solve_equilibrium(market, inst.agents, ids);

    std::cout << "price," << join(eq.price) << '\n';
    std::cout << "market_risk," << format_double(eq.market_risk) << '\n';
    std::cout << "initial_surplus," << format_double(global_surplus(market, inst.agents)) << '\n';
    for (std::size_t i = 0; i < eq.allocation.size(); ++i) {
        std::cout << "allocation," << i << ',' << join(eq.allocation[i]) << '\n';
    }

    // Common beliefs: the equilibrium splits the aggregate in proportion to
    // the affinities, up to cash.
    bool common = true;
    for (const auto& a : inst.agents) common = common && a.risk.belief == inst.agents.front().risk.belief;
    if (common) {
        Position total = Position::Zero(market.k());
        std::vector<double> affinities;
        for (const auto& a : inst.agents) {
            total += a.position;
            affinities.push_back(a.risk.affinity);
        }
        const RiskSpec base = RiskSpec::entropic(1.0, inst.agents.front().risk.belief);
        const auto closed = proportional_equilibrium(market, base, affinities, total);
        double gap = 0.0;
        for (std::size_t i = 0; i < closed.size(); ++i) {
            std::cout << "proportional," << i << ',' << join(closed[i]) << '\n';
            gap = std::max(gap, (market.without_cash(closed[i]) - market.without_cash(eq.allocation[i]))
                                    .cwiseAbs()
                                    .maxCoeff());
        }
        std::cout << "proportional_gap," << format_double(gap) << '\n';
    }
    return 0;
}

int cdbench(const std::string& graph, int steps, std::uint64_t seed, std::optional<double> smoothness) {
    ExperimentConfig config;
    const GraphKind kind = parse_graph_kind(graph);
    config.graph = graph;
    config.n_agents = kind.n_vertices();
    config.dynamic = DynamicKind::FairEdge;
    config.seed = seed;
    config.validate();
    const Market market = config.market();
    TrialInstance inst = sample_trial(config, market, 0);
    const SurplusProblem sp = make_surplus_problem(market, inst.agents, inst.dynamic, smoothness);
    const DescentTrace trace = run_cd(sp.problem, steps, inst.rng);

    // R^2 is only estimated: the largest distance to the minimizers seen
    // along this trajectory, which underestimates the sublevel-set maximum.
    const Matrix a = weighted_projector_sum(sp.problem);
    const Matrix a_pinv = symmetric_pinv(a);
    Vector x = sp.problem.x0;
    double r2 = std::pow(distance_to_minimizers(sp, a_pinv, a, x), 2);
    for (int idx : trace.indices) {
        x = cd_step(sp.problem, x, static_cast<std::size_t>(idx));
        r2 = std::max(r2, std::pow(distance_to_minimizers(sp, a_pinv, a, x), 2));
    }
    std::cerr << "R2 trajectory estimate (lower bound on the true value): " << format_double(r2) << '\n';

    std::cout << "t,F,bound\n";
    for (std::size_t t = 0; t < trace.objective.size(); ++t) {
        std::cout << t << ',' << format_double(trace.objective[t]) << ',';
        if (t == 0) {
            std::cout << "inf";
        } else {
            std::cout << format_double(rate_certificate(r2, static_cast<int>(t)));
        }
        std::cout << '\n';
    }
    return 0;
}

int graphinfo(const std::string& graph, std::uint64_t seed) {
    const Graph g = generate_graph(parse_graph_kind(graph), seed);
    const SpectralReport r = rate_report(g);
    std::cout << "lambda2,n_edges,diameter,mohar_lower,rate_coefficient\n"
              << format_double(r.lambda2) << ',' << r.n_edges << ',' << r.diameter << ','
              << format_double(r.mohar_lower) << ',' << format_double(r.rate_coefficient) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Risk-measure trading networks: simulation, equilibria and convergence certificates"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", graph;
    std::optional<std::uint64_t> seed;
    std::uint64_t graph_seed = 1;
    std::optional<double> smoothness;
    bool svg = false;
    unsigned threads = 0;
    int steps = 100, trial = 0;

    auto* sim = app.add_subcommand("simulate", "Run the configured experiment and write CSV/SVG outputs");
    sim->add_option("--config", config_path, "JSON experiment config")->required()->check(CLI::ExistingFile);
    sim->add_option("--seed", seed, "Override the master seed");
    sim->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
    sim->add_flag("--svg", svg, "Also write trace.svg and capture.svg");
    sim->add_option("--threads", threads, "Worker threads (0: hardware concurrency)");

    auto* eq = app.add_subcommand("equilibrium", "Print the equilibrium of one sampled trial");
    eq->add_option("--config", config_path, "JSON experiment config")->required()->check(CLI::ExistingFile);
    eq->add_option("--seed", seed, "Override the master seed");
    eq->add_option("--trial", trial, "Trial index to sample")->check(CLI::NonNegativeNumber);

    auto* cd = app.add_subcommand("cdbench", "Coordinate-descent benchmark on a fair edge dynamic");
    cd->add_option("--graph", graph, "Graph kind, e.g. ba:20,2 or cycle:8")->required();
    cd->add_option("--steps", steps, "Number of steps")->check(CLI::PositiveNumber)->capture_default_str();
    cd->add_option("--seed", graph_seed, "Seed")->capture_default_str();
    cd->add_option("--smoothness", smoothness, "Use this L_i for every block instead of estimating it")
        ->check(CLI::PositiveNumber);

    auto* gi = app.add_subcommand("graphinfo", "Print the spectral report of a graph");
    gi->add_option("--graph", graph, "Graph kind, e.g. hypercube:4")->required();
    gi->add_option("--seed", graph_seed, "Seed for random graph kinds")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*sim) return simulate(config_path, seed, out_dir, svg, threads);
        if (*eq) return equilibrium(config_path, seed, trial);
        if (*cd) return cdbench(graph, steps, graph_seed, smoothness);
        if (*gi) return graphinfo(graph, graph_seed);
    } catch (const SolverDiverged& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
