#include "risknet/coord_descent.hpp"

#include "risknet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace risknet {

SubspaceProjector SubspaceProjector::from_matrix(Matrix p) {
    if (p.rows() != p.cols() || p.rows() == 0) throw InvalidArgument("projector must be square and nonempty");
    if (max_abs(p - p.transpose()) > 1e-10) throw InvalidArgument("projector is not symmetric");
    if (max_abs(p * p - p) > 1e-10) throw InvalidArgument("projector is not idempotent");
    SubspaceProjector out;
    out.dim_ = static_cast<int>(p.rows());
    out.dim_image_ = static_cast<int>(std::lround(p.trace()));
    out.matrix_ = std::move(p);
    return out;
}

SubspaceProjector SubspaceProjector::from_basis(const Matrix& a) {
    if (a.cols() == 0 || numerical_rank(a) < a.cols()) {
        throw RankDeficient("subspace basis must have full column rank");
    }
    const Matrix gram = a.transpose() * a;
    Matrix p = a * gram.ldlt().solve(a.transpose());
    p = 0.5 * (p + p.transpose());
    return from_matrix(std::move(p));
}

SubspaceProjector SubspaceProjector::for_subset(const Subset& subset, int n_agents, int k) {
    if (subset.size() < 2) throw SubsetTooSmall("trade projector needs at least two agents");
    if (k < 1) throw InvalidArgument("k must be positive");
    for (AgentId id : subset) {
        if (id < 0 || id >= n_agents) throw IndexOutOfRange("agent " + std::to_string(id) + " out of range");
    }
    SubspaceProjector out;
    out.dim_ = n_agents * k;
    out.dim_image_ = static_cast<int>(subset.size() - 1) * k;
    out.subset_ = subset;
    out.k_ = k;
    return out;
}

SubspaceProjector subset_projector(const Subset& subset, int n_agents, int k) {
    return SubspaceProjector::for_subset(subset, n_agents, k);
}

Vector SubspaceProjector::apply(const Vector& x) const {
    if (x.size() != dim_) throw InvalidArgument("projector applied to a vector of wrong size");
    if (matrix_) return *matrix_ * x;
    // Centering within the subset, coordinate by coordinate.
    Vector out = Vector::Zero(dim_);
    Vector mean = Vector::Zero(k_);
    for (AgentId id : subset_) mean += x.segment(id * k_, k_);
    mean /= static_cast<double>(subset_.size());
    for (AgentId id : subset_) out.segment(id * k_, k_) = x.segment(id * k_, k_) - mean;
    return out;
}

Matrix SubspaceProjector::dense() const {
    if (matrix_) return *matrix_;
    Matrix p = Matrix::Zero(dim_, dim_);
    const double share = 1.0 / static_cast<double>(subset_.size());
    for (AgentId a : subset_) {
        for (AgentId b : subset_) {
            const double v = (a == b ? 1.0 : 0.0) - share;
            for (int c = 0; c < k_; ++c) p(a * k_ + c, b * k_ + c) = v;
        }
    }
    return p;
}

void DescentProblem::validate() const {
    const std::size_t m = projectors.size();
    if (m == 0) throw InvalidArgument("descent problem has no blocks");
    if (smoothness.size() != m || probabilities.size() != m) {
        throw InvalidArgument("descent problem: block lists have different lengths");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (!(smoothness[i] > 0.0)) throw InvalidArgument("smoothness constants must be positive");
        if (!(probabilities[i] > 0.0)) throw InvalidArgument("block probabilities must be positive");
        if (projectors[i].dim() != x0.size()) throw InvalidArgument("projector size does not match x0");
        total += probabilities[i];
    }
    if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("block probabilities must sum to one");
    if (!objective.value || !objective.gradient) throw InvalidArgument("descent problem has no objective");
}

Vector cd_step(const DescentProblem& problem, const Vector& x, std::size_t i) {
    if (i >= problem.projectors.size()) throw IndexOutOfRange("block index out of range");
    return x - problem.projectors[i].apply(problem.objective.gradient(x)) / problem.smoothness[i];
}

DescentTrace run_cd(const DescentProblem& problem, int max_steps, Rng& rng) {
    problem.validate();
    DescentTrace trace;
    Vector x = problem.x0;
    trace.objective.push_back(problem.objective.value(x));
    for (int t = 0; t < max_steps; ++t) {
        const std::size_t i = problem.projectors.size() == 1 ? 0 : rng.discrete(problem.probabilities);
        x = cd_step(problem, x, i);
        trace.indices.push_back(static_cast<int>(i));
        trace.objective.push_back(problem.objective.value(x));
    }
    trace.final_iterate = std::move(x);
    return trace;
}

double seminorm_A(const DescentProblem& problem, const Vector& x) {
    double sum = 0.0;
    for (std::size_t i = 0; i < problem.projectors.size(); ++i) {
        sum += problem.probabilities[i] / problem.smoothness[i] * problem.projectors[i].apply(x).squaredNorm();
    }
    return std::sqrt(sum);
}

Matrix weighted_projector_sum(const DescentProblem& problem) {
    const Eigen::Index n = problem.x0.size();
    Matrix a = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < problem.projectors.size(); ++i) {
        a += (problem.probabilities[i] / problem.smoothness[i]) * problem.projectors[i].dense();
    }
    return a;
}

double dual_norm_A(const Matrix& a_pinv, const Matrix& a, const Vector& y) {
    const Vector z = a_pinv * y;
    const double y_norm = y.norm();
    if ((a * z - y).norm() > 1e-8 * y_norm) return std::numeric_limits<double>::infinity();
    return std::sqrt(std::max(0.0, z.dot(y)));
}

double dual_norm_A(const DescentProblem& problem, const Vector& y) {
    const Matrix a = weighted_projector_sum(problem);
    return dual_norm_A(symmetric_pinv(a, 1e-12), a, y);
}

double rate_certificate(double r2, int t) {
    if (!(r2 >= 0.0)) throw InvalidArgument("R^2 must be non-negative");
    if (t < 1) throw InvalidArgument("t must be at least 1");
    return 2.0 * r2 / static_cast<double>(t);
}

double estimate_smoothness(const std::function<Matrix(const Vector&)>& hessian, const SubspaceProjector& projector,
                           const std::vector<Vector>& samples) {
    const Matrix p = projector.dense();
    double largest = 0.0;
    for (const Vector& x : samples) {
        const Matrix restricted = p * hessian(x) * p;
        Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (restricted + restricted.transpose()), Eigen::EigenvaluesOnly);
        largest = std::max(largest, eig.eigenvalues().maxCoeff());
    }
    return 1.1 * largest;
}

Vector stack_positions(const Network& agents) {
    if (agents.empty()) return {};
    const Eigen::Index k = agents.front().position.size();
    Vector x(static_cast<Eigen::Index>(agents.size()) * k);
    for (std::size_t i = 0; i < agents.size(); ++i) x.segment(static_cast<Eigen::Index>(i) * k, k) = agents[i].position;
    return x;
}

SurplusProblem make_surplus_problem(const Market& market, const Network& agents, const TradeDynamicSpec& dynamic,
                                    std::optional<double> smoothness_override) {
    const int n = static_cast<int>(agents.size());
    const int k = market.k();
    dynamic.validate(n);

    SurplusProblem sp;
    const auto ids = all_agents(agents);
    const Equilibrium eq = solve_equilibrium(market, agents, ids);
    sp.market_risk = eq.market_risk;
    sp.equilibrium = Vector(n * k);
    for (int i = 0; i < n; ++i) sp.equilibrium.segment(i * k, k) = eq.allocation[static_cast<std::size_t>(i)];

    // Zero-sum cash transfers: cash moved from agent 0 to agent i.
    sp.cash_transfers = Matrix::Zero(n * k, std::max(n - 1, 0));
    for (int i = 1; i < n; ++i) {
        sp.cash_transfers.block(0, i - 1, k, 1) = -market.cash_vector();
        sp.cash_transfers.block(i * k, i - 1, k, 1) = market.cash_vector();
    }

    std::vector<RiskSpec> risks;
    for (const auto& a : agents) risks.push_back(a.risk);
    const double offset = sp.market_risk;
    DescentProblem& problem = sp.problem;
    problem.objective.value = [market, risks, offset, k](const Vector& x) {
        double total = 0.0;
        for (std::size_t i = 0; i < risks.size(); ++i) {
            total += risk_value(market, risks[i], x.segment(static_cast<Eigen::Index>(i) * k, k));
        }
        return total - offset;
    };
    problem.objective.gradient = [market, risks, k](const Vector& x) {
        Vector g(x.size());
        for (std::size_t i = 0; i < risks.size(); ++i) {
            const auto seg = x.segment(static_cast<Eigen::Index>(i) * k, k);
            g.segment(static_cast<Eigen::Index>(i) * k, k) = -price_map(market, risks[i], seg);
        }
        return g;
    };
    problem.x0 = stack_positions(agents);
    problem.probabilities = dynamic.probabilities;
    for (const auto& s : dynamic.subsets) problem.projectors.push_back(subset_projector(s, n, k));

    if (smoothness_override) {
        if (!(*smoothness_override > 0.0)) throw InvalidArgument("smoothness override must be positive");
        problem.smoothness.assign(problem.projectors.size(), *smoothness_override);
    } else {
        auto hessian = [market, risks, k](const Vector& x) {
            const Eigen::Index n_total = x.size();
            Matrix h = Matrix::Zero(n_total, n_total);
            for (std::size_t i = 0; i < risks.size(); ++i) {
                const Eigen::Index at = static_cast<Eigen::Index>(i) * k;
                h.block(at, at, k, k) = risk_hessian(market, risks[i], x.segment(at, k));
            }
            return h;
        };
        std::vector<Vector> samples;
        constexpr int kSamples = 17;
        for (int s = 0; s < kSamples; ++s) {
            const double t = static_cast<double>(s) / (kSamples - 1);
            samples.push_back(problem.x0 + t * (sp.equilibrium - problem.x0));
        }
        for (const auto& proj : problem.projectors) {
            const double l = estimate_smoothness(hessian, proj, samples);
            problem.smoothness.push_back(std::max(l, 1e-12));
        }
    }
    return sp;
}

double distance_to_minimizers(const SurplusProblem& sp, const Matrix& a_pinv, const Matrix& a, const Vector& x) {
    const Vector d = x - sp.equilibrium;
    const Matrix& c = sp.cash_transfers;
    if (c.cols() == 0) return dual_norm_A(a_pinv, a, d);
    // min_u (d - C u)^T A^+ (d - C u)
    const Matrix gram = c.transpose() * a_pinv * c;
    const Vector u = gram.completeOrthogonalDecomposition().solve(c.transpose() * a_pinv * d);
    return dual_norm_A(a_pinv, a, d - c * u);
}

}  // namespace risknet
