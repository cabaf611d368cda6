#pragma once

#include "risknet/linalg.hpp"
#include "risknet/rng.hpp"
#include "risknet/trade.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace risknet {

/// Orthogonal projector A A^+ onto one update subspace. Trade projectors
/// keep their closed centering form and are applied without a dense matrix.
class SubspaceProjector {
public:
    /// Validates symmetry and idempotence (1e-10) of an explicit projector.
    static SubspaceProjector from_matrix(Matrix p);

    /// A A^+ for a full-column-rank A; throws RankDeficient otherwise.
    static SubspaceProjector from_basis(const Matrix& a);

    /// (B_S B_S^+) kron I_k for agents S among n_agents, agent-major layout.
    static SubspaceProjector for_subset(const Subset& subset, int n_agents, int k);

    Vector apply(const Vector& x) const;
    Matrix dense() const;
    int dim() const { return dim_; }
    int dim_image() const { return dim_image_; }

private:
    SubspaceProjector() = default;

    int dim_ = 0;
    int dim_image_ = 0;
    std::optional<Matrix> matrix_;
    Subset subset_;
    int k_ = 1;
};

/// (B_S B_S^+) kron I_k; throws SubsetTooSmall for |S| < 2.
SubspaceProjector subset_projector(const Subset& subset, int n_agents, int k);

struct Objective {
    std::function<double(const Vector&)> value;
    std::function<Vector(const Vector&)> gradient;
};

struct DescentProblem {
    Objective objective;
    std::vector<SubspaceProjector> projectors;
    std::vector<double> smoothness;
    std::vector<double> probabilities;
    Vector x0;

    void validate() const;
};

struct DescentTrace {
    std::vector<double> objective;  // F(x^0), F(x^1), ...
    std::vector<int> indices;       // block chosen at each step
    Vector final_iterate;
};

/// x - (1/L_i) P_i grad F(x).
Vector cd_step(const DescentProblem& problem, const Vector& x, std::size_t i);

/// Algorithm with blocks drawn i.i.d. from the problem's probabilities.
DescentTrace run_cd(const DescentProblem& problem, int max_steps, Rng& rng);

/// (sum_i p_i / L_i ||P_i x||^2)^(1/2).
double seminorm_A(const DescentProblem& problem, const Vector& x);

/// A = sum_i (p_i / L_i) P_i.
Matrix weighted_projector_sum(const DescentProblem& problem);

/// <A^+ y, y>^(1/2) for y in im(A), +infinity otherwise.
double dual_norm_A(const DescentProblem& problem, const Vector& y);
double dual_norm_A(const Matrix& a_pinv, const Matrix& a, const Vector& y);

/// Expected suboptimality bound 2 R^2 / t.
double rate_certificate(double r2, int t);

/// 1.1 times the largest eigenvalue of P H(x) P over the sample points.
double estimate_smoothness(const std::function<Matrix(const Vector&)>& hessian, const SubspaceProjector& projector,
                           const std::vector<Vector>& samples);

/// Surplus of a trade network as a descent problem on the stacked
/// positions (agent-major, k entries per agent).
struct SurplusProblem {
    DescentProblem problem;
    double market_risk = 0.0;
    Vector equilibrium;                 // one minimizer (stacked allocation)
    Matrix cash_transfers;              // columns span zero-sum cash moves
};

/// Projectors from the dynamic's subsets, probabilities from the dynamic.
/// Smoothness constants are sampled on the segment from the initial point to
/// the equilibrium unless `smoothness_override` is given.
SurplusProblem make_surplus_problem(const Market& market, const Network& agents, const TradeDynamicSpec& dynamic,
                                    std::optional<double> smoothness_override = std::nullopt);

Vector stack_positions(const Network& agents);

/// Smallest dual-norm distance from x to the minimizer set of a surplus
/// problem (the equilibrium plus any zero-sum cash transfer).
double distance_to_minimizers(const SurplusProblem& sp, const Matrix& a_pinv, const Matrix& a, const Vector& x);

}  // namespace risknet
