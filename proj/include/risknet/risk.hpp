#pragma once

#include "risknet/market.hpp"

namespace risknet {

/// Risk families. Solvers only go through the functions declared below, so
/// a new family only needs an implementation of them.
enum class RiskKind { Entropic };

/// A convex monetary risk measure: family, risk affinity b and the reference
/// distribution over outcomes. Entropic risk is
///   rho(r) = b log sum_w p(w) exp(-X[r](w) / b).
struct RiskSpec {
    RiskKind kind = RiskKind::Entropic;
    double affinity = 1.0;
    Vector belief;

    /// Throws NonPositiveAffinity or InvalidArgument.
    static RiskSpec entropic(double affinity, Vector belief);
    static RiskSpec entropic_uniform(double affinity, int n_outcomes);

    void validate() const;
    void validate_for(const Market& market) const;
};

/// Risk in dollars of position r.
double risk_value(const Market& market, const RiskSpec& spec, const Position& r);

/// Log of the tilted outcome distribution w ~ p exp(-X[r]/b).
Vector log_price_weights(const Market& market, const RiskSpec& spec, const Position& r);

/// Outcome weights of the price map, strictly positive and summing to one.
Vector price_weights(const Market& market, const RiskSpec& spec, const Position& r);

/// The agent's price: phi^T w, equal to minus the gradient of the risk.
PricePoint price_map(const Market& market, const RiskSpec& spec, const Position& r);

/// Hessian of the risk in position coordinates, phi^T (diag w - w w^T) phi / b.
Matrix risk_hessian(const Market& market, const RiskSpec& spec, const Position& r);

/// Penalty (conjugate) of an outcome distribution q: b KL(q || p).
double outcome_penalty(const RiskSpec& spec, const Vector& q);

/// Penalty alpha(pi) with rho(r) = sup_pi <pi, -r> - alpha(pi). In incomplete
/// markets this is the least outcome penalty over all q with phi^T q = pi.
/// Throws NotInHull when pi is outside the price polytope (tolerance 1e-8).
double penalty_value(const Market& market, const RiskSpec& spec, const PricePoint& pi);

/// Perspective scaling b rho(r / b): the affinity is multiplied by b.
RiskSpec scale_risk(const RiskSpec& spec, double b);

}  // namespace risknet
