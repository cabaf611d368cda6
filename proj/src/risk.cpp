#include "risknet/risk.hpp"

#include "risknet/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace risknet {

RiskSpec RiskSpec::entropic(double affinity, Vector belief) {
    RiskSpec spec{RiskKind::Entropic, affinity, std::move(belief)};
    spec.validate();
    return spec;
}

RiskSpec RiskSpec::entropic_uniform(double affinity, int n_outcomes) {
    return entropic(affinity, Vector::Constant(n_outcomes, 1.0 / n_outcomes));
}

void RiskSpec::validate() const {
    if (!(affinity > 0.0) || !std::isfinite(affinity)) {
        throw NonPositiveAffinity("risk affinity must be positive, got " + std::to_string(affinity));
    }
    if (belief.size() < 2) throw InvalidArgument("belief needs at least two outcomes");
    if (!(belief.array() > 0.0).all() || !belief.allFinite()) {
        throw InvalidArgument("belief entries must be strictly positive");
    }
    if (std::abs(belief.sum() - 1.0) > 1e-12) throw InvalidArgument("belief must sum to one");
}

void RiskSpec::validate_for(const Market& market) const {
    validate();
    if (belief.size() != market.n_outcomes()) {
        throw InvalidArgument("belief has " + std::to_string(belief.size()) + " entries for " +
                              std::to_string(market.n_outcomes()) + " outcomes");
    }
}

namespace {

Vector tilted_exponents(const Market& market, const RiskSpec& spec, const Position& r) {
    return spec.belief.array().log() - market.payouts(r).array() / spec.affinity;
}

}  // namespace

double risk_value(const Market& market, const RiskSpec& spec, const Position& r) {
    // Subtracting log sum p makes rho(0) = 0 exactly despite rounding in p.
    const Vector log_p = spec.belief.array().log();
    return spec.affinity * (log_sum_exp(tilted_exponents(market, spec, r)) - log_sum_exp(log_p));
}

Vector log_price_weights(const Market& market, const RiskSpec& spec, const Position& r) {
    Vector e = tilted_exponents(market, spec, r);
    const double lse = log_sum_exp(e);
    return e.array() - lse;
}

Vector price_weights(const Market& market, const RiskSpec& spec, const Position& r) {
    return log_price_weights(market, spec, r).array().exp();
}

PricePoint price_map(const Market& market, const RiskSpec& spec, const Position& r) {
    return market.price_of(price_weights(market, spec, r));
}

Matrix risk_hessian(const Market& market, const RiskSpec& spec, const Position& r) {
    const Vector w = price_weights(market, spec, r);
    const Matrix& phi = market.phi();
    const Vector mean = phi.transpose() * w;
    const Matrix centered = phi.rowwise() - mean.transpose();
    return centered.transpose() * w.asDiagonal() * centered / spec.affinity;
}

double outcome_penalty(const RiskSpec& spec, const Vector& q) {
    double kl = 0.0;
    for (Eigen::Index i = 0; i < q.size(); ++i) {
        if (q[i] > 0.0) kl += q[i] * (std::log(q[i]) - std::log(spec.belief[i]));
    }
    return spec.affinity * kl;
}

namespace {

// sup_theta <pi, theta> - log sum_w p(w) exp(phi(w) . theta), by damped Newton.
// The objective is flat along the cash direction; steps use the pseudoinverse.
double incomplete_penalty(const Market& market, const RiskSpec& spec, const PricePoint& pi) {
    const Matrix& phi = market.phi();
    const Vector log_p = spec.belief.array().log();
    auto objective = [&](const Vector& theta, Vector* w) {
        Vector e = log_p + phi * theta;
        const double lse = log_sum_exp(e);
        if (w) *w = (e.array() - lse).exp();
        return pi.dot(theta) - lse;
    };
    Vector theta = Vector::Zero(market.k());
    Vector w;
    double value = objective(theta, &w);
    for (int iter = 0; iter < 200; ++iter) {
        const Vector grad = pi - phi.transpose() * w;
        if (grad.cwiseAbs().maxCoeff() <= 1e-13) break;
        const Vector mean = phi.transpose() * w;
        const Matrix centered = phi.rowwise() - mean.transpose();
        const Matrix hess = centered.transpose() * w.asDiagonal() * centered;
        Vector step = symmetric_pinv(hess, 1e-14) * grad;
        double t = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 60; ++ls) {
            Vector trial_w;
            const Vector trial = theta + t * step;
            const double trial_value = objective(trial, &trial_w);
            if (trial_value >= value + 1e-4 * t * grad.dot(step) ||
                (trial_value >= value && (pi - phi.transpose() * trial_w).norm() < grad.norm())) {
                theta = trial;
                value = trial_value;
                w = std::move(trial_w);
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if (!moved) break;
    }
    return spec.affinity * value;
}

}  // namespace

double penalty_value(const Market& market, const RiskSpec& spec, const PricePoint& pi) {
    spec.validate_for(market);
    if (!market.price_hull_contains(pi, Market::kHullTolerance)) {
        throw NotInHull("price point is outside the price polytope");
    }
    if (market.is_complete()) {
        Vector q = market.outcome_weights_of(pi);
        q = q.cwiseMax(0.0);
        q /= q.sum();
        return outcome_penalty(spec, q);
    }
    return incomplete_penalty(market, spec, pi);
}

RiskSpec scale_risk(const RiskSpec& spec, double b) {
    if (!(b > 0.0) || !std::isfinite(b)) {
        throw NonPositiveAffinity("scaling factor must be positive, got " + std::to_string(b));
    }
    RiskSpec scaled = spec;
    scaled.affinity *= b;
    return scaled;
}

}  // namespace risknet
