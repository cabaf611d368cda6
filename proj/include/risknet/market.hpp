#pragma once

#include "risknet/linalg.hpp"

#include <optional>

namespace risknet {

/// Finite outcome space; outcomes are indexed 0..n-1.
struct OutcomeSpace {
    int n_outcomes = 0;
};

/// Payoff matrix of the k securities: row w is the payoff vector at outcome w.
class SecurityBasis {
public:
    /// Throws InvalidArgument for fewer than two outcomes, an empty basis or
    /// non-finite entries, and RankDeficient if the columns are dependent.
    explicit SecurityBasis(Matrix phi);

    static SecurityBasis identity(int n_outcomes);

    const Matrix& phi() const { return phi_; }
    int n_outcomes() const { return static_cast<int>(phi_.rows()); }
    int k() const { return static_cast<int>(phi_.cols()); }

private:
    Matrix phi_;
};

using Position = Vector;
using PricePoint = Vector;

/// Outcome space, securities and the cached cash direction. Immutable.
class Market {
public:
    static constexpr double kCashTolerance = 1e-10;
    static constexpr double kHullTolerance = 1e-8;

    const OutcomeSpace& outcomes() const { return outcomes_; }
    const SecurityBasis& basis() const { return basis_; }
    const Matrix& phi() const { return basis_.phi(); }
    int n_outcomes() const { return outcomes_.n_outcomes; }
    int k() const { return basis_.k(); }

    /// The position paying 1 at every outcome.
    const Vector& cash_vector() const { return cash_; }

    /// True when the securities span every outcome-contingent payoff (k = n).
    bool is_complete() const { return basis_.k() == outcomes_.n_outcomes; }

    /// r . phi(omega); throws IndexOutOfRange.
    double payout(const Position& r, int omega) const;

    /// Payout at every outcome, phi * r.
    Vector payouts(const Position& r) const { return phi() * r; }

    /// Expected security payouts under outcome distribution q, phi^T q.
    PricePoint price_of(const Vector& q) const { return phi().transpose() * q; }

    /// Simplex weights q with ||phi^T q - pi||_inf <= tol, if any exist.
    std::optional<Vector> hull_weights(const PricePoint& pi, double tol) const;

    bool price_hull_contains(const PricePoint& pi, double tol) const {
        return hull_weights(pi, tol).has_value();
    }

    /// Complete markets only: the unique position with the given payouts.
    Position position_with_payouts(const Vector& payouts) const;

    /// Complete markets only: the unique outcome weights q with phi^T q = pi.
    Vector outcome_weights_of(const PricePoint& pi) const;

    /// Component of r along the cash direction removed (orthogonal projection).
    Position without_cash(const Position& r) const;

    static Market complete(int n_outcomes);

private:
    friend Market validate_basis(SecurityBasis basis);
    Market(SecurityBasis basis, Vector cash);

    OutcomeSpace outcomes_;
    SecurityBasis basis_;
    Vector cash_;
    Eigen::PartialPivLU<Matrix> square_lu_;
};

/// Builds a market, solving phi r = 1 by least squares for the cash vector.
/// Throws NoCashDirection when the residual exceeds 1e-10.
Market validate_basis(SecurityBasis basis);

/// Lawson-Hanson non-negative least squares: argmin ||A w - y|| over w >= 0.
Vector nnls(const Matrix& a, const Vector& y, int max_iterations = 0);

}  // namespace risknet
