#include "risknet/market.hpp"

#include "risknet/errors.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace risknet {

SecurityBasis::SecurityBasis(Matrix phi) : phi_(std::move(phi)) {
    if (phi_.rows() < 2) throw InvalidArgument("security basis needs at least two outcomes");
    if (phi_.cols() < 1) throw InvalidArgument("security basis needs at least one security");
    if (!phi_.allFinite()) throw InvalidArgument("security basis has non-finite entries");
    if (numerical_rank(phi_) < phi_.cols()) {
        throw RankDeficient("security basis of " + std::to_string(phi_.cols()) +
                            " columns is not of full column rank");
    }
}

SecurityBasis SecurityBasis::identity(int n_outcomes) {
    return SecurityBasis(Matrix::Identity(n_outcomes, n_outcomes));
}

Market::Market(SecurityBasis basis, Vector cash)
    : outcomes_{basis.n_outcomes()}, basis_(std::move(basis)), cash_(std::move(cash)) {
    if (is_complete()) square_lu_.compute(basis_.phi());
}

Market validate_basis(SecurityBasis basis) {
    const Matrix& phi = basis.phi();
    const Vector ones = Vector::Ones(phi.rows());
    Vector cash = phi.colPivHouseholderQr().solve(ones);
    const double residual = (phi * cash - ones).cwiseAbs().maxCoeff();
    if (!(residual <= Market::kCashTolerance)) {
        throw NoCashDirection("constant payoff is not in the span of the securities (residual " +
                              std::to_string(residual) + ")");
    }
    return Market(std::move(basis), std::move(cash));
}

Market Market::complete(int n_outcomes) {
    return validate_basis(SecurityBasis::identity(n_outcomes));
}

double Market::payout(const Position& r, int omega) const {
    if (omega < 0 || omega >= n_outcomes()) {
        throw IndexOutOfRange("outcome " + std::to_string(omega) + " out of range");
    }
    if (r.size() != k()) throw InvalidArgument("position has wrong dimension");
    return phi().row(omega).dot(r);
}

Position Market::position_with_payouts(const Vector& payouts) const {
    if (!is_complete()) throw InvalidArgument("position_with_payouts needs a complete market");
    return square_lu_.solve(payouts);
}

Vector Market::outcome_weights_of(const PricePoint& pi) const {
    if (!is_complete()) throw InvalidArgument("outcome_weights_of needs a complete market");
    return square_lu_.transpose().solve(pi);
}

Position Market::without_cash(const Position& r) const {
    return r - (r.dot(cash_) / cash_.squaredNorm()) * cash_;
}

std::optional<Vector> Market::hull_weights(const PricePoint& pi, double tol) const {
    if (!(tol > 0.0)) throw InvalidArgument("hull tolerance must be positive");
    if (pi.size() != k() || !pi.allFinite()) return std::nullopt;
    if (is_complete()) {
        // Unique weights; clamp rounding noise and check the residual.
        Vector q = outcome_weights_of(pi).cwiseMax(0.0);
        const double total = q.sum();
        if (!(total > 0.0)) return std::nullopt;
        q /= total;
        if ((price_of(q) - pi).cwiseAbs().maxCoeff() > tol) return std::nullopt;
        return q;
    }
    // Augment with a sum-to-one row, then renormalize and check the residual
    // exactly. Any positive weight gives a zero residual for hull points; a
    // comparable scale keeps the stopping test of nnls meaningful.
    const double weight = 1.0 + max_abs(phi()) + pi.cwiseAbs().maxCoeff();
    Matrix a(k() + 1, n_outcomes());
    a.topRows(k()) = phi().transpose();
    a.row(k()).setConstant(weight);
    Vector y(k() + 1);
    y.head(k()) = pi;
    y[k()] = weight;
    Vector w = nnls(a, y);
    const double total = w.sum();
    if (!(total > 0.0)) return std::nullopt;
    w /= total;
    if ((price_of(w) - pi).cwiseAbs().maxCoeff() > tol) return std::nullopt;
    return w;
}

Vector nnls(const Matrix& a, const Vector& y, int max_iterations) {
    const Eigen::Index n = a.cols();
    if (max_iterations <= 0) max_iterations = static_cast<int>(3 * n + 30);
    Vector x = Vector::Zero(n);
    std::vector<bool> passive(static_cast<std::size_t>(n), false);
    const double tol = 1e-14 * static_cast<double>(a.rows()) * (1.0 + max_abs(a)) * (1.0 + y.cwiseAbs().maxCoeff());

    auto solve_passive = [&](Vector& z) {
        std::vector<Eigen::Index> idx;
        for (Eigen::Index j = 0; j < n; ++j)
            if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
        Matrix sub(a.rows(), static_cast<Eigen::Index>(idx.size()));
        for (std::size_t c = 0; c < idx.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = a.col(idx[c]);
        const Vector sol = sub.colPivHouseholderQr().solve(y);
        z = Vector::Zero(n);
        for (std::size_t c = 0; c < idx.size(); ++c) z[idx[c]] = sol[static_cast<Eigen::Index>(c)];
    };

    for (int outer = 0; outer < max_iterations; ++outer) {
        const Vector grad = a.transpose() * (y - a * x);
        Eigen::Index best = -1;
        double best_value = tol;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!passive[static_cast<std::size_t>(j)] && grad[j] > best_value) {
                best_value = grad[j];
                best = j;
            }
        }
        if (best < 0) break;
        passive[static_cast<std::size_t>(best)] = true;

        for (int inner = 0; inner <= n; ++inner) {
            Vector z;
            solve_passive(z);
            bool feasible = true;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (passive[static_cast<std::size_t>(j)] && z[j] <= 0.0) feasible = false;
            }
            if (feasible) {
                x = z;
                break;
            }
            double alpha = 1.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (passive[static_cast<std::size_t>(j)] && z[j] <= 0.0) {
                    alpha = std::min(alpha, x[j] / (x[j] - z[j]));
                }
            }
            x += alpha * (z - x);
            for (Eigen::Index j = 0; j < n; ++j) {
                if (passive[static_cast<std::size_t>(j)] && x[j] <= 1e-15) {
                    passive[static_cast<std::size_t>(j)] = false;
                    x[j] = 0.0;
                }
            }
        }
    }
    return x;
}

}  // namespace risknet
