#include "risknet/linalg.hpp"

#include <cmath>
#include <limits>

namespace risknet {

double log_sum_exp(const Vector& v) {
    if (v.size() == 0) return -std::numeric_limits<double>::infinity();
    const double hi = v.maxCoeff();
    if (!std::isfinite(hi)) return hi;
    return hi + std::log((v.array() - hi).exp().sum());
}

Matrix symmetric_pinv(const Matrix& a, double rel_cutoff) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
    const Vector& values = eig.eigenvalues();
    const double scale = values.cwiseAbs().maxCoeff();
    Vector inverted = Vector::Zero(values.size());
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (std::abs(values[i]) > rel_cutoff * scale) inverted[i] = 1.0 / values[i];
    }
    const Matrix& v = eig.eigenvectors();
    return v * inverted.asDiagonal() * v.transpose();
}

int numerical_rank(const Matrix& a, double rel_cutoff) {
    if (a.size() == 0) return 0;
    Eigen::JacobiSVD<Matrix> svd(a);
    const Vector& s = svd.singularValues();
    if (s.size() == 0 || s[0] == 0.0) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s[i] > rel_cutoff * s[0]) ++rank;
    }
    return rank;
}

double max_abs(const Matrix& a) {
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

}  // namespace risknet
