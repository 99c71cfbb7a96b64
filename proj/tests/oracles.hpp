// Test-only oracles, kept independent of the library's solver path.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#ifdef AGEFLOW_HAVE_EIGEN
#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#endif

namespace oracles {

// F(alpha) = beta (1 - e^{-(alpha+mu)}) / (alpha+mu): closed-form kernel of a
// constant birth brick on a unit age window with constant death rate.
inline double brick_kernel(double beta, double mu, double alpha) {
    double s = alpha + mu;
    if (std::abs(s) < 1e-12) return beta;
    return beta * (-std::expm1(-s)) / s;
}

// Unique root of F(alpha) = 1, bisection on the closed form.
inline double brick_root(double beta, double mu) {
    double lo = -50.0, hi = 50.0;
    while (brick_kernel(beta, mu, lo) < 1.0) lo *= 2.0;
    while (brick_kernel(beta, mu, hi) > 1.0) hi *= 2.0;
    for (int it = 0; it < 300 && hi - lo > 1e-13; ++it) {
        double mid = 0.5 * (lo + hi);
        (brick_kernel(beta, mu, mid) >= 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

#ifdef AGEFLOW_HAVE_EIGEN

// Dense Neumann-gauge spatial operator on n_x+1 nodes: d v_xx + c(x) v_x - mu(x) v
// with mirror-ghost walls and centered advection.
inline Eigen::MatrixXd dense_neumann_operator(int n_x, double d, const std::function<double(double)>& c,
                                              const std::function<double(double)>& mu) {
    const double dx = 1.0 / n_x;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n_x + 1, n_x + 1);
    for (int i = 0; i <= n_x; ++i) {
        double x = i * dx;
        if (i == 0) {
            A(i, i) += -2.0 * d / (dx * dx);
            A(i, i + 1) += 2.0 * d / (dx * dx);
        } else if (i == n_x) {
            A(i, i) += -2.0 * d / (dx * dx);
            A(i, i - 1) += 2.0 * d / (dx * dx);
        } else {
            A(i, i - 1) += d / (dx * dx) - c(x) / (2.0 * dx);
            A(i, i) += -2.0 * d / (dx * dx);
            A(i, i + 1) += d / (dx * dx) + c(x) / (2.0 * dx);
        }
        A(i, i) += -mu(x);
    }
    return A;
}

// exp(A * t) applied to the constant-one vector.
inline std::vector<double> expm_apply_ones(const Eigen::MatrixXd& A, double t) {
    Eigen::MatrixXd E = (A * t).exp();
    Eigen::VectorXd v = E * Eigen::VectorXd::Ones(A.rows());
    return {v.data(), v.data() + v.size()};
}

#endif // AGEFLOW_HAVE_EIGEN

} // namespace oracles
