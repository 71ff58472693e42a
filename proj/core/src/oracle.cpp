#include "knlayer/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace knlayer {

QuadratureRule::QuadratureRule(int order) : order_(order) {
    if (order < 1)
        throw std::invalid_argument("quadrature order must be positive");

    // Laguerre Jacobi matrix; its eigenvalues seed the nodes t_i.
    Eigen::VectorXd diag(order), subdiag(order > 1 ? order - 1 : 0);
    for (int k = 0; k < order; ++k)
        diag[k] = 2.0 * k + 1.0;
    for (int k = 1; k < order; ++k)
        subdiag[k - 1] = static_cast<double>(k);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, subdiag, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("quadrature eigensolve failed");

    // The textbook squared-first-eigenvector weights lose all *relative*
    // accuracy on the extreme nodes once the order grows: the components
    // shrink like e^{-t_i/2} and drown in the eigensolver's absolute noise,
    // after which the far-out nodes poison high-degree integrands. Instead,
    // Newton-polish each eigenvalue on L_n and use the classical derivative
    // formula mu_i = t_i / ((n+1) L_{n+1}(t_i))^2, which keeps even the
    // tiniest weights relatively accurate.
    const int n = order;
    struct Lag {
        double lm1, l, lp1; // L_{n-1}, L_n, L_{n+1}
    };
    const auto eval = [n](double t) {
        double prev = 1.0;    // L_0
        double cur = 1.0 - t; // L_1
        for (int k = 1; k < n; ++k) {
            const double next = ((2.0 * k + 1.0 - t) * cur - k * prev) / (k + 1.0);
            prev = cur;
            cur = next;
        }
        const double nxt = ((2.0 * n + 1.0 - t) * cur - n * prev) / (n + 1.0);
        return Lag{prev, cur, nxt};
    };

    nodes_.resize(order);
    weights_.resize(order);
    for (int i = 0; i < order; ++i) {
        double t = es.eigenvalues()[i];
        for (int it = 0; it < 10; ++it) {
            const Lag v = eval(t);
            const double deriv = n * (v.l - v.lm1) / t;
            const double step = v.l / deriv;
            t -= step;
            if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * t)
                break;
        }
        const Lag v = eval(t);
        const double mu = t / ((n + 1.0) * (n + 1.0) * v.lp1 * v.lp1);
        const double x = std::sqrt(2.0 * t);
        nodes_[i] = x;
        weights_[i] = mu / x; // substitution x = sqrt(2t) absorbs the Jacobian
    }
}

namespace {

// orthonormal Hermite values phi_0..phi_k at x
Eigen::VectorXd hermite_values(int k, double x) {
    Eigen::VectorXd phi(k + 1);
    phi[0] = 1.0;
    if (k >= 1)
        phi[1] = x;
    for (int j = 1; j < k; ++j)
        phi[j + 1] = (x * phi[j] - std::sqrt(double(j)) * phi[j - 1]) / std::sqrt(double(j + 1));
    return phi;
}

} // namespace

double quadrature_S_entry(const QuadratureRule &rule, int a, int b) {
    if (a < 0 || b < 0 || a % 2 != 0 || b % 2 != 0)
        throw std::invalid_argument("half-range overlap needs even nonnegative degrees");
    if (a > 2 * rule.order() - 4 || b > 2 * rule.order() - 4)
        throw std::invalid_argument("insufficient quadrature order for requested degrees");

    const int k = std::max(a, b);
    double sum = 0.0;
    for (int i = 0; i < rule.order(); ++i) {
        const double x = rule.nodes()[i];
        const Eigen::VectorXd phi = hermite_values(k, x);
        sum += rule.weights()[i] * x * phi[a] * phi[b];
    }
    return sum;
}

double residual_norm(const MomentSystem &system, const LayerSolution &sol,
                     const std::vector<double> &ys) {
    double worst = 0.0;
    for (double y : ys) {
        const Eigen::VectorXd w = evaluate_solution(sol, y);
        const Eigen::VectorXd dw = evaluate_derivative(sol, y);
        const double r = (system.A * dw + system.Q * w).norm();
        worst = std::max(worst, r);
    }
    return worst;
}

} // namespace knlayer
