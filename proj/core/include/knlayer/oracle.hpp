#pragma once

#include <vector>

#include <Eigen/Dense>

#include "knlayer/assembly.hpp"
#include "knlayer/halfspace.hpp"

namespace knlayer {

/// Gaussian rule for integrals of the form int_0^inf f(x) exp(-x^2/2) dx:
/// Laguerre Jacobi eigenvalues polished by Newton iteration, classical
/// derivative-formula weights, substitution x = sqrt(2 t). Exact whenever f
/// is an odd polynomial of degree <= 4*order-1.
class QuadratureRule {
  public:
    explicit QuadratureRule(int order);

    int order() const { return order_; }
    const Eigen::VectorXd &nodes() const { return nodes_; }
    const Eigen::VectorXd &weights() const { return weights_; }

  private:
    int order_ = 0;
    Eigen::VectorXd nodes_;
    Eigen::VectorXd weights_;
};

/// Half-range overlap int_0^inf phi_a(x) phi_b(x) x exp(-x^2/2) dx by
/// quadrature, with phi_k the orthonormal Hermite polynomials evaluated by
/// three-term recursion. Requires a, b even and small enough for the rule
/// to be exact (a, b <= 2*order - 4).
double quadrature_S_entry(const QuadratureRule &rule, int a, int b);

/// max_j || A w'(y_j) + Q w(y_j) ||_2 over the supplied ordinates: how well
/// a computed layer satisfies the interior equations.
double residual_norm(const MomentSystem &system, const LayerSolution &sol,
                     const std::vector<double> &ys);

} // namespace knlayer
