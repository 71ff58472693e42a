#pragma once

#include <Eigen/Dense>
#include <vector>

#include "knlayer/halfspace.hpp"

namespace knlayer {

enum class BcKind { NewMaxwell, Grad };

/// Wall data for a Maxwell-type condition with accommodation coefficient
/// chi in (0, 1]. Components of f_e lying in span(Ge) are treated as
/// unknowns (the physical slip values); the rest of f_e and all of f_o are
/// given data.
struct BoundarySpec {
    double chi = 1.0;
    Eigen::VectorXd f_e; // m entries
    Eigen::VectorXd f_o; // n entries
    BcKind kind = BcKind::NewMaxwell;
};

/// b(chi) = (2 chi / (2 - chi)) / sqrt(2 pi). Throws for chi outside [0, 1].
double b_coefficient(double chi);

/// Linear system for the joint unknowns [Ge^T f_e (p1); z0 (nplus)].
/// Square with n rows whenever r2 = 0.
struct BoundarySystem {
    Eigen::MatrixXd lhs;
    Eigen::VectorXd rhs;
    int p1 = 0;
    int nplus = 0;
};

/// Well-posed condition: test the wall condition against M^T S^{-1}, giving
///   H (w_o(0) + f_o) = -b(chi) M^T (w_e(0) + f_e),   H = M^T S^{-1} M.
/// Requires r2 = 0 and chi in (0, 1]. The spd_weight hook replaces H by
/// another symmetric positive definite matrix; pass an empty matrix for the
/// default H.
BoundarySystem build_new_bc(const MomentSystem &system, const Decomposition &dec,
                            const BoundarySpec &spec,
                            const Eigen::MatrixXd &spd_weight = Eigen::MatrixXd());

/// Classical condition keeping the first n even-indexed rows:
///   E M (w_o(0) + f_o) = -b(chi) E S (w_e(0) + f_e),   E = [I_n, 0].
/// No well-posedness guarantee; rank defects surface at solve time.
BoundarySystem build_grad_bc(const MomentSystem &system, const Decomposition &dec,
                             const BoundarySpec &spec);

struct BoundarySolve {
    Eigen::VectorXd slip; // p1 solved free components Ge^T f_e
    Eigen::VectorXd z0;   // nplus mode amplitudes
};

/// Unique solve of a boundary system; throws IllPosedBoundaryError when the
/// matrix is column-rank deficient, InconsistentDataError when an
/// overdetermined system has no solution.
BoundarySolve solve_boundary(const BoundarySystem &bsys);

/// Half-range moments J_m of a wall Maxwellian with tangential speed u_w and
/// temperature theta_w: J_0 = 1, J_1 = u_w,
/// J_m = ((theta_w - 1) sqrt(m-1) J_{m-2} + u_w J_{m-1}) / sqrt(m).
/// Wall moment data factorizes as m_alpha = rho_w prod_i J_{alpha_i}.
std::vector<double> wall_maxwellian_moments(int m_max, double u_w, double theta_w);

} // namespace knlayer
