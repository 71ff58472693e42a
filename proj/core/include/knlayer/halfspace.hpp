#pragma once

#include <Eigen/Dense>
#include <memory>

#include "knlayer/assembly.hpp"

namespace knlayer {

/// Simultaneous reduction of the pair (A, Q): an orthogonal splitting
/// [V1, V2, V3] of R^{m+n} such that
///   - V2^T w is forced to vanish identically (the conserved combinations),
///   - V3^T w solves a reduced system with Q33 > 0, giving decaying modes,
///   - V1^T w is recovered algebraically from V3^T w.
/// All bases are built blockwise in the even/odd parity splitting so the
/// anti-diagonal structure of A and block structure of Q are preserved
/// exactly.
struct Decomposition {
    int m = 0, n = 0;

    // counts: p = dim Null(Q) with even/odd split p1 + p2,
    //         c = rank of the null-to-null coupling Ge^T M Go,
    //         r = dim Null(G^T A G) with split r1 + r2 (r1 = p1 - c, r2 = p2 - c),
    //         nplus = number of decaying modes = n - (p+r)/2.
    int p = 0, p1 = 0, p2 = 0;
    int r = 0, r1 = 0, r2 = 0;
    int c = 0;
    int nplus = 0;
    int mt = 0, nt = 0; // even/odd column counts of V3

    Eigen::MatrixXd G;   // (m+n) x p   orthonormal null basis of Q
    Eigen::MatrixXd X;   // p x r       orthonormal null basis of G^T A G
    Eigen::MatrixXd V1;  // (m+n) x r   = G X
    Eigen::MatrixXd V2;  // (m+n) x p   orthonormal, span = span(A G)
    Eigen::MatrixXd V3;  // (m+n) x (mt+nt) orthonormal complement of [V1, V2]
    Eigen::MatrixXd U2;  // (m+n) x r   = A G X
    Eigen::MatrixXd A21; // r x r       = U2^T A V1, symmetric positive definite
    Eigen::MatrixXd A33; // V3^T A V3, anti-diagonal blocks
    Eigen::MatrixXd Q33; // V3^T Q V3, symmetric positive definite
    Eigen::MatrixXd L;   // Cholesky factor of Q33, block lower-triangular

    Eigen::MatrixXd Tplus;      // (mt+nt) x nplus generalized eigenvectors
    Eigen::VectorXd LambdaPlus; // nplus positive decay scales, descending

    // precomputed evaluation factors:
    //   w(y) = (V1 (C_V1_direct + C_V1_integral) + C_V3) exp(-diag(1/LambdaPlus) y) z0
    Eigen::MatrixXd C_V3;          // V3 Tplus
    Eigen::MatrixXd C_V1_direct;   // -A21^{-1} U2^T A V3 Tplus
    Eigen::MatrixXd C_V1_integral; //  A21^{-1} U2^T Q V3 Tplus diag(LambdaPlus)
    Eigen::MatrixXd C_full;        // V1 (C_V1_direct + C_V1_integral) + C_V3

    Eigen::MatrixXd Ge() const { return G.topLeftCorner(m, p1); }
    Eigen::MatrixXd Go() const { return G.bottomRightCorner(n, p2); }
    Eigen::MatrixXd Y3() const { return V3.topLeftCorner(m, mt); }
    Eigen::MatrixXd Z3() const { return V3.bottomRightCorner(n, nt); }
};

/// Build the full decomposition. Numerical ranks use the threshold
/// rank_threshold(); violations of the count identities raise
/// InconsistencyError.
Decomposition decompose(const MomentSystem &system);

struct Signature {
    int zero = 0, positive = 0, negative = 0;
};

/// Eigenvalue signature of the symmetric embedding [[0, D],[D^T, 0]]:
/// (rows + cols - 2 gamma, gamma, gamma) with gamma = rank(D).
Signature signature_counts(const Eigen::MatrixXd &Dblock);

struct Modes {
    Eigen::MatrixXd Tplus;
    Eigen::VectorXd LambdaPlus;
};

/// Positive part of the generalized eigenproblem A33 T = Q33 T Lambda,
/// via Cholesky whitening of Q33 and an SVD of the whitened coupling block.
/// even_rows gives the size of the leading (even-parity) block of the
/// anti-diagonal A33. Columns are normalized so that the even and odd parts
/// of the whitened eigenvectors each carry norm 1/sqrt(2); eigenvalues are
/// sorted descending, and each column's sign is fixed so its first
/// significant component is positive (ties resolved lexicographically).
Modes generalized_modes(const Eigen::MatrixXd &A33, const Eigen::MatrixXd &Q33, int even_rows);

/// The solved boundary state: z0 picks the decaying-mode combination,
/// slip carries the solved free boundary components (may be empty when the
/// solution came from raw boundary data instead of a wall model).
struct LayerSolution {
    std::shared_ptr<const Decomposition> dec;
    Eigen::VectorXd z0;   // nplus
    Eigen::VectorXd slip; // p1 or empty

    const Eigen::MatrixXd &C_V3() const { return dec->C_V3; }
    const Eigen::MatrixXd &C_V1_direct() const { return dec->C_V1_direct; }
    const Eigen::MatrixXd &C_V1_integral() const { return dec->C_V1_integral; }
};

LayerSolution make_layer_solution(std::shared_ptr<const Decomposition> dec,
                                  Eigen::VectorXd z0, Eigen::VectorXd slip);

/// Solve the abstract decaying boundary problem (B V3 Tplus) z0 = g by least
/// squares. Throws IllPosedBoundaryError on rank deficiency and
/// InconsistentDataError when g is not attainable (residual > 1e-9 |g|).
Eigen::VectorXd solve_halfspace(const Decomposition &dec, const Eigen::MatrixXd &B,
                                const Eigen::VectorXd &g);

/// w(y) for y >= 0. The algebraic V1 part and the integral tail are folded
/// into precomputed factors, so this is a single matrix-vector product.
Eigen::VectorXd evaluate_solution(const LayerSolution &sol, double y);

/// Analytic dw/dy, used for residual certification.
Eigen::VectorXd evaluate_derivative(const LayerSolution &sol, double y);

} // namespace knlayer
