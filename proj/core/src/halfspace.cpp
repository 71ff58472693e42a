#include "knlayer/halfspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "knlayer/errors.hpp"

namespace knlayer {

namespace {

// Deterministic sign convention: flip each column so that its first
// component exceeding the tolerance in magnitude is positive.
void fix_column_signs(Eigen::MatrixXd &B, double tol = 1e-9) {
    for (Eigen::Index j = 0; j < B.cols(); ++j)
        for (Eigen::Index i = 0; i < B.rows(); ++i)
            if (std::abs(B(i, j)) > tol) {
                if (B(i, j) < 0) B.col(j) = -B.col(j);
                break;
            }
}

// Orthonormal right null space basis, in the column order the SVD returns.
Eigen::MatrixXd svd_nullspace(const Eigen::MatrixXd &A) {
    if (A.cols() == 0) return Eigen::MatrixXd(0, 0);
    if (A.rows() == 0) return Eigen::MatrixXd::Identity(A.cols(), A.cols());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    const double tau = rank_threshold(A.rows(), A.cols(), svd.singularValues()(0));
    const Eigen::Index rank = (svd.singularValues().array() > tau).count();
    Eigen::MatrixXd N = svd.matrixV().rightCols(A.cols() - rank);
    fix_column_signs(N);
    return N;
}

// Orthonormal range basis.
Eigen::MatrixXd svd_orth(const Eigen::MatrixXd &A) {
    if (A.rows() == 0 || A.cols() == 0) return Eigen::MatrixXd(A.rows(), 0);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU);
    const double tau = rank_threshold(A.rows(), A.cols(), svd.singularValues()(0));
    const Eigen::Index rank = (svd.singularValues().array() > tau).count();
    Eigen::MatrixXd R = svd.matrixU().leftCols(rank);
    fix_column_signs(R);
    return R;
}

// Orthonormal complement of a matrix with orthonormal columns.
Eigen::MatrixXd orth_complement(const Eigen::MatrixXd &B, Eigen::Index dim) {
    if (B.cols() == 0) return Eigen::MatrixXd::Identity(dim, dim);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(B);
    Eigen::MatrixXd full = qr.householderQ();
    Eigen::MatrixXd C = full.rightCols(dim - B.cols());
    fix_column_signs(C);
    return C;
}

Eigen::MatrixXd even_lift(const Eigen::MatrixXd &B, Eigen::Index n) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(B.rows() + n, B.cols());
    out.topRows(B.rows()) = B;
    return out;
}

Eigen::MatrixXd odd_lift(const Eigen::MatrixXd &B, Eigen::Index m) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m + B.rows(), B.cols());
    out.bottomRows(B.rows()) = B;
    return out;
}

Eigen::MatrixXd hcat(const Eigen::MatrixXd &A, const Eigen::MatrixXd &B) {
    Eigen::MatrixXd out(A.rows(), A.cols() + B.cols());
    out.leftCols(A.cols()) = A;
    out.rightCols(B.cols()) = B;
    return out;
}

} // namespace

Signature signature_counts(const Eigen::MatrixXd &Dblock) {
    const Eigen::Index rows = Dblock.rows(), cols = Dblock.cols();
    Eigen::Index gamma = 0;
    if (rows > 0 && cols > 0) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(Dblock);
        const double smax = svd.singularValues()(0);
        if (smax > 0.0) {
            const double tau = rank_threshold(rows, cols, smax);
            gamma = (svd.singularValues().array() > tau).count();
        }
    }
    return {static_cast<int>(rows + cols - 2 * gamma), static_cast<int>(gamma),
            static_cast<int>(gamma)};
}

Modes generalized_modes(const Eigen::MatrixXd &A33, const Eigen::MatrixXd &Q33, int even_rows) {
    const Eigen::Index nn = A33.rows();
    if (A33.cols() != nn || Q33.rows() != nn || Q33.cols() != nn)
        throw std::invalid_argument("generalized_modes: A33 and Q33 must be square, same size");
    if (even_rows < 0 || even_rows > nn)
        throw std::invalid_argument("generalized_modes: even_rows out of range");
    const Eigen::Index mt = even_rows, nt = nn - even_rows;
    if (nn == 0) return {Eigen::MatrixXd(0, 0), Eigen::VectorXd(0)};
    if (!A33.topLeftCorner(mt, mt).isZero(1e-12) || !A33.bottomRightCorner(nt, nt).isZero(1e-12))
        throw std::invalid_argument("generalized_modes: A33 lacks the anti-diagonal block form");

    Eigen::LLT<Eigen::MatrixXd> llt_e(Q33.topLeftCorner(mt, mt));
    Eigen::LLT<Eigen::MatrixXd> llt_o(Q33.bottomRightCorner(nt, nt));
    if ((mt > 0 && llt_e.info() != Eigen::Success) || (nt > 0 && llt_o.info() != Eigen::Success))
        throw InconsistencyError("generalized_modes: Q33 is not positive definite "
                                 "(rank threshold failure upstream)");
    const Eigen::MatrixXd Le = llt_e.matrixL();
    const Eigen::MatrixXd Lo = llt_o.matrixL();

    // whitened coupling block D = Le^{-1} (A33 even-odd block) Lo^{-T};
    // the positive spectrum of Q33^{-1} A33 equals the singular values of D.
    const Eigen::MatrixXd N = A33.topRightCorner(mt, nt);
    Eigen::MatrixXd D(mt, nt);
    if (mt > 0 && nt > 0) {
        Eigen::MatrixXd tmp = Le.triangularView<Eigen::Lower>().solve(N);
        D = Lo.triangularView<Eigen::Lower>()
                .solve(tmp.transpose())
                .transpose();
    }

    Eigen::Index gamma = 0;
    Eigen::MatrixXd U(mt, 0), W(nt, 0);
    Eigen::VectorXd sigma(0);
    if (mt > 0 && nt > 0) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(D, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
        if (smax > 0.0) {
            const double tau = rank_threshold(mt, nt, smax);
            gamma = (svd.singularValues().array() > tau).count();
        }
        U = svd.matrixU().leftCols(gamma);
        W = svd.matrixV().leftCols(gamma);
        sigma = svd.singularValues().head(gamma);
    }

    // canonical column order and signs (decay scales can be degenerate)
    Eigen::MatrixXd stacked(mt + nt, gamma);
    stacked.topRows(mt) = U;
    stacked.bottomRows(nt) = W;
    fix_column_signs(stacked);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(gamma));
    std::iota(order.begin(), order.end(), 0);
    const double tie = 1e-12 * (gamma > 0 ? sigma(0) : 1.0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (sigma(a) > sigma(b) + tie) return true;
        if (sigma(b) > sigma(a) + tie) return false;
        for (Eigen::Index i = 0; i < stacked.rows(); ++i) {
            if (stacked(i, a) < stacked(i, b) - 1e-12) return true;
            if (stacked(i, b) < stacked(i, a) - 1e-12) return false;
        }
        return false;
    });

    Modes modes;
    modes.Tplus.resize(mt + nt, gamma);
    modes.LambdaPlus.resize(gamma);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (Eigen::Index k = 0; k < gamma; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        modes.LambdaPlus(k) = sigma(src);
        const Eigen::VectorXd re = stacked.col(src).head(mt) * inv_sqrt2;
        const Eigen::VectorXd ro = stacked.col(src).tail(nt) * inv_sqrt2;
        modes.Tplus.col(k).head(mt) =
            Le.transpose().triangularView<Eigen::Upper>().solve(re);
        modes.Tplus.col(k).tail(nt) =
            Lo.transpose().triangularView<Eigen::Upper>().solve(ro);
    }
    return modes;
}

Decomposition decompose(const MomentSystem &system) {
    Decomposition dec;
    const int m = dec.m = system.m();
    const int n = dec.n = system.n();
    const Eigen::MatrixXd &A = system.A;
    const Eigen::MatrixXd &Q = system.Q;
    const Eigen::MatrixXd &Mb = system.Mblock;

    const Eigen::MatrixXd Ge = svd_nullspace(Q.topLeftCorner(m, m));
    const Eigen::MatrixXd Go = svd_nullspace(Q.bottomRightCorner(n, n));
    dec.p1 = static_cast<int>(Ge.cols());
    dec.p2 = static_cast<int>(Go.cols());
    dec.p = dec.p1 + dec.p2;

    const Eigen::MatrixXd GeMGo = Ge.transpose() * Mb * Go;
    if (GeMGo.size() > 0) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(GeMGo);
        const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
        if (smax > 0.0) {
            const double tau = rank_threshold(GeMGo.rows(), GeMGo.cols(), smax);
            dec.c = static_cast<int>((svd.singularValues().array() > tau).count());
        }
    }

    const Eigen::MatrixXd Xe = svd_nullspace(GeMGo.transpose());
    const Eigen::MatrixXd Xo = svd_nullspace(GeMGo);
    dec.r1 = static_cast<int>(Xe.cols());
    dec.r2 = static_cast<int>(Xo.cols());
    dec.r = dec.r1 + dec.r2;
    if (dec.r1 != dec.p1 - dec.c || dec.r2 != dec.p2 - dec.c)
        throw InconsistencyError("decompose: null coupling ranks violate r1 = p1 - c, r2 = p2 - c");

    dec.G = hcat(even_lift(Ge, n), odd_lift(Go, m));
    dec.X = Eigen::MatrixXd::Zero(dec.p, dec.r);
    dec.X.topLeftCorner(dec.p1, dec.r1) = Xe;
    dec.X.bottomRightCorner(dec.p2, dec.r2) = Xo;

    const Eigen::MatrixXd Y1 = Ge * Xe, Z1 = Go * Xo;
    const Eigen::MatrixXd Y2 = svd_orth(Mb * Go);
    const Eigen::MatrixXd Z2 = svd_orth(Mb.transpose() * Ge);
    if (Y2.cols() != dec.p2 || Z2.cols() != dec.p1)
        throw InconsistencyError("decompose: A G lost column rank; null spaces of A and Q overlap");

    const Eigen::MatrixXd Y3 = orth_complement(hcat(Y1, Y2), m);
    const Eigen::MatrixXd Z3 = orth_complement(hcat(Z1, Z2), n);
    dec.mt = static_cast<int>(Y3.cols());
    dec.nt = static_cast<int>(Z3.cols());

    dec.V1 = hcat(even_lift(Y1, n), odd_lift(Z1, m));
    dec.V2 = hcat(even_lift(Y2, n), odd_lift(Z2, m));
    dec.V3 = hcat(even_lift(Y3, n), odd_lift(Z3, m));

    dec.U2 = A * dec.V1;
    dec.A21 = dec.U2.transpose() * dec.U2; // = U2^T A V1 because U2 = A V1
    if (dec.r > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dec.A21, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() <=
            rank_threshold(dec.r, dec.r, es.eigenvalues().maxCoeff()))
            throw InconsistencyError("decompose: U2^T A V1 is singular; rank(A21) < r");
    }

    // assemble the reduced blocks exactly (no cross-parity round-off)
    const Eigen::MatrixXd N33 = Y3.transpose() * Mb * Z3;
    dec.A33 = Eigen::MatrixXd::Zero(dec.mt + dec.nt, dec.mt + dec.nt);
    dec.A33.topRightCorner(dec.mt, dec.nt) = N33;
    dec.A33.bottomLeftCorner(dec.nt, dec.mt) = N33.transpose();
    dec.Q33 = Eigen::MatrixXd::Zero(dec.mt + dec.nt, dec.mt + dec.nt);
    dec.Q33.topLeftCorner(dec.mt, dec.mt) =
        Y3.transpose() * Q.topLeftCorner(m, m) * Y3;
    dec.Q33.bottomRightCorner(dec.nt, dec.nt) =
        Z3.transpose() * Q.bottomRightCorner(n, n) * Z3;

    {
        Eigen::LLT<Eigen::MatrixXd> llt(dec.Q33);
        if (dec.mt + dec.nt > 0 && llt.info() != Eigen::Success)
            throw InconsistencyError("decompose: Q33 is not positive definite "
                                     "(rank threshold failure)");
        dec.L = llt.matrixL();
    }

    Modes modes = generalized_modes(dec.A33, dec.Q33, dec.mt);
    dec.Tplus = std::move(modes.Tplus);
    dec.LambdaPlus = std::move(modes.LambdaPlus);
    dec.nplus = static_cast<int>(dec.Tplus.cols());
    if (2 * dec.nplus != 2 * n - dec.p - dec.r)
        throw InconsistencyError("decompose: positive mode count " + std::to_string(dec.nplus) +
                                 " violates nplus = n - (p+r)/2 with n = " + std::to_string(n) +
                                 ", p = " + std::to_string(dec.p) +
                                 ", r = " + std::to_string(dec.r));

    dec.C_V3 = dec.V3 * dec.Tplus;
    const Eigen::MatrixXd AV3T = A * dec.C_V3;
    const Eigen::MatrixXd QV3T = Q * dec.C_V3;
    if (dec.r > 0) {
        Eigen::LLT<Eigen::MatrixXd> llt(dec.A21);
        dec.C_V1_direct = -llt.solve(dec.U2.transpose() * AV3T);
        dec.C_V1_integral = llt.solve(dec.U2.transpose() * QV3T) *
                            dec.LambdaPlus.asDiagonal();
    } else {
        dec.C_V1_direct.resize(0, dec.nplus);
        dec.C_V1_integral.resize(0, dec.nplus);
    }
    dec.C_full = dec.V1 * (dec.C_V1_direct + dec.C_V1_integral) + dec.C_V3;
    return dec;
}

LayerSolution make_layer_solution(std::shared_ptr<const Decomposition> dec,
                                  Eigen::VectorXd z0, Eigen::VectorXd slip) {
    if (!dec) throw std::invalid_argument("make_layer_solution: null decomposition");
    if (z0.size() != dec->nplus)
        throw std::invalid_argument("make_layer_solution: z0 size mismatch");
    if (slip.size() != 0 && slip.size() != dec->p1)
        throw std::invalid_argument("make_layer_solution: slip size mismatch");
    return {std::move(dec), std::move(z0), std::move(slip)};
}

Eigen::VectorXd solve_halfspace(const Decomposition &dec, const Eigen::MatrixXd &B,
                                const Eigen::VectorXd &g) {
    if (B.cols() != dec.m + dec.n)
        throw std::invalid_argument("solve_halfspace: B has wrong column count");
    if (g.size() != B.rows())
        throw std::invalid_argument("solve_halfspace: g size mismatch");

    const double gnorm = g.norm();
    if (dec.nplus == 0) {
        if (gnorm > 1e-9)
            throw InconsistentDataError("solve_halfspace: no decaying modes but g != 0");
        return Eigen::VectorXd(0);
    }

    const Eigen::MatrixXd K = B * dec.C_V3;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(K, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smax = svd.singularValues()(0);
    const double tau = rank_threshold(K.rows(), K.cols(), smax > 0 ? smax : 1.0);
    const Eigen::Index rank = (svd.singularValues().array() > tau).count();
    if (rank < dec.nplus)
        throw IllPosedBoundaryError("solve_halfspace: boundary operator rank " +
                                    std::to_string(rank) + " < nplus = " +
                                    std::to_string(dec.nplus));

    const Eigen::VectorXd z0 = svd.solve(g);
    if ((K * z0 - g).norm() > 1e-9 * gnorm)
        throw InconsistentDataError("solve_halfspace: boundary data outside attainable span");
    return z0;
}

Eigen::VectorXd evaluate_solution(const LayerSolution &sol, double y) {
    if (y < 0) throw std::invalid_argument("evaluate_solution: y must be >= 0");
    const Eigen::ArrayXd decay = (-y / sol.dec->LambdaPlus.array()).exp();
    return sol.dec->C_full * (decay * sol.z0.array()).matrix();
}

Eigen::VectorXd evaluate_derivative(const LayerSolution &sol, double y) {
    if (y < 0) throw std::invalid_argument("evaluate_derivative: y must be >= 0");
    const Eigen::ArrayXd lambda = sol.dec->LambdaPlus.array();
    const Eigen::ArrayXd decay = (-y / lambda).exp();
    return sol.dec->C_full * (-(decay / lambda) * sol.z0.array()).matrix();
}

} // namespace knlayer
