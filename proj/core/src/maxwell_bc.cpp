#include "knlayer/maxwell_bc.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "knlayer/errors.hpp"

namespace knlayer {

namespace {

// Both conditions share the shape Bo (w_o(0) + f_o) + Be (w_e(0) + f_e) = 0.
// Substituting the solution representation w(0) = C_full z0 and splitting
// f_e into its unknown span(Ge) part and the given remainder yields the
// joint system for [Ge^T f_e; z0].
BoundarySystem build_from_pair(const MomentSystem &system, const Decomposition &dec,
                               const BoundarySpec &spec, const Eigen::MatrixXd &Bo,
                               const Eigen::MatrixXd &Be) {
    const int m = system.m(), n = system.n();
    if (spec.f_e.size() != m || spec.f_o.size() != n)
        throw std::invalid_argument("boundary data size mismatch");

    const Eigen::MatrixXd Ge = dec.Ge();
    const Eigen::MatrixXd K0e = dec.C_full.topRows(m);
    const Eigen::MatrixXd K0o = dec.C_full.bottomRows(n);

    BoundarySystem bsys;
    bsys.p1 = dec.p1;
    bsys.nplus = dec.nplus;
    bsys.lhs.resize(Bo.rows(), dec.p1 + dec.nplus);
    bsys.lhs.leftCols(dec.p1) = Be * Ge;
    bsys.lhs.rightCols(dec.nplus) = Bo * K0o + Be * K0e;
    bsys.rhs = -Bo * spec.f_o - Be * (spec.f_e - Ge * (Ge.transpose() * spec.f_e));
    return bsys;
}

void check_chi(double chi) {
    if (!(chi > 0.0) || chi > 1.0)
        throw std::invalid_argument("accommodation coefficient must lie in (0, 1]");
}

} // namespace

double b_coefficient(double chi) {
    if (chi < 0.0 || chi > 1.0)
        throw std::invalid_argument("accommodation coefficient must lie in [0, 1]");
    return (2.0 * chi / (2.0 - chi)) / std::sqrt(2.0 * std::numbers::pi);
}

BoundarySystem build_new_bc(const MomentSystem &system, const Decomposition &dec,
                            const BoundarySpec &spec, const Eigen::MatrixXd &spd_weight) {
    if (spec.kind != BcKind::NewMaxwell)
        throw std::invalid_argument("build_new_bc: wrong bc kind");
    check_chi(spec.chi);
    if (dec.r2 != 0)
        throw UnsupportedConfigurationError(
            "build_new_bc: well-posedness requires r2 = 0, got r2 = " + std::to_string(dec.r2));

    Eigen::MatrixXd H;
    if (spd_weight.size() == 0) {
        // H = M^T S^{-1} M, symmetric positive definite
        H = system.Mblock.transpose() *
            Eigen::LLT<Eigen::MatrixXd>(system.S).solve(system.Mblock);
    } else {
        if (spd_weight.rows() != system.n() || spd_weight.cols() != system.n())
            throw std::invalid_argument("build_new_bc: weight must be n x n");
        const double scale = std::max(1.0, spd_weight.cwiseAbs().maxCoeff());
        if ((spd_weight - spd_weight.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale ||
            Eigen::LLT<Eigen::MatrixXd>(spd_weight).info() != Eigen::Success)
            throw std::invalid_argument(
                "build_new_bc: weight must be symmetric positive definite");
        H = spd_weight;
    }
    const double b = b_coefficient(spec.chi);
    return build_from_pair(system, dec, spec, H, b * system.Mblock.transpose());
}

BoundarySystem build_grad_bc(const MomentSystem &system, const Decomposition &dec,
                             const BoundarySpec &spec) {
    if (spec.kind != BcKind::Grad)
        throw std::invalid_argument("build_grad_bc: wrong bc kind");
    check_chi(spec.chi);
    const int n = system.n();
    const double b = b_coefficient(spec.chi);
    // E = [I_n, 0] keeps the first n even-indexed test rows
    return build_from_pair(system, dec, spec, system.Mblock.topRows(n),
                           b * system.S.topRows(n));
}

BoundarySolve solve_boundary(const BoundarySystem &bsys) {
    const Eigen::Index cols = bsys.lhs.cols();
    if (cols == 0) return {Eigen::VectorXd(0), Eigen::VectorXd(0)};

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(bsys.lhs,
                                          Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smax = svd.singularValues()(0);
    const double tau = rank_threshold(bsys.lhs.rows(), cols, smax > 0 ? smax : 1.0);
    const Eigen::Index rank = (svd.singularValues().array() > tau).count();
    if (rank < cols)
        throw IllPosedBoundaryError("boundary system rank " + std::to_string(rank) +
                                    " deficient for " + std::to_string(cols) + " unknowns");

    const Eigen::VectorXd x = svd.solve(bsys.rhs);
    if (bsys.lhs.rows() > cols) {
        const double rnorm = bsys.rhs.norm();
        if ((bsys.lhs * x - bsys.rhs).norm() > 1e-9 * (rnorm > 0 ? rnorm : 1.0))
            throw InconsistentDataError("overdetermined boundary system has no solution");
    }
    return {x.head(bsys.p1), x.tail(bsys.nplus)};
}

std::vector<double> wall_maxwellian_moments(int m_max, double u_w, double theta_w) {
    if (theta_w <= 0.0)
        throw std::invalid_argument("wall temperature must be positive");
    if (m_max < 0)
        throw std::invalid_argument("m_max must be >= 0");
    std::vector<double> J(static_cast<std::size_t>(m_max) + 1);
    J[0] = 1.0;
    if (m_max >= 1) J[1] = u_w;
    for (int k = 2; k <= m_max; ++k)
        J[static_cast<std::size_t>(k)] =
            ((theta_w - 1.0) * std::sqrt(double(k) - 1.0) * J[static_cast<std::size_t>(k) - 2] +
             u_w * J[static_cast<std::size_t>(k) - 1]) /
            std::sqrt(double(k));
    return J;
}

} // namespace knlayer
