#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "knlayer/multi_index.hpp"

namespace knlayer {

/// Relaxation collision model. Pr = 1 reproduces BGK exactly, so BGK is
/// stored as Shakhov with a pinned Prandtl number.
struct CollisionModel {
    enum class Kind { BGK, Shakhov };
    Kind kind = Kind::BGK;
    double prandtl = 1.0;

    static CollisionModel bgk() { return {Kind::BGK, 1.0}; }
    static CollisionModel shakhov(double prandtl = 2.0 / 3.0) {
        return {Kind::Shakhov, prandtl};
    }
};

/// The assembled linear moment system for one index set:
///   A dw/dy = -Q w  on y > 0,
/// with A = [[0, M],[M^T, 0]] in the even/odd ordering, Q = diag(Q_e, Q_o)
/// symmetric positive semi-definite, and S the half-range flux matrix on the
/// even part (symmetric positive definite).
struct MomentSystem {
    IndexSet set;
    Eigen::MatrixXd A;      // (m+n) x (m+n)
    Eigen::MatrixXd Mblock; // m x n, the even-odd coupling block of A
    Eigen::MatrixXd Q;      // (m+n) x (m+n)
    Eigen::MatrixXd S;      // m x m
    CollisionModel model;

    int m() const { return set.m(); }
    int n() const { return set.n(); }
    int size() const { return set.size(); }
};

/// Values z_k = phi_k(0) of the normalized 1-D Hermite polynomials at zero:
/// z_0 = 1, z_1 = 0, z_{k+1} = -sqrt(k) z_{k-1} / sqrt(k+1).
std::vector<double> hermite_zero_values(int K);

struct TransportMatrices {
    Eigen::MatrixXd A;
    Eigen::MatrixXd Mblock;
};

/// A[alpha,beta] = sqrt(alpha_2) [beta = alpha - e2]
///              + sqrt(alpha_2+1) [beta = alpha + e2], on set x set.
/// Requires validate_c1(set).
TransportMatrices assemble_transport(const IndexSet &set);

/// Shakhov collision matrix on set x set. Nonzero pattern:
///   Q[2e_i, 2e_j]           = delta_ij - 1/D
///   Q[e_i+2e_j, e_i+2e_k]   = delta_jk - (1-Pr)/5 sqrt(1+2 delta_ij) sqrt(1+2 delta_ik)
///   Q[alpha, alpha]         = 1 for other |alpha| >= 2
/// and rows/columns of |alpha| <= 1 are zero (collision invariants).
Eigen::MatrixXd assemble_collision_shakhov(const IndexSet &set, double prandtl);

/// Half-range flux matrix on the even part: S[alpha,beta] factorizes into a
/// 1-D closed form in the wall-normal degrees times Kronecker deltas in the
/// remaining directions.
Eigen::MatrixXd assemble_halfflux(const IndexSet &set);

/// 1-D closed-form entry S1(a, b) for even a, b:
///   (a+b+1)/(1-(a-b)^2) * z_a * z_b.
/// The formula covers a = b as well (denominator 1).
double halfflux_entry_1d(int a, int b);

/// Assemble and verify the full system. Throws AssemblyError naming the
/// violated property if the index set produces a defective system.
MomentSystem assemble_system(const IndexSet &set, const CollisionModel &model);

/// Plain-text matrix exchange format used by golden tests:
/// one header line "rows cols", then row-major entries with 17 significant
/// digits, one row per line.
void write_matrix(std::ostream &out, const Eigen::MatrixXd &matrix);
Eigen::MatrixXd read_matrix(std::istream &in);

/// Numerical rank threshold: max(rows, cols) * machine epsilon * sigma_max.
double rank_threshold(Eigen::Index rows, Eigen::Index cols, double sigma_max);

} // namespace knlayer
