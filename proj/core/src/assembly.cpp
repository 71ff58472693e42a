#include "knlayer/assembly.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "knlayer/errors.hpp"

namespace knlayer {

namespace {

// alpha = 2 e_i? Returns i (0-based).
std::optional<int> as_twice_unit(const MultiIndex &alpha) {
    int i = -1;
    for (int d = 0; d < alpha.dim(); ++d) {
        if (alpha[d] == 0) continue;
        if (alpha[d] != 2 || i >= 0) return std::nullopt;
        i = d;
    }
    if (i < 0) return std::nullopt;
    return i;
}

// alpha = e_i + 2 e_j? Returns (i, j), covering 3 e_i = e_i + 2 e_i.
std::optional<std::pair<int, int>> as_unit_plus_twice(const MultiIndex &alpha) {
    if (alpha.norm() != 3) return std::nullopt;
    int one = -1, two = -1, three = -1;
    for (int d = 0; d < alpha.dim(); ++d) {
        switch (alpha[d]) {
        case 0: break;
        case 1: if (one >= 0) return std::nullopt; one = d; break;
        case 2: if (two >= 0) return std::nullopt; two = d; break;
        case 3: if (three >= 0) return std::nullopt; three = d; break;
        default: return std::nullopt;
        }
    }
    if (three >= 0 && one < 0 && two < 0) return std::make_pair(three, three);
    if (one >= 0 && two >= 0 && three < 0) return std::make_pair(one, two);
    return std::nullopt;
}

double shakhov_entry(const MultiIndex &alpha, const MultiIndex &beta, int D, double prandtl) {
    if (alpha.norm() <= 1 || beta.norm() <= 1) return 0.0;

    const auto ta = as_twice_unit(alpha), tb = as_twice_unit(beta);
    if (ta && tb) return (*ta == *tb ? 1.0 : 0.0) - 1.0 / D;

    const auto ua = as_unit_plus_twice(alpha), ub = as_unit_plus_twice(beta);
    if (ua && ub && ua->first == ub->first) {
        const int i = ua->first, j = ua->second, k = ub->second;
        const double dj = i == j ? 3.0 : 1.0; // 1 + 2 delta_ij
        const double dk = i == k ? 3.0 : 1.0;
        return (j == k ? 1.0 : 0.0) - (1.0 - prandtl) / 5.0 * std::sqrt(dj) * std::sqrt(dk);
    }

    return alpha == beta ? 1.0 : 0.0;
}

} // namespace

std::vector<double> hermite_zero_values(int K) {
    if (K < 0) throw std::invalid_argument("hermite_zero_values: K must be >= 0");
    std::vector<double> z(static_cast<std::size_t>(K) + 1);
    z[0] = 1.0;
    if (K >= 1) z[1] = 0.0;
    for (int k = 1; k < K; ++k)
        z[static_cast<std::size_t>(k) + 1] =
            -std::sqrt(double(k)) * z[static_cast<std::size_t>(k) - 1] / std::sqrt(double(k) + 1);
    return z;
}

TransportMatrices assemble_transport(const IndexSet &set) {
    if (!validate_c1(set))
        throw std::invalid_argument("assemble_transport: index set violates the chain closure");

    const int N = set.size(), m = set.m();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
    for (int i = 0; i < N; ++i) {
        const MultiIndex &alpha = set.at(i);
        const int a2 = alpha.normal_degree();
        if (a2 > 0) {
            const int j = set.position(alpha.lowered());
            if (j >= 0) A(i, j) = std::sqrt(double(a2));
        }
        const int j = set.position(alpha.raised());
        if (j >= 0) A(i, j) = std::sqrt(double(a2) + 1);
    }
    return {A, A.topRightCorner(m, set.n())};
}

Eigen::MatrixXd assemble_collision_shakhov(const IndexSet &set, double prandtl) {
    if (prandtl <= 0.0)
        throw std::invalid_argument("assemble_collision_shakhov: Prandtl number must be > 0");

    const int N = set.size();
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(N, N);
    // parity decouples the two blocks, so cross-parity entries are zero anyway;
    // restricting to same-parity pairs keeps the block structure explicit.
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            const MultiIndex &a = set.at(i), &b = set.at(j);
            if (a.normal_degree() % 2 != b.normal_degree() % 2) continue;
            Q(i, j) = shakhov_entry(a, b, set.dim(), prandtl);
        }
    return Q;
}

double halfflux_entry_1d(int a, int b) {
    if (a < 0 || b < 0 || a % 2 != 0 || b % 2 != 0)
        throw std::invalid_argument("halfflux_entry_1d: degrees must be even and >= 0");
    const auto z = hermite_zero_values(std::max(a, b));
    const double d = double(a) - double(b);
    return (double(a) + double(b) + 1.0) / (1.0 - d * d) *
           z[static_cast<std::size_t>(a)] * z[static_cast<std::size_t>(b)];
}

Eigen::MatrixXd assemble_halfflux(const IndexSet &set) {
    const int m = set.m();
    int max_a2 = 0;
    for (const auto &alpha : set.even_part()) max_a2 = std::max(max_a2, alpha.normal_degree());
    const auto z = hermite_zero_values(max_a2);

    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= i; ++j) {
            const MultiIndex &a = set.even_part()[static_cast<std::size_t>(i)];
            const MultiIndex &b = set.even_part()[static_cast<std::size_t>(j)];
            bool match = true;
            for (int d = 0; d < set.dim() && match; ++d)
                if (d != 1 && a[d] != b[d]) match = false;
            if (!match) continue;
            const int a2 = a.normal_degree(), b2 = b.normal_degree();
            const double diff = double(a2) - double(b2);
            S(i, j) = S(j, i) = (double(a2) + double(b2) + 1.0) / (1.0 - diff * diff) *
                                z[static_cast<std::size_t>(a2)] * z[static_cast<std::size_t>(b2)];
        }
    return S;
}

double rank_threshold(Eigen::Index rows, Eigen::Index cols, double sigma_max) {
    return double(std::max(rows, cols)) * std::numeric_limits<double>::epsilon() * sigma_max;
}

MomentSystem assemble_system(const IndexSet &set, const CollisionModel &model) {
    const double prandtl = model.kind == CollisionModel::Kind::BGK ? 1.0 : model.prandtl;
    auto [A, Mblock] = assemble_transport(set);
    Eigen::MatrixXd Q = assemble_collision_shakhov(set, prandtl);
    Eigen::MatrixXd S = assemble_halfflux(set);

    const int m = set.m(), n = set.n();

    if (!A.topLeftCorner(m, m).isZero(0.0) || !A.bottomRightCorner(n, n).isZero(0.0))
        throw AssemblyError("transport matrix lost its anti-diagonal block form");
    if (!Q.topRightCorner(m, n).isZero(0.0))
        throw AssemblyError("collision matrix lost its block-diagonal form");

    if (n > 0) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(Mblock);
        const double tau = rank_threshold(m, n, svd.singularValues()(0));
        const int rank = (svd.singularValues().array() > tau).count();
        if (rank != n)
            throw AssemblyError("moment coupling block is rank deficient: rank " +
                                std::to_string(rank) + " < n = " + std::to_string(n));
    }

    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-12)
            throw AssemblyError("collision matrix is not positive semi-definite");
    }

    // Null(A) and Null(Q) may only intersect trivially. Null(A) splits into
    // Null(M^T) (even) and Null(M) (odd, empty once M has full column rank),
    // so it suffices that Q is definite on Null(A).
    {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
        const double tau = rank_threshold(A.rows(), A.cols(), svd.singularValues()(0));
        const int rank = (svd.singularValues().array() > tau).count();
        const int nullity = set.size() - rank;
        if (nullity > 0) {
            const Eigen::MatrixXd NA = svd.matrixV().rightCols(nullity);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(NA.transpose() * Q * NA,
                                                              Eigen::EigenvaluesOnly);
            if (es.eigenvalues().minCoeff() < 1e-10)
                throw AssemblyError("transport and collision null spaces overlap");
        }
    }

    if (Eigen::LLT<Eigen::MatrixXd>(S).info() != Eigen::Success)
        throw AssemblyError("half-range flux matrix is not positive definite");

    return {set, std::move(A), std::move(Mblock), std::move(Q), std::move(S),
            {model.kind, prandtl}};
}

void write_matrix(std::ostream &out, const Eigen::MatrixXd &matrix) {
    out << matrix.rows() << ' ' << matrix.cols() << '\n';
    char buf[64];
    for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
        for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", matrix(i, j));
            out << (j ? " " : "") << buf;
        }
        out << '\n';
    }
}

Eigen::MatrixXd read_matrix(std::istream &in) {
    Eigen::Index rows = 0, cols = 0;
    if (!(in >> rows >> cols) || rows < 0 || cols < 0)
        throw std::invalid_argument("read_matrix: bad header");
    Eigen::MatrixXd matrix(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            if (!(in >> matrix(i, j)))
                throw std::invalid_argument("read_matrix: truncated data");
    return matrix;
}

} // namespace knlayer
