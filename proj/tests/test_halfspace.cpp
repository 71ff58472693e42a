#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <memory>
#include <random>

#include <knlayer/assembly.hpp>
#include <knlayer/errors.hpp>
#include <knlayer/halfspace.hpp>

using namespace knlayer;

namespace {

MomentSystem three_chain_system(int M, CollisionModel model = CollisionModel::bgk()) {
    return assemble_system(
        build_index_set({MultiIndex{1, 0, 0}, MultiIndex{3, 0, 0}, MultiIndex{1, 0, 2}}, M, 3),
        model);
}

MomentSystem trace_chain_system(int M, CollisionModel model = CollisionModel::bgk()) {
    return assemble_system(
        build_index_set({MultiIndex{0, 0, 0}, MultiIndex{2, 0, 0}, MultiIndex{0, 0, 2}}, M, 3),
        model);
}

} // namespace

TEST_CASE("decomposition counts for the reference problems") {
    const MomentSystem k4 = three_chain_system(4);
    const Decomposition dk = decompose(k4);
    CHECK(dk.m == 4);
    CHECK(dk.n == 4);
    CHECK(dk.p1 == 1);
    CHECK(dk.p2 == 0);
    CHECK(dk.r1 == 1);
    CHECK(dk.r2 == 0);
    CHECK(dk.c == 0);
    CHECK(dk.nplus == 3);

    const MomentSystem t5 = trace_chain_system(5);
    const Decomposition dt = decompose(t5);
    CHECK(dt.p1 == 2);
    CHECK(dt.p2 == 1);
    CHECK(dt.r1 == 1);
    CHECK(dt.r2 == 0);
    CHECK(dt.c == 1);
    CHECK(dt.nplus == dt.n - dt.p1); // p2 = c for these families
}

TEST_CASE("decomposition is an orthogonal splitting adapted to A and Q") {
    for (int M : {4, 5, 8, 11}) {
        CAPTURE(M);
        const MomentSystem sys = three_chain_system(M, CollisionModel::shakhov());
        const Decomposition d = decompose(sys);
        const int N = d.m + d.n;

        // G spans Null(Q), orthonormal
        CHECK((sys.Q * d.G).cwiseAbs().maxCoeff() < 1e-13);
        CHECK((d.G.transpose() * d.G - Eigen::MatrixXd::Identity(d.p, d.p))
                  .cwiseAbs()
                  .maxCoeff() < 1e-13);
        // X spans Null(G^T A G)
        CHECK((d.G.transpose() * sys.A * d.G * d.X).cwiseAbs().maxCoeff() < 1e-13);

        // [V1 V2 V3] is an orthonormal basis of R^N
        Eigen::MatrixXd V(N, N);
        V << d.V1, d.V2, d.V3;
        CHECK((V.transpose() * V - Eigen::MatrixXd::Identity(N, N)).cwiseAbs().maxCoeff() <
              1e-12);

        // A maps V1 into span(V2): the two off blocks of V^T A V1 vanish
        CHECK((d.V1.transpose() * sys.A * d.V1).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((d.V3.transpose() * sys.A * d.V1).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((d.U2 - sys.A * d.V1).cwiseAbs().maxCoeff() < 1e-13);

        // A21 is symmetric positive definite of full rank r
        CHECK((d.A21 - d.A21.transpose()).cwiseAbs().maxCoeff() < 1e-13);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d.A21);
        CHECK(es.eigenvalues().minCoeff() > 0.0);

        // count identities
        CHECK(d.r1 == d.p1 - d.c);
        CHECK(d.r2 == d.p2 - d.c);
        CHECK(2 * d.nplus == 2 * d.n - d.p - d.r);
        CHECK(d.mt + d.nt == N - d.r - d.p);
    }
}

TEST_CASE("signature counts") {
    Eigen::MatrixXd one(1, 1);
    one << 2.0;
    Signature s = signature_counts(one);
    CHECK(s.zero == 0);
    CHECK(s.positive == 1);
    CHECK(s.negative == 1);

    Eigen::MatrixXd tall = Eigen::MatrixXd::Zero(2, 1);
    tall(0, 0) = 1.0;
    s = signature_counts(tall);
    CHECK(s.zero == 1);
    CHECK(s.positive == 1);

    s = signature_counts(Eigen::MatrixXd::Zero(2, 3));
    CHECK(s.zero == 5);
    CHECK(s.positive == 0);

    // agreement with a dense eigensolve of [[0,D],[D^T,0]]
    std::mt19937 rng(7);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 30; ++trial) {
        const int rows = 1 + trial % 4, cols = 1 + (trial / 4) % 4;
        Eigen::MatrixXd D(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j)
                D(i, j) = gauss(rng);
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(rows + cols, rows + cols);
        H.topRightCorner(rows, cols) = D;
        H.bottomLeftCorner(cols, rows) = D.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        int pos = 0, neg = 0, zero = 0;
        for (int i = 0; i < es.eigenvalues().size(); ++i) {
            const double ev = es.eigenvalues()[i];
            if (ev > 1e-9)
                ++pos;
            else if (ev < -1e-9)
                ++neg;
            else
                ++zero;
        }
        const Signature got = signature_counts(D);
        CHECK(got.positive == pos);
        CHECK(got.negative == neg);
        CHECK(got.zero == zero);
    }
}

TEST_CASE("generalized modes") {
    SUBCASE("scalar coupling block") {
        Eigen::MatrixXd A33 = Eigen::MatrixXd::Zero(2, 2);
        A33(0, 1) = A33(1, 0) = -3.0;
        const Modes modes = generalized_modes(A33, Eigen::MatrixXd::Identity(2, 2), 1);
        REQUIRE(modes.LambdaPlus.size() == 1);
        CHECK(modes.LambdaPlus[0] == doctest::Approx(3.0));
        // sign convention: leading significant component positive
        CHECK(modes.Tplus(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
        CHECK(modes.Tplus(1, 0) == doctest::Approx(-1.0 / std::sqrt(2.0)));
    }
    SUBCASE("generalized eigenproblem holds on a real reduction") {
        for (int M : {4, 7, 10}) {
            CAPTURE(M);
            const Decomposition d = decompose(three_chain_system(M));
            const Modes modes = generalized_modes(d.A33, d.Q33, d.mt);
            REQUIRE(modes.LambdaPlus.size() == d.nplus);
            // descending positive decay scales
            for (int k = 0; k + 1 < d.nplus; ++k)
                CHECK(modes.LambdaPlus[k] >= modes.LambdaPlus[k + 1]);
            CHECK(modes.LambdaPlus.minCoeff() > 0.0);
            // A33 T = Q33 T Lambda and T^T Q33 T = I
            const Eigen::MatrixXd lhs = d.A33 * modes.Tplus;
            const Eigen::MatrixXd rhs =
                d.Q33 * modes.Tplus * modes.LambdaPlus.asDiagonal();
            CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
            CHECK((modes.Tplus.transpose() * d.Q33 * modes.Tplus -
                   Eigen::MatrixXd::Identity(d.nplus, d.nplus))
                      .cwiseAbs()
                      .maxCoeff() < 1e-12);
        }
    }
    SUBCASE("degenerate decay scales stay deterministic") {
        const Decomposition d = decompose(three_chain_system(4));
        // the M = 4 family has a repeated decay scale
        CHECK(d.LambdaPlus[0] == doctest::Approx(std::sqrt(3.0)));
        CHECK(d.LambdaPlus[1] == doctest::Approx(1.0));
        CHECK(d.LambdaPlus[2] == doctest::Approx(1.0));
        const Modes again = generalized_modes(d.A33, d.Q33, d.mt);
        CHECK((again.Tplus - d.Tplus).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("input validation") {
        Eigen::MatrixXd not_anti = Eigen::MatrixXd::Identity(2, 2);
        CHECK_THROWS_AS(generalized_modes(not_anti, Eigen::MatrixXd::Identity(2, 2), 1),
                        std::invalid_argument);
        Eigen::MatrixXd A33 = Eigen::MatrixXd::Zero(2, 2);
        A33(0, 1) = A33(1, 0) = 1.0;
        Eigen::MatrixXd bad_q = -Eigen::MatrixXd::Identity(2, 2);
        CHECK_THROWS_AS(generalized_modes(A33, bad_q, 1), InconsistencyError);
        CHECK_THROWS_AS(generalized_modes(A33, Eigen::MatrixXd::Identity(2, 2), 5),
                        std::invalid_argument);
    }
}

TEST_CASE("solve_halfspace") {
    auto dec = std::make_shared<const Decomposition>(decompose(three_chain_system(4)));
    const int N = dec->m + dec->n;

    SUBCASE("homogeneous data gives the zero mode vector") {
        const Eigen::MatrixXd B = Eigen::MatrixXd::Random(dec->nplus, N);
        const Eigen::VectorXd z0 = solve_halfspace(*dec, B, Eigen::VectorXd::Zero(dec->nplus));
        CHECK(z0.cwiseAbs().maxCoeff() < 1e-14);
    }
    SUBCASE("square invertible case reproduces a unit vector") {
        std::mt19937 rng(123);
        std::normal_distribution<double> gauss;
        Eigen::MatrixXd B(dec->nplus, N);
        for (int i = 0; i < B.rows(); ++i)
            for (int j = 0; j < B.cols(); ++j)
                B(i, j) = gauss(rng);
        const Eigen::MatrixXd K = B * dec->C_V3;
        const Eigen::VectorXd z0 = solve_halfspace(*dec, B, K.col(0));
        CHECK((z0 - Eigen::VectorXd::Unit(dec->nplus, 0)).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("rank deficiency is ill-posed") {
        const Eigen::MatrixXd B = Eigen::MatrixXd::Zero(dec->nplus, N);
        CHECK_THROWS_AS(solve_halfspace(*dec, B, Eigen::VectorXd::Zero(dec->nplus)),
                        IllPosedBoundaryError);
    }
    SUBCASE("unreachable data in the overdetermined case") {
        Eigen::MatrixXd B = Eigen::MatrixXd::Random(dec->nplus + 1, N);
        Eigen::VectorXd g = Eigen::VectorXd::Zero(dec->nplus + 1);
        // perturb strictly outside the span of a generic tall K
        g[0] = 1.0;
        g[dec->nplus] = -1.0;
        const Eigen::MatrixXd K = B * dec->C_V3;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(K, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Eigen::VectorXd residual = g - K * svd.solve(g);
        REQUIRE(residual.norm() > 1e-6 * g.norm()); // generic: truly unreachable
        CHECK_THROWS_AS(solve_halfspace(*dec, B, g), InconsistentDataError);
    }
    SUBCASE("no decaying modes at the smallest order") {
        auto d3 = std::make_shared<const Decomposition>(decompose(three_chain_system(3)));
        REQUIRE(d3->nplus == 0);
        const Eigen::MatrixXd B = Eigen::MatrixXd::Ones(1, d3->m + d3->n);
        CHECK(solve_halfspace(*d3, B, Eigen::VectorXd::Zero(1)).size() == 0);
        CHECK_THROWS_AS(solve_halfspace(*d3, B, Eigen::VectorXd::Ones(1)),
                        InconsistentDataError);
    }
}

TEST_CASE("layer evaluation solves the interior equations") {
    for (int M : {5, 9}) {
        CAPTURE(M);
        const MomentSystem sys = three_chain_system(M, CollisionModel::shakhov());
        auto dec = std::make_shared<const Decomposition>(decompose(sys));
        const LayerSolution sol =
            make_layer_solution(dec, Eigen::VectorXd::Ones(dec->nplus), Eigen::VectorXd());

        const Eigen::VectorXd w0 = evaluate_solution(sol, 0.0);
        const double scale = std::max(1.0, w0.lpNorm<Eigen::Infinity>());
        for (double y : {0.0, 0.3, 1.0, 4.0}) {
            CAPTURE(y);
            const Eigen::VectorXd w = evaluate_solution(sol, y);
            const Eigen::VectorXd dw = evaluate_derivative(sol, y);
            // analytic residual of A w' = -Q w
            CHECK((sys.A * dw + sys.Q * w).lpNorm<Eigen::Infinity>() < 1e-12 * scale);
            // conserved combinations vanish along the layer
            CHECK((dec->G.transpose() * sys.A * w).lpNorm<Eigen::Infinity>() < 1e-12 * scale);
            CHECK((dec->V2.transpose() * w).lpNorm<Eigen::Infinity>() < 1e-12 * scale);
            // derivative agrees with second-order finite differences
            const double h = 1e-6;
            const Eigen::VectorXd fd =
                (y < h) ? Eigen::VectorXd((-3.0 * w + 4.0 * evaluate_solution(sol, y + h) -
                                           evaluate_solution(sol, y + 2 * h)) /
                                          (2 * h))
                        : Eigen::VectorXd((evaluate_solution(sol, y + h) -
                                           evaluate_solution(sol, y - h)) /
                                          (2 * h));
            CHECK((dw - fd).lpNorm<Eigen::Infinity>() < 1e-6 * scale);
        }
        // decay at infinity
        const double ylarge = dec->LambdaPlus.maxCoeff() * std::log(1e10);
        CHECK(evaluate_solution(sol, ylarge).lpNorm<Eigen::Infinity>() < 1e-9 * scale);
        CHECK_THROWS_AS(evaluate_solution(sol, -0.1), std::invalid_argument);
        CHECK_THROWS_AS(evaluate_derivative(sol, -0.1), std::invalid_argument);
    }
}

TEST_CASE("layer solution shape validation") {
    auto dec = std::make_shared<const Decomposition>(decompose(three_chain_system(4)));
    CHECK_THROWS_AS(
        make_layer_solution(dec, Eigen::VectorXd::Zero(dec->nplus + 1), Eigen::VectorXd()),
        std::invalid_argument);
    CHECK_THROWS_AS(
        make_layer_solution(dec, Eigen::VectorXd::Zero(dec->nplus), Eigen::VectorXd::Zero(2)),
        std::invalid_argument);
}
