#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include <knlayer/assembly.hpp>
#include <knlayer/errors.hpp>

using namespace knlayer;

namespace {
const std::vector<MultiIndex> kThreeChains = {{1, 0, 0}, {3, 0, 0}, {1, 0, 2}};
const std::vector<MultiIndex> kTraceChains = {{0, 0, 0}, {2, 0, 0}, {0, 0, 2}};
} // namespace

TEST_CASE("hermite values at zero") {
    const auto z = hermite_zero_values(4);
    REQUIRE(z.size() == 5);
    CHECK(z[0] == 1.0);
    CHECK(z[1] == 0.0);
    CHECK(z[2] == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(z[3] == 0.0);
    CHECK(z[4] == doctest::Approx(std::sqrt(3.0 / 8.0)).epsilon(1e-15));
    CHECK_THROWS_AS(hermite_zero_values(-1), std::invalid_argument);
}

TEST_CASE("transport matrix couples neighbouring wall-normal degrees") {
    const IndexSet set = build_index_set(kThreeChains, 4, 3);
    const TransportMatrices t = assemble_transport(set);

    auto entry = [&](std::initializer_list<int> a, std::initializer_list<int> b) {
        return t.A(set.position(MultiIndex(a)), set.position(MultiIndex(b)));
    };
    CHECK(entry({1, 0, 0}, {1, 1, 0}) == doctest::Approx(1.0));
    CHECK(entry({1, 2, 0}, {1, 1, 0}) == doctest::Approx(std::sqrt(2.0)));
    CHECK(entry({1, 2, 0}, {1, 3, 0}) == doctest::Approx(std::sqrt(3.0)));
    CHECK(entry({1, 0, 0}, {1, 3, 0}) == 0.0);
    CHECK(entry({1, 0, 0}, {3, 1, 0}) == 0.0); // different chain

    // anti-diagonal block structure and symmetry
    const int m = set.m(), n = set.n();
    CHECK(t.A.topLeftCorner(m, m).isZero(0.0));
    CHECK(t.A.bottomRightCorner(n, n).isZero(0.0));
    CHECK((t.A - t.A.transpose()).isZero(0.0));
    CHECK(t.A.topRightCorner(m, n) == t.Mblock);
}

TEST_CASE("shakhov collision entries") {
    const IndexSet set = build_index_set(kTraceChains, 4, 3);
    const double pr = 2.0 / 3.0;
    const Eigen::MatrixXd Q = assemble_collision_shakhov(set, pr);

    auto entry = [&](std::initializer_list<int> a, std::initializer_list<int> b) {
        return Q(set.position(MultiIndex(a)), set.position(MultiIndex(b)));
    };
    // trace family: delta_ij - 1/D, independent of Pr
    CHECK(entry({2, 0, 0}, {2, 0, 0}) == doctest::Approx(2.0 / 3.0));
    CHECK(entry({2, 0, 0}, {0, 2, 0}) == doctest::Approx(-1.0 / 3.0));
    CHECK(entry({2, 0, 0}, {0, 0, 2}) == doctest::Approx(-1.0 / 3.0));
    // heat-flux family around e2: diagonal member 3 e2 = e2 + 2 e2
    CHECK(entry({0, 3, 0}, {0, 3, 0}) == doctest::Approx(1.0 - (1.0 - pr) / 5.0 * 3.0));
    CHECK(entry({0, 3, 0}, {2, 1, 0}) ==
          doctest::Approx(-(1.0 - pr) / 5.0 * std::sqrt(3.0)));
    // collision invariants: zero rows
    CHECK(Q.row(set.position(MultiIndex{0, 0, 0})).isZero(0.0));
    CHECK(Q.row(set.position(MultiIndex{0, 1, 0})).isZero(0.0));
    // plain relaxation elsewhere
    CHECK(entry({0, 4, 0}, {0, 4, 0}) == doctest::Approx(1.0));
    CHECK(entry({0, 4, 0}, {2, 2, 0}) == 0.0);

    // Pr = 1 erases the Shakhov correction
    const Eigen::MatrixXd Qbgk = assemble_collision_shakhov(set, 1.0);
    CHECK(entry({0, 3, 0}, {2, 1, 0}) != 0.0);
    CHECK(Qbgk(set.position(MultiIndex{0, 3, 0}), set.position(MultiIndex{2, 1, 0})) == 0.0);
}

TEST_CASE("half-range flux matrix") {
    const IndexSet set = build_index_set(kThreeChains, 6, 3);
    const Eigen::MatrixXd S = assemble_halfflux(set);
    REQUIRE(S.rows() == set.m());

    auto entry = [&](std::initializer_list<int> a, std::initializer_list<int> b) {
        return S(set.position(MultiIndex(a)), set.position(MultiIndex(b)));
    };
    SUBCASE("one-dimensional closed form") {
        CHECK(halfflux_entry_1d(0, 0) == doctest::Approx(1.0));
        CHECK(halfflux_entry_1d(2, 2) == doctest::Approx(2.5));
        CHECK(halfflux_entry_1d(0, 2) == doctest::Approx(1.0 / std::sqrt(2.0)));
        CHECK(halfflux_entry_1d(0, 2) == halfflux_entry_1d(2, 0));
        CHECK_THROWS_AS(halfflux_entry_1d(1, 2), std::invalid_argument);
        CHECK_THROWS_AS(halfflux_entry_1d(-2, 0), std::invalid_argument);
    }
    SUBCASE("separability over chains") {
        CHECK(entry({1, 0, 0}, {1, 0, 0}) == doctest::Approx(halfflux_entry_1d(0, 0)));
        CHECK(entry({1, 2, 0}, {1, 2, 0}) == doctest::Approx(halfflux_entry_1d(2, 2)));
        CHECK(entry({1, 0, 0}, {1, 2, 0}) == doctest::Approx(halfflux_entry_1d(0, 2)));
        // different chains never couple
        CHECK(entry({1, 0, 0}, {3, 0, 0}) == 0.0);
        CHECK(entry({1, 0, 0}, {1, 0, 2}) == 0.0);
    }
    SUBCASE("symmetric positive definite") {
        CHECK((S - S.transpose()).isZero(0.0));
        Eigen::LLT<Eigen::MatrixXd> llt(S);
        CHECK(llt.info() == Eigen::Success);
    }
}

TEST_CASE("assembled systems satisfy the structural contract") {
    for (const auto *gens : {&kThreeChains, &kTraceChains}) {
        for (int M : {4, 9, 14}) {
            CAPTURE(M);
            const IndexSet set = build_index_set(*gens, M, 3);
            const MomentSystem sys = assemble_system(set, CollisionModel::shakhov());
            const int m = sys.m(), n = sys.n();
            CHECK(sys.A.rows() == m + n);
            CHECK(sys.A.topLeftCorner(m, m).isZero(0.0));
            CHECK((sys.Q - sys.Q.transpose()).isZero(0.0));
            CHECK(sys.Q.topRightCorner(m, n).isZero(0.0));
            // Q is positive semi-definite
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sys.Q);
            CHECK(es.eigenvalues().minCoeff() >= -1e-12);
            // M has full column rank
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.Mblock);
            const double tau = rank_threshold(m, n, svd.singularValues()[0]);
            CHECK((svd.singularValues().array() > tau).count() == n);
        }
    }
}

TEST_CASE("degenerate sets are rejected at assembly") {
    // the lone invariant moment: A and Q share the null vector
    const IndexSet trivial = build_index_set({MultiIndex{0, 0, 0}}, 0, 3);
    CHECK_THROWS_AS(assemble_system(trivial, CollisionModel::bgk()), AssemblyError);
    CHECK_THROWS_WITH_AS(assemble_system(trivial, CollisionModel::bgk()),
                         doctest::Contains("null"), AssemblyError);
}

TEST_CASE("matrix exchange format round-trips") {
    Eigen::MatrixXd X(2, 3);
    X << 1.0, -0.123456789012345678, 3e-17, 0.0, 1e300, -2.5;
    std::stringstream ss;
    write_matrix(ss, X);
    const Eigen::MatrixXd Y = read_matrix(ss);
    REQUIRE(Y.rows() == 2);
    REQUIRE(Y.cols() == 3);
    CHECK((X - Y).cwiseAbs().maxCoeff() == 0.0);

    std::stringstream empty("0 0\n");
    CHECK(read_matrix(empty).size() == 0);

    std::stringstream bad("2 2\n1 2 3\n");
    CHECK_THROWS_AS(read_matrix(bad), std::invalid_argument);
}
