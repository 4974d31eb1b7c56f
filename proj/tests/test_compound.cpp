#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "kcontract/compound.hpp"
#include "kcontract/simulate.hpp"
#include "test_util.hpp"

using namespace kcontract;
namespace tu = testutil;

namespace {

/// Definitional oracle: A^[k] as the derivative of (I + eps A)^(k) at eps = 0,
/// realized by a central difference. Independent of the combinatorial rule.
Eigen::MatrixXd add_compound_fd_oracle(const Eigen::MatrixXd& A, int k, double eps = 1e-5) {
    const int n = static_cast<int>(A.rows());
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd plus = mult_compound(I + eps * A, k);
    const Eigen::MatrixXd minus = mult_compound(I - eps * A, k);
    return (plus - minus) / (2.0 * eps);
}

std::vector<std::complex<double>> k_fold(const std::vector<std::complex<double>>& lam, int k,
                                         bool product) {
    const auto sets = lex_subsets(static_cast<int>(lam.size()), k);
    std::vector<std::complex<double>> out;
    for (const auto& s : sets.subsets) {
        std::complex<double> acc = product ? 1.0 : 0.0;
        for (int idx : s) acc = product ? acc * lam[idx - 1] : acc + lam[idx - 1];
        out.push_back(acc);
    }
    return out;
}

}  // namespace

TEST_CASE("lex_subsets enumerates k-subsets in lexicographic order") {
    const auto s32 = lex_subsets(3, 2);
    REQUIRE(s32.size() == 3);
    CHECK(s32.subsets[0] == std::vector<int>{1, 2});
    CHECK(s32.subsets[1] == std::vector<int>{1, 3});
    CHECK(s32.subsets[2] == std::vector<int>{2, 3});

    const auto s41 = lex_subsets(4, 1);
    REQUIRE(s41.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(s41.subsets[i] == std::vector<int>{i + 1});

    const auto s44 = lex_subsets(4, 4);
    REQUIRE(s44.size() == 1);
    CHECK(s44.subsets[0] == std::vector<int>{1, 2, 3, 4});

    CHECK_THROWS_AS(lex_subsets(3, 0), InvalidArgument);
    CHECK_THROWS_AS(lex_subsets(3, 4), InvalidArgument);

    // every tuple strictly increasing; count matches binomial
    const auto s63 = lex_subsets(6, 3);
    CHECK(s63.size() == binomial(6, 3));
    for (const auto& t : s63.subsets)
        for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i - 1] < t[i]);
}

TEST_CASE("binomial coefficients") {
    CHECK(binomial(6, 3) == 20);
    CHECK(binomial(16, 8) == 12870);
    CHECK(binomial(5, 0) == 1);
    CHECK(binomial(5, 5) == 1);
}

TEST_CASE("multiplicative compound of the identity is the identity") {
    for (int n : {2, 4, 6})
        for (int k = 1; k <= n; ++k) {
            const Eigen::MatrixXd C = mult_compound(Eigen::MatrixXd::Identity(n, n), k);
            const auto m = binomial(n, k);
            CHECK((C - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff() == 0.0);
        }
}

TEST_CASE("second multiplicative compound of a 3x3 is the matrix of 2x2 minors") {
    const Eigen::MatrixXd A = tu::random_rational_matrix(3, 3);
    const Eigen::MatrixXd C = mult_compound(A, 2);
    auto minor2 = [&](int r1, int r2, int c1, int c2) {
        return A(r1, c1) * A(r2, c2) - A(r1, c2) * A(r2, c1);
    };
    // row/column subsets in order (1,2), (1,3), (2,3)
    const int rs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(C(i, j) == minor2(rs[i][0], rs[i][1], rs[j][0], rs[j][1]));
}

TEST_CASE("Cauchy-Binet: (BC)^(k) = B^(k) C^(k)") {
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(tu::uniform(0, 4.999));
        const int m = 2 + static_cast<int>(tu::uniform(0, 4.999));
        const int p = 2 + static_cast<int>(tu::uniform(0, 4.999));
        const int kmax = std::min({n, m, p, 3});
        for (int k = 1; k <= kmax; ++k) {
            const Eigen::MatrixXd B = tu::random_matrix(n, m);
            const Eigen::MatrixXd C = tu::random_matrix(m, p);
            const Eigen::MatrixXd lhs = mult_compound(B * C, k);
            const Eigen::MatrixXd rhs = mult_compound(B, k) * mult_compound(C, k);
            CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10);
        }
    }
}

TEST_CASE("compound of inverse is inverse of compound") {
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 3 + trial % 3;
        Eigen::MatrixXd A = tu::random_matrix(n, n, 1.0);
        A += 3.0 * Eigen::MatrixXd::Identity(n, n);  // keep it well conditioned
        for (int k = 1; k <= std::min(n, 3); ++k) {
            const Eigen::MatrixXd lhs = mult_compound(A, k).inverse();
            const Eigen::MatrixXd rhs = mult_compound(A.inverse(), k);
            CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-8);
        }
    }
}

TEST_CASE("additive compound: k=1 is A, k=n is trace") {
    const Eigen::MatrixXd A = tu::random_matrix(4, 4);
    CHECK((add_compound(A, 1) - A).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::MatrixXd t = add_compound(A, 4);
    REQUIRE(t.rows() == 1);
    CHECK(t(0, 0) == doctest::Approx(A.trace()).epsilon(1e-15));
}

TEST_CASE("additive compound of a 3x3, k=2: explicit signed layout, exact") {
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::MatrixXd A = tu::random_rational_matrix(3, 3);
        const Eigen::MatrixXd C = add_compound(A, 2);
        Eigen::MatrixXd E(3, 3);
        E << A(0, 0) + A(1, 1), A(1, 2), -A(0, 2),
             A(2, 1), A(0, 0) + A(2, 2), A(0, 1),
             -A(2, 0), A(1, 0), A(1, 1) + A(2, 2);
        CHECK((C - E).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("additive compound matches the finite-difference definitional oracle") {
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 3 + trial % 4;  // up to 6
        const Eigen::MatrixXd A = tu::random_matrix(n, n);
        for (int k = 2; k <= std::min(n, 3); ++k) {
            const Eigen::MatrixXd built = add_compound(A, k);
            const Eigen::MatrixXd oracle = add_compound_fd_oracle(A, k);
            CHECK((built - oracle).cwiseAbs().maxCoeff() <= 1e-6);
        }
    }
}

TEST_CASE("spectral laws: compounds have k-fold product/sum spectra") {
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 3 + trial % 4;
        const Eigen::MatrixXd A = tu::random_matrix(n, n, 1.0);
        const auto lam = tu::eigenvalues(A);
        for (int k = 1; k <= std::min(n, 3); ++k) {
            CHECK(tu::spectrum_distance(tu::eigenvalues(mult_compound(A, k)),
                                        k_fold(lam, k, true)) <= 1e-8);
            CHECK(tu::spectrum_distance(tu::eigenvalues(add_compound(A, k)),
                                        k_fold(lam, k, false)) <= 1e-8);
        }
    }
}

TEST_CASE("compound dynamics: exp(t A^[k]) equals (exp(tA))^(k), one side integrated") {
    const Eigen::MatrixXd A = tu::random_matrix(4, 4, 0.8);
    for (int k : {2, 3}) {
        const Eigen::MatrixXd Ak = add_compound(A, k);
        const int m = static_cast<int>(Ak.rows());
        // integrate column-stacked Phi' = A^[k] Phi from Phi(0) = I
        VectorFieldModel flow;
        flow.id = "compound-flow";
        flow.dim = m * m;
        flow.domain = BoxDomain::cube(m * m, 1e6);
        flow.rhs = [Ak, m](double, const Eigen::VectorXd& v) {
            const Eigen::Map<const Eigen::MatrixXd> Phi(v.data(), m, m);
            Eigen::MatrixXd D = Ak * Phi;
            return Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(D.data(), m * m));
        };
        Eigen::MatrixXd I = Eigen::MatrixXd::Identity(m, m);
        const Eigen::VectorXd phi0 = Eigen::Map<Eigen::VectorXd>(I.data(), m * m);
        for (double t : {0.1, 1.0}) {
            const Trajectory traj = integrate(flow, phi0, 0.0, t);
            const Eigen::VectorXd vend = traj.states.back();
            const Eigen::Map<const Eigen::MatrixXd> Phi(vend.data(), m, m);
            const Eigen::MatrixXd expected = mult_compound((t * A).exp(), k);
            CHECK((Phi - expected).cwiseAbs().maxCoeff() <= 1e-6);
        }
    }
}

TEST_CASE("transform_add_compound") {
    const Eigen::MatrixXd A = tu::random_matrix(4, 4);

    SUBCASE("V = W = I reproduces the additive compound") {
        const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(4, 4);
        for (int k : {1, 2, 3})
            CHECK((transform_add_compound(I, A, I, k) - add_compound(A, k))
                      .cwiseAbs()
                      .maxCoeff() <= 1e-14);
    }

    SUBCASE("orthonormal V: equals the compound of the compressed matrix") {
        const Eigen::MatrixXd V = tu::random_orthonormal(4, 2);
        const Eigen::MatrixXd lhs = transform_add_compound(V.transpose(), A, V, 2);
        const Eigen::MatrixXd rhs = add_compound(V.transpose() * A * V, 2);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10);
    }

    SUBCASE("rejects V W far from identity") {
        const Eigen::MatrixXd V = tu::random_matrix(2, 4);
        CHECK_THROWS_AS(transform_add_compound(V, A, V.transpose(), 2), InvalidArgument);
    }
}

TEST_CASE("second compound of the agent-difference output matrix") {
    // V (3x2) whose second multiplicative compound is the vector of its 2x2
    // minors; the consensus-analysis value is (1/sqrt(3)) [-1, 1, -1]^T.
    Eigen::MatrixXd V(3, 2);
    const double s6 = std::sqrt(6.0), s2 = std::sqrt(2.0);
    V << -2.0 / s6, 0.0, 1.0 / s6, -1.0 / s2, 1.0 / s6, 1.0 / s2;
    const Eigen::MatrixXd V2 = mult_compound(V, 2);
    REQUIRE(V2.rows() == 3);
    REQUIRE(V2.cols() == 1);
    const double c = 1.0 / std::sqrt(3.0);
    const double sign = V2(0, 0) < 0 ? 1.0 : -1.0;
    CHECK(sign * V2(0, 0) == doctest::Approx(-c).epsilon(1e-12));
    CHECK(sign * V2(1, 0) == doctest::Approx(c).epsilon(1e-12));
    CHECK(sign * V2(2, 0) == doctest::Approx(-c).epsilon(1e-12));
}

TEST_CASE("capacity and argument guards") {
    CHECK_THROWS_AS(add_compound(tu::random_matrix(3, 4), 2), InvalidArgument);
    CHECK_THROWS_AS(add_compound(Eigen::MatrixXd::Zero(17, 17), 2), CapacityError);
    CHECK_THROWS_AS(mult_compound(tu::random_matrix(3, 3), 4), InvalidArgument);
    Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(3, 3);
    bad(1, 1) = std::nan("");
    CHECK_THROWS_AS(mult_compound(bad, 2), NonFiniteError);
}
