#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "kcontract/compound.hpp"
#include "kcontract/measures.hpp"
#include "test_util.hpp"

using namespace kcontract;
namespace tu = testutil;

TEST_CASE("norm tags round-trip by name") {
    for (Norm p : {Norm::One, Norm::Two, Norm::Inf}) CHECK(norm_from_name(norm_name(p)) == p);
    CHECK(norm_from_name("inf") == Norm::Inf);
    CHECK_THROWS_AS(norm_from_name("3"), InvalidArgument);
}

TEST_CASE("measure of the zero matrix is zero for every norm") {
    const Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(4, 4);
    for (Norm p : {Norm::One, Norm::Two, Norm::Inf}) CHECK(measure(Z, p) == 0.0);
}

TEST_CASE("measure of a diagonal matrix is the largest diagonal entry") {
    Eigen::VectorXd d(5);
    d << -2.5, 0.75, -4.0, 3.25, 1.0;
    const Eigen::MatrixXd D = d.asDiagonal();
    for (Norm p : {Norm::One, Norm::Two, Norm::Inf})
        CHECK(measure(D, p) == doctest::Approx(3.25).epsilon(1e-14));
}

TEST_CASE("column-sum form on a hand-evaluated example") {
    Eigen::MatrixXd A(2, 2);
    A << -1, 2, 0, -3;
    CHECK(measure(A, Norm::One) == -1.0);   // max(-1+0, -3+2)
    CHECK(measure(A, Norm::Inf) == 1.0);    // max(-1+2, -3+0)
}

TEST_CASE("measure dominates the spectral abscissa") {
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + trial % 5;
        const Eigen::MatrixXd A = tu::random_matrix(n, n);
        double alpha = -1e300;
        for (const auto& lam : tu::eigenvalues(A)) alpha = std::max(alpha, lam.real());
        for (Norm p : {Norm::One, Norm::Two, Norm::Inf})
            CHECK(measure(A, p) >= alpha - 1e-8);
    }
}

TEST_CASE("second-compound measure: pairwise diagonal example") {
    Eigen::VectorXd d(4);
    d << 2, -3, -1, -1;
    const Eigen::MatrixXd A = d.asDiagonal();
    CHECK(measure_of_second_compound(A, Norm::Inf) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(measure_of_second_compound(A, Norm::One) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(measure_of_second_compound(A, Norm::Two) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("second-compound measure in the 2-norm is the top two eigenvalue sum") {
    // symmetric matrix with spectrum {-1, -2, -5}
    const Eigen::MatrixXd Q = tu::random_orthonormal(3, 3);
    Eigen::VectorXd d(3);
    d << -1, -2, -5;
    const Eigen::MatrixXd A = Q * d.asDiagonal() * Q.transpose();
    CHECK(measure_of_second_compound(A, Norm::Two) == doctest::Approx(-3.0).epsilon(1e-10));
}

TEST_CASE("closed forms agree with the explicit compound") {
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + trial % 7;  // up to 8
        const Eigen::MatrixXd A = tu::random_matrix(n, n);
        const Eigen::MatrixXd A2 = add_compound(A, 2);
        for (Norm p : {Norm::One, Norm::Two, Norm::Inf}) {
            const double closed = measure_of_second_compound(A, p);
            const double direct = measure(A2, p);
            CHECK(std::abs(closed - direct) <= 1e-10);
        }
    }
}

TEST_CASE("n = 2: the second compound is the trace, exactly") {
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::MatrixXd A = tu::random_rational_matrix(2, 2);
        for (Norm p : {Norm::One, Norm::Two, Norm::Inf})
            CHECK(measure_of_second_compound(A, p) == A.trace());
    }
}

TEST_CASE("input guards") {
    CHECK_THROWS_AS(measure(tu::random_matrix(2, 3), Norm::Inf), InvalidArgument);
    CHECK_THROWS_AS(measure_of_second_compound(Eigen::MatrixXd::Zero(1, 1), Norm::Inf),
                    InvalidArgument);
}
