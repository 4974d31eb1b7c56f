#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "kcontract/certify.hpp"
#include "kcontract/decompose.hpp"
#include "kcontract/models.hpp"
#include "test_util.hpp"

using namespace kcontract;
namespace tu = testutil;

namespace {

SamplingGrid small_grid() {
    SamplingGrid g;
    g.points_per_axis = 5;
    g.random_samples = 200;
    return g;
}

}  // namespace

TEST_CASE("sample enumeration is deterministic and in-domain") {
    const BoxDomain box = BoxDomain::cube(3, 2.0);
    const auto a = enumerate_samples(box, small_grid());
    const auto b = enumerate_samples(box, small_grid());
    REQUIRE(a.size() == b.size());
    CHECK(a.size() == 5 * 5 * 5 + 200);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK((a[i] - b[i]).cwiseAbs().maxCoeff() == 0.0);
        CHECK(box.contains(a[i]));
    }

    // a larger random budget extends (never reshuffles) the sample list
    SamplingGrid bigger = small_grid();
    bigger.random_samples = 400;
    const auto c = enumerate_samples(box, bigger);
    REQUIRE(c.size() == a.size() + 200);
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK((a[i] - c[i]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("grid size is capped for high-dimensional boxes") {
    SamplingGrid g;
    g.points_per_axis = 9;
    g.random_samples = 10;
    g.max_grid_points = 100000;
    const auto samples = enumerate_samples(BoxDomain::cube(8, 1.0), g);
    CHECK(samples.size() <= 100000 + 10);
}

TEST_CASE("time sampling: single instant for time-invariant models") {
    const SamplingGrid g = small_grid();
    CHECK(enumerate_times(build_model("three-agents"), g) == std::vector<double>{0.0});
    const auto times = enumerate_times(build_model("sin-clock"), g);
    CHECK(times.size() == 17);
    CHECK(times.front() == 0.0);
    CHECK(times.back() == doctest::Approx(2 * M_PI));  // declared forcing period
}

TEST_CASE("volume-contraction certificate for the driven planar system") {
    const Certificate c =
        certify_k_contraction(build_model("sin-clock"), 2, Norm::Inf, small_grid());
    CHECK(c.passed);
    CHECK(c.bound == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(c.margin_eta == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(c.kind == "k_contraction");
}

TEST_CASE("forced oscillator: 2-contracting with bound -delta, not 1-contracting") {
    const VectorFieldModel duffing = build_model("duffing");
    const Certificate c2 = certify_k_contraction(duffing, 2, Norm::Inf, small_grid());
    CHECK(c2.passed);
    CHECK(c2.bound == doctest::Approx(-0.1).epsilon(1e-12));

    const Certificate c1 = certify_k_contraction(duffing, 1, Norm::Two, small_grid());
    CHECK_FALSE(c1.passed);
    CHECK(c1.bound > 0.0);
}

TEST_CASE("subspace 2-contraction certificates") {
    SUBCASE("block-diagonal linear system restricted to its first two coordinates") {
        const VectorFieldModel m = build_model("lti-example6");
        Eigen::MatrixXd V = Eigen::MatrixXd::Zero(4, 2);
        V(0, 0) = 1;
        V(1, 1) = 1;
        for (Norm p : {Norm::One, Norm::Two, Norm::Inf}) {
            const Certificate c = certify_subspace_2contraction(m, V, p, small_grid());
            CHECK(c.passed);
            CHECK(c.bound == doctest::Approx(-1.0).epsilon(1e-12));
        }
    }

    SUBCASE("eigenspace of a symmetric matrix: sum of the restricted eigenvalues") {
        const Eigen::MatrixXd Q = tu::random_orthonormal(4, 4);
        Eigen::VectorXd d(4);
        d << -1, -2, 3, 7;
        const VectorFieldModel m = build_lti(Q * d.asDiagonal() * Q.transpose());
        const Certificate c =
            certify_subspace_2contraction(m, Q.leftCols(2), Norm::Two, small_grid());
        CHECK(c.bound == doctest::Approx(-3.0).epsilon(1e-10));
        CHECK(c.passed);
    }

    SUBCASE("V = I reduces to the full-space check") {
        const VectorFieldModel m = build_model("two-agent-3d");
        const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(3, 3);
        for (Norm p : {Norm::One, Norm::Two, Norm::Inf}) {
            const Certificate full = certify_k_contraction(m, 2, p, small_grid());
            const Certificate sub = certify_subspace_2contraction(m, I, p, small_grid());
            CHECK(std::abs(full.bound - sub.bound) <= 1e-12);
        }
    }

    CHECK_THROWS_AS(certify_subspace_2contraction(build_model("two-agent-3d"),
                                                  Eigen::MatrixXd::Identity(3, 1), Norm::Inf,
                                                  small_grid()),
                    InvalidArgument);
}

TEST_CASE("subspace 1-contraction certificates") {
    const VectorFieldModel m = build_model("lti-example6");
    Eigen::MatrixXd U = Eigen::MatrixXd::Zero(4, 2);
    U(2, 0) = 1;
    U(3, 1) = 1;
    const Certificate c = certify_subspace_1contraction(m, U, Norm::Inf, small_grid());
    CHECK(c.passed);
    CHECK(c.bound == doctest::Approx(-1.0).epsilon(1e-12));

    // first coordinate of the forced oscillator has zero diagonal derivative
    Eigen::MatrixXd e1 = Eigen::MatrixXd::Zero(2, 1);
    e1(0, 0) = 1;
    const Certificate cd =
        certify_subspace_1contraction(build_model("duffing"), e1, Norm::Inf, small_grid());
    CHECK_FALSE(cd.passed);
    CHECK(cd.bound == doctest::Approx(0.0).epsilon(1e-14));

    // agreement direction of the two-agent system: restricted derivative -1
    const auto pair = model_known_pair("two-agent-3d");
    REQUIRE(pair.has_value());
    const Certificate ca = certify_subspace_1contraction(build_model("two-agent-3d"), pair->U,
                                                         Norm::Inf, small_grid());
    CHECK(ca.passed);
    CHECK(ca.bound == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("non-oscillation certificate") {
    SUBCASE("three synchronizing agents with linear coupling") {
        const VectorFieldModel m = build_model("three-agents");
        const auto pair = model_known_pair("three-agents");
        REQUIRE(pair.has_value());
        const Certificate c =
            certify_nob(m, pair->U, pair->V, Norm::Inf, small_grid());
        CHECK(c.passed);
        CHECK(c.kind == "nob");
        CHECK(c.bound == doctest::Approx(-6.0).epsilon(1e-12));
    }

    SUBCASE("two agents coupled through an integrator") {
        const VectorFieldModel m = build_model("two-agent-3d");
        const auto pair = model_known_pair("two-agent-3d");
        REQUIRE(pair.has_value());
        const Certificate c = certify_nob(m, pair->U, pair->V, Norm::Inf, small_grid());
        CHECK(c.passed);
        CHECK(c.bound == doctest::Approx(-1.0).epsilon(1e-9));
    }

    SUBCASE("marginal rotation on the complement is rejected") {
        Eigen::MatrixXd A(3, 3);
        A << 0, 1, 0, -1, 0, 0, 0, 0, -1;
        const VectorFieldModel m = build_lti(A);
        Eigen::MatrixXd U = Eigen::MatrixXd::Zero(3, 1);
        U(2, 0) = 1;
        Eigen::MatrixXd V = Eigen::MatrixXd::Zero(3, 2);
        V(0, 0) = 1;
        V(1, 1) = 1;
        const Certificate c = certify_nob(m, U, V, Norm::Inf, small_grid());
        CHECK_FALSE(c.passed);
        CHECK(c.bound >= 0.0);
        // consistency: rejection matches a spectrum touching the imaginary axis
        bool has_imaginary_axis_pair = false;
        for (const auto& lam : tu::eigenvalues(A))
            if (std::abs(lam.real()) <= 1e-9 && std::abs(lam.imag()) > 1e-9)
                has_imaginary_axis_pair = true;
        CHECK(has_imaginary_axis_pair);
    }

    SUBCASE("a certified linear instance has no imaginary-axis eigenvalues") {
        Eigen::VectorXd d(3);
        d << -1, -2, 5;
        const VectorFieldModel m = build_lti(d.asDiagonal());
        Eigen::MatrixXd U = Eigen::MatrixXd::Zero(3, 1);
        U(2, 0) = 1;
        Eigen::MatrixXd V = Eigen::MatrixXd::Zero(3, 2);
        V(0, 0) = 1;
        V(1, 1) = 1;
        const Certificate c = certify_nob(m, U, V, Norm::Inf, small_grid());
        CHECK(c.passed);
        for (const auto& lam : tu::eigenvalues(Eigen::MatrixXd(d.asDiagonal())))
            CHECK((std::abs(lam.real()) > 1e-9 || std::abs(lam) == 0.0));
    }

    SUBCASE("failed reducibility is a hard gate") {
        // dense random system has no invariant split
        const VectorFieldModel m = build_lti(tu::random_matrix(3, 3) +
                                             Eigen::MatrixXd::Constant(3, 3, 0.5));
        Eigen::MatrixXd U = Eigen::MatrixXd::Zero(3, 1);
        U(0, 0) = 1;
        Eigen::MatrixXd V = Eigen::MatrixXd::Zero(3, 2);
        V(1, 0) = 1;
        V(2, 1) = 1;
        CHECK_THROWS_AS(certify_nob(m, U, V, Norm::Inf, small_grid()), PrerequisiteError);
    }

    SUBCASE("U must be one-dimensional") {
        const VectorFieldModel m = build_model("lti-example6");
        const auto pair = model_known_pair("lti-example6");
        REQUIRE(pair.has_value());
        CHECK_THROWS_AS(certify_nob(m, pair->U, pair->V, Norm::Inf, small_grid()),
                        InvalidArgument);
    }
}

TEST_CASE("convergence certificate") {
    SUBCASE("diagonal 4-state example passes") {
        const VectorFieldModel m = build_model("lti-example6");
        const auto pair = model_known_pair("lti-example6");
        REQUIRE(pair.has_value());
        for (Norm p : {Norm::One, Norm::Two, Norm::Inf}) {
            const Certificate c = certify_convergence(m, pair->U, pair->V, p, small_grid());
            CHECK(c.passed);
            CHECK(c.kind == "convergence");
            CHECK(c.bound == doctest::Approx(-1.0).epsilon(1e-10));
        }
    }

    SUBCASE("two-agent system passes") {
        const VectorFieldModel m = build_model("two-agent-3d");
        const auto pair = model_known_pair("two-agent-3d");
        REQUIRE(pair.has_value());
        const Certificate c = certify_convergence(m, pair->U, pair->V, Norm::Inf, small_grid());
        CHECK(c.passed);
    }

    SUBCASE("reducibility failure yields no certificate") {
        const VectorFieldModel m = build_lti(tu::random_matrix(3, 3) +
                                             Eigen::MatrixXd::Constant(3, 3, 0.5));
        Eigen::MatrixXd U = Eigen::MatrixXd::Zero(3, 1);
        U(0, 0) = 1;
        Eigen::MatrixXd V = Eigen::MatrixXd::Zero(3, 2);
        V(1, 0) = 1;
        V(2, 1) = 1;
        CHECK_THROWS_AS(certify_convergence(m, U, V, Norm::Inf, small_grid()),
                        PrerequisiteError);
    }
}

TEST_CASE("not-2-contracting on the whole space despite subspace certificates") {
    const VectorFieldModel m = build_model("lti-example6");
    for (Norm p : {Norm::One, Norm::Two, Norm::Inf}) {
        const Certificate c = certify_k_contraction(m, 2, p, small_grid());
        CHECK_FALSE(c.passed);
        CHECK(c.bound >= 1.0 - 1e-10);
    }
}

TEST_CASE("more samples never lower the reported bound") {
    const VectorFieldModel m = build_model("duffing");
    SamplingGrid small = small_grid();
    SamplingGrid large = small_grid();
    large.random_samples = 800;
    const double b_small = certify_k_contraction(m, 1, Norm::Two, small).bound;
    const double b_large = certify_k_contraction(m, 1, Norm::Two, large).bound;
    CHECK(b_large >= b_small);
}

TEST_CASE("certificates are reproducible for a fixed seed") {
    const VectorFieldModel m = build_model("duffing");
    const Certificate a = certify_k_contraction(m, 1, Norm::Two, small_grid());
    const Certificate b = certify_k_contraction(m, 1, Norm::Two, small_grid());
    CHECK(a.bound == b.bound);
    CHECK(a.worst_t == b.worst_t);
    CHECK((a.worst_x - b.worst_x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("certificate JSON round trip") {
    const Certificate a =
        certify_k_contraction(build_model("three-agents"), 2, Norm::Inf, small_grid());
    const Certificate b = Certificate::from_json(a.to_json());
    CHECK(b.kind == a.kind);
    CHECK(b.bound == a.bound);
    CHECK(b.passed == a.passed);
    CHECK(b.norm == a.norm);
    CHECK(b.samples == a.samples);
    CHECK((b.worst_x - a.worst_x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("k is restricted to 1 or 2") {
    CHECK_THROWS_AS(certify_k_contraction(build_model("three-agents"), 3, Norm::Inf,
                                          small_grid()),
                    InvalidArgument);
}
