#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

#include "kcontract/errors.hpp"

namespace kcontract {

/// Axis-aligned box; the compact region over which certificates sample.
struct BoxDomain {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    BoxDomain() = default;
    BoxDomain(Eigen::VectorXd lo, Eigen::VectorXd hi);

    static BoxDomain cube(int n, double half_width);

    int dim() const { return static_cast<int>(lower.size()); }
    bool contains(const Eigen::VectorXd& x, double inflate = 0.0) const;
    Eigen::VectorXd center() const { return 0.5 * (lower + upper); }
};

/// A (possibly time-varying) vector field with Jacobian access.
/// Immutable after construction; eval/jacobian are reentrant.
struct VectorFieldModel {
    std::string id;
    int dim = 0;
    bool time_varying = false;
    double forcing_period = 0.0;  // 0 = no declared period
    BoxDomain domain;
    std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)> rhs;
    // Optional analytic Jacobian; jacobian() falls back to central differences.
    std::function<Eigen::MatrixXd(double, const Eigen::VectorXd&)> jac;

    Eigen::VectorXd eval(double t, const Eigen::VectorXd& x) const;
    Eigen::MatrixXd jacobian(double t, const Eigen::VectorXd& x) const;
};

/// A vector field with an exogenous input u, as the downstream half of a
/// serial connection.
struct InputModel {
    std::string id;
    int dim = 0;
    int input_dim = 0;
    bool time_varying = false;
    BoxDomain domain;
    BoxDomain input_box;  // sampling region for "any constant input" checks
    std::function<Eigen::VectorXd(double, const Eigen::VectorXd&, const Eigen::VectorXd&)> rhs;
    std::function<Eigen::MatrixXd(double, const Eigen::VectorXd&, const Eigen::VectorXd&)> jac_x;
    std::function<Eigen::MatrixXd(double, const Eigen::VectorXd&, const Eigen::VectorXd&)> jac_u;
};

/// Upstream system, output map, downstream system: u = h(x1).
struct SerialPair {
    VectorFieldModel upstream;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> output_map;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> output_jac;  // optional
    InputModel downstream;
};

/// Central-difference Jacobian with per-coordinate step h * (1 + |x_j|).
Eigen::MatrixXd fd_jacobian(const VectorFieldModel& model, double t, const Eigen::VectorXd& x,
                            double h = 1e-5);

/// Closed model of dimension n1 + n2 stacking the cascade; the Jacobian is
/// assembled block-wise and has a structurally zero upper-right block.
VectorFieldModel compose_serial(const SerialPair& pair);

/// Freeze the input of an InputModel at a constant value.
VectorFieldModel with_constant_input(const InputModel& model, const Eigen::VectorXd& u);

}  // namespace kcontract
