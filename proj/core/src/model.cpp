#include "kcontract/model.hpp"

#include <cmath>

namespace kcontract {

BoxDomain::BoxDomain(Eigen::VectorXd lo, Eigen::VectorXd hi)
    : lower(std::move(lo)), upper(std::move(hi)) {
    if (lower.size() != upper.size()) throw InvalidArgument("BoxDomain: bound length mismatch");
    if (!lower.allFinite() || !upper.allFinite())
        throw NonFiniteError("BoxDomain: bounds must be finite");
    for (int i = 0; i < lower.size(); ++i)
        if (lower(i) > upper(i)) throw InvalidArgument("BoxDomain: lower > upper");
}

BoxDomain BoxDomain::cube(int n, double half_width) {
    return BoxDomain(Eigen::VectorXd::Constant(n, -half_width),
                     Eigen::VectorXd::Constant(n, half_width));
}

bool BoxDomain::contains(const Eigen::VectorXd& x, double inflate) const {
    if (x.size() != lower.size()) return false;
    for (int i = 0; i < x.size(); ++i)
        if (x(i) < lower(i) - inflate || x(i) > upper(i) + inflate) return false;
    return true;
}

Eigen::VectorXd VectorFieldModel::eval(double t, const Eigen::VectorXd& x) const {
    if (x.size() != dim) throw InvalidArgument("model '" + id + "': state dimension mismatch");
    Eigen::VectorXd f = rhs(t, x);
    if (!f.allFinite()) throw NonFiniteError("model '" + id + "': non-finite vector field value");
    return f;
}

Eigen::MatrixXd VectorFieldModel::jacobian(double t, const Eigen::VectorXd& x) const {
    if (jac) {
        Eigen::MatrixXd J = jac(t, x);
        if (!J.allFinite()) throw NonFiniteError("model '" + id + "': non-finite Jacobian");
        return J;
    }
    return fd_jacobian(*this, t, x);
}

Eigen::MatrixXd fd_jacobian(const VectorFieldModel& model, double t, const Eigen::VectorXd& x,
                            double h) {
    if (h <= 0) throw InvalidArgument("fd_jacobian: step must be positive");
    const int n = model.dim;
    Eigen::MatrixXd J(n, n);
    Eigen::VectorXd xp = x, xm = x;
    for (int j = 0; j < n; ++j) {
        const double hj = h * (1.0 + std::abs(x(j)));
        xp(j) = x(j) + hj;
        xm(j) = x(j) - hj;
        J.col(j) = (model.eval(t, xp) - model.eval(t, xm)) / (2.0 * hj);
        xp(j) = x(j);
        xm(j) = x(j);
    }
    return J;
}

namespace {

Eigen::MatrixXd fd_output_jac(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& h,
                              const Eigen::VectorXd& x, int out_dim) {
    const int n = static_cast<int>(x.size());
    Eigen::MatrixXd D(out_dim, n);
    Eigen::VectorXd xp = x, xm = x;
    for (int j = 0; j < n; ++j) {
        const double hj = 1e-6 * (1.0 + std::abs(x(j)));
        xp(j) = x(j) + hj;
        xm(j) = x(j) - hj;
        D.col(j) = (h(xp) - h(xm)) / (2.0 * hj);
        xp(j) = x(j);
        xm(j) = x(j);
    }
    return D;
}

}  // namespace

VectorFieldModel compose_serial(const SerialPair& pair) {
    const int n1 = pair.upstream.dim;
    const int n2 = pair.downstream.dim;
    if (n1 < 1 || n2 < 1) throw InvalidArgument("compose_serial: empty subsystem");
    {
        const Eigen::VectorXd probe = pair.output_map(pair.upstream.domain.center());
        if (static_cast<int>(probe.size()) != pair.downstream.input_dim)
            throw InvalidArgument("compose_serial: output dimension " +
                                  std::to_string(probe.size()) + " != downstream input dimension " +
                                  std::to_string(pair.downstream.input_dim));
    }

    VectorFieldModel out;
    out.id = pair.upstream.id + ">>" + pair.downstream.id;
    out.dim = n1 + n2;
    out.time_varying = pair.upstream.time_varying || pair.downstream.time_varying;
    out.forcing_period = pair.upstream.forcing_period;
    Eigen::VectorXd lo(n1 + n2), hi(n1 + n2);
    lo << pair.upstream.domain.lower, pair.downstream.domain.lower;
    hi << pair.upstream.domain.upper, pair.downstream.domain.upper;
    out.domain = BoxDomain(lo, hi);

    const SerialPair p = pair;  // captured by value: the composed model owns its parts
    out.rhs = [p, n1, n2](double t, const Eigen::VectorXd& x) {
        Eigen::VectorXd f(n1 + n2);
        const Eigen::VectorXd x1 = x.head(n1), x2 = x.tail(n2);
        f.head(n1) = p.upstream.eval(t, x1);
        f.tail(n2) = p.downstream.rhs(t, x2, p.output_map(x1));
        return f;
    };
    // Assembled block-wise so the upper-right block is structurally zero even
    // when pieces fall back to finite differences.
    out.jac = [p, n1, n2](double t, const Eigen::VectorXd& x) {
            const Eigen::VectorXd x1 = x.head(n1), x2 = x.tail(n2);
            const Eigen::VectorXd u = p.output_map(x1);
            Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n1 + n2, n1 + n2);
            J.topLeftCorner(n1, n1) = p.upstream.jacobian(t, x1);
            Eigen::MatrixXd Ju = p.downstream.jac_u
                                     ? p.downstream.jac_u(t, x2, u)
                                     : Eigen::MatrixXd();  // resolved below
            if (Ju.size() == 0) {
                // finite-difference in u
                const int m = p.downstream.input_dim;
                Ju.resize(n2, m);
                Eigen::VectorXd up = u, um = u;
                for (int j = 0; j < m; ++j) {
                    const double hj = 1e-6 * (1.0 + std::abs(u(j)));
                    up(j) += hj;
                    um(j) -= hj;
                    Ju.col(j) = (p.downstream.rhs(t, x2, up) - p.downstream.rhs(t, x2, um)) /
                                (2.0 * hj);
                    up(j) = u(j);
                    um(j) = u(j);
                }
            }
            const Eigen::MatrixXd Dh = p.output_jac
                                           ? p.output_jac(x1)
                                           : fd_output_jac(p.output_map, x1,
                                                           p.downstream.input_dim);
            Eigen::MatrixXd Jx = p.downstream.jac_x ? p.downstream.jac_x(t, x2, u)
                                                    : Eigen::MatrixXd();
            if (Jx.size() == 0) {
                Jx.resize(n2, n2);
                Eigen::VectorXd xp = x2, xm = x2;
                for (int j = 0; j < n2; ++j) {
                    const double hj = 1e-6 * (1.0 + std::abs(x2(j)));
                    xp(j) += hj;
                    xm(j) -= hj;
                    Jx.col(j) =
                        (p.downstream.rhs(t, xp, u) - p.downstream.rhs(t, xm, u)) / (2.0 * hj);
                    xp(j) = x2(j);
                    xm(j) = x2(j);
                }
            }
            J.bottomLeftCorner(n2, n1) = Ju * Dh;
            J.bottomRightCorner(n2, n2) = Jx;
            return J;
    };
    return out;
}

VectorFieldModel with_constant_input(const InputModel& model, const Eigen::VectorXd& u) {
    if (static_cast<int>(u.size()) != model.input_dim)
        throw InvalidArgument("with_constant_input: input dimension mismatch");
    VectorFieldModel out;
    out.id = model.id + "|u=const";
    out.dim = model.dim;
    out.time_varying = model.time_varying;
    out.domain = model.domain;
    const InputModel m = model;
    out.rhs = [m, u](double t, const Eigen::VectorXd& x) { return m.rhs(t, x, u); };
    if (m.jac_x)
        out.jac = [m, u](double t, const Eigen::VectorXd& x) { return m.jac_x(t, x, u); };
    return out;
}

}  // namespace kcontract
