#include "kcontract/decompose.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>

#include "kcontract/errors.hpp"

namespace kcontract {

namespace {

// Bounding box of the image of `box` under the linear map T.
BoxDomain box_image(const Eigen::MatrixXd& T, const BoxDomain& box) {
    const int r = static_cast<int>(T.rows());
    Eigen::VectorXd lo(r), hi(r);
    for (int i = 0; i < r; ++i) {
        double l = 0, u = 0;
        for (int j = 0; j < T.cols(); ++j) {
            const double a = T(i, j) * box.lower(j), b = T(i, j) * box.upper(j);
            l += std::min(a, b);
            u += std::max(a, b);
        }
        lo(i) = l;
        hi(i) = u;
    }
    return BoxDomain(lo, hi);
}

// Orthonormal basis of the complement of the (orthonormal) columns of B.
Eigen::MatrixXd orthonormal_complement(const Eigen::MatrixXd& B) {
    const int n = static_cast<int>(B.rows());
    const int k = static_cast<int>(B.cols());
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(B);
    const Eigen::MatrixXd Q = qr.householderQ();
    return Q.rightCols(n - k);
}

void fix_column_signs(Eigen::MatrixXd& B) {
    for (int j = 0; j < B.cols(); ++j) {
        int imax = 0;
        B.col(j).cwiseAbs().maxCoeff(&imax);
        if (B(imax, j) < 0) B.col(j) = -B.col(j);
    }
}

}  // namespace

PairResiduals validate_pair(const SubspacePair& pair) {
    const int n = pair.n();
    if (pair.V.rows() != n) throw InvalidArgument("validate_pair: U and V row counts differ");
    if (pair.p_dim() + pair.q_dim() != n)
        throw InvalidArgument("validate_pair: p_dim + q_dim != n");
    PairResiduals r;
    r.utu = (pair.U.transpose() * pair.U -
             Eigen::MatrixXd::Identity(pair.p_dim(), pair.p_dim()))
                .norm();
    r.vtv = (pair.V.transpose() * pair.V -
             Eigen::MatrixXd::Identity(pair.q_dim(), pair.q_dim()))
                .norm();
    r.utv = (pair.U.transpose() * pair.V).norm();
    r.completeness =
        (pair.U * pair.U.transpose() + pair.V * pair.V.transpose() -
         Eigen::MatrixXd::Identity(n, n))
            .norm();
    r.passed = r.max() <= kPairTol;
    return r;
}

Certificate check_reducibility(const VectorFieldModel& model, const SubspacePair& pair,
                               const SamplingGrid& grid) {
    if (pair.n() != model.dim)
        throw InvalidArgument("check_reducibility: pair dimension != model dimension");
    const PairResiduals pr = validate_pair(pair);
    if (!pr.passed)
        throw InvalidArgument("check_reducibility: subspace pair invalid (residual " +
                              std::to_string(pr.max()) + ")");

    const auto states = enumerate_samples(model.domain, grid);
    const auto times = enumerate_times(model, grid);
    const Eigen::MatrixXd Vt = pair.V.transpose();
    const Eigen::MatrixXd VVt = pair.V * Vt;

    Certificate cert;
    cert.kind = "reducibility";
    cert.model_id = model.id;
    cert.eta_min = kReducibilityTol;
    cert.bound = 0.0;
    double cond_a = 0.0;
    for (const auto& x : states) {
        for (double t : times) {
            const double rb =
                (Vt * model.jacobian(t, x) * pair.U).cwiseAbs().maxCoeff();
            const double ra =
                (Vt * model.eval(t, x) - Vt * model.eval(t, VVt * x)).cwiseAbs().maxCoeff();
            ++cert.samples;
            if (rb > cert.bound) {
                cert.bound = rb;
                cert.worst_t = t;
                cert.worst_x = x;
            }
            cond_a = std::max(cond_a, ra);
        }
    }
    if (cert.worst_x.size() == 0) {
        cert.worst_t = times.front();
        cert.worst_x = states.front();
    }
    cert.extra["condition_a_residual"] = cond_a;
    cert.extra["pair_residual"] = pr.max();
    cert.passed = cert.bound <= kReducibilityTol;
    return cert;
}

SerialPair serial_reduce(const VectorFieldModel& model, const SubspacePair& pair,
                         const SamplingGrid& grid) {
    const Certificate gate = check_reducibility(model, pair, grid);
    if (!gate.passed)
        throw PrerequisiteError("serial_reduce: reducibility gate failed (residual " +
                                std::to_string(gate.bound) + ")");

    const Eigen::MatrixXd U = pair.U, V = pair.V;
    const VectorFieldModel m = model;

    SerialPair out;
    out.upstream.id = model.id + "/y1";
    out.upstream.dim = pair.q_dim();
    out.upstream.time_varying = model.time_varying;
    out.upstream.forcing_period = model.forcing_period;
    out.upstream.domain = box_image(V.transpose(), model.domain);
    out.upstream.rhs = [m, V](double t, const Eigen::VectorXd& y1) {
        return (V.transpose() * m.eval(t, V * y1)).eval();
    };
    out.upstream.jac = [m, V](double t, const Eigen::VectorXd& y1) {
        return (V.transpose() * m.jacobian(t, V * y1) * V).eval();
    };

    out.output_map = [V](const Eigen::VectorXd& y1) { return (V * y1).eval(); };
    out.output_jac = [V](const Eigen::VectorXd&) { return V; };

    out.downstream.id = model.id + "/y2";
    out.downstream.dim = pair.p_dim();
    out.downstream.input_dim = model.dim;
    out.downstream.time_varying = model.time_varying;
    out.downstream.domain = box_image(U.transpose(), model.domain);
    out.downstream.input_box = model.domain;
    out.downstream.rhs = [m, U](double t, const Eigen::VectorXd& y2, const Eigen::VectorXd& u) {
        return (U.transpose() * m.eval(t, U * y2 + u)).eval();
    };
    out.downstream.jac_x = [m, U](double t, const Eigen::VectorXd& y2, const Eigen::VectorXd& u) {
        return (U.transpose() * m.jacobian(t, U * y2 + u) * U).eval();
    };
    out.downstream.jac_u = [m, U](double t, const Eigen::VectorXd& y2, const Eigen::VectorXd& u) {
        return (U.transpose() * m.jacobian(t, U * y2 + u)).eval();
    };
    return out;
}

SubspacePair pair_from_first_integral(const Eigen::VectorXd& c) {
    const double nrm = c.norm();
    if (!(nrm > 0) || !c.allFinite())
        throw InvalidArgument("pair_from_first_integral: c must be a nonzero finite vector");
    Eigen::MatrixXd V = c / nrm;
    fix_column_signs(V);
    Eigen::MatrixXd U = orthonormal_complement(V);
    fix_column_signs(U);
    return SubspacePair{U, V};
}

SubspacePair lti_invariant_pair(const Eigen::MatrixXd& A) {
    const int n = static_cast<int>(A.rows());
    if (A.cols() != n) throw InvalidArgument("lti_invariant_pair: A must be square");
    if (n < 3) throw InvalidArgument("lti_invariant_pair: need n >= 3");
    if (!A.allFinite()) throw NonFiniteError("lti_invariant_pair: non-finite entries");

    Eigen::EigenSolver<Eigen::MatrixXd> es(A);
    if (es.info() != Eigen::Success)
        throw PrerequisiteError("lti_invariant_pair: eigensolver failed");

    const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    const double imag_tol = 1e-9 * scale;

    // the eigenvalue with the largest real part decides the subspace
    int best = 0;
    for (int i = 1; i < n; ++i) {
        const auto li = es.eigenvalues()(i), lb = es.eigenvalues()(best);
        if (li.real() > lb.real() + 1e-12 * scale ||
            (std::abs(li.real() - lb.real()) <= 1e-12 * scale &&
             std::abs(li.imag()) < std::abs(lb.imag())))
            best = i;
    }
    const Eigen::VectorXcd u = es.eigenvectors().col(best);

    Eigen::MatrixXd U;
    if (std::abs(es.eigenvalues()(best).imag()) <= imag_tol) {
        Eigen::VectorXd ur = u.real();
        if (ur.norm() < 1e-12) ur = u.imag();  // eigenvector phase may be imaginary
        U = ur / ur.norm();
    } else {
        Eigen::MatrixXd B(n, 2);
        B.col(0) = u.real();
        B.col(1) = u.imag();
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(B);
        const Eigen::MatrixXd Q = qr.householderQ();
        U = Q.leftCols(2);
    }
    fix_column_signs(U);

    const double invariance =
        ((Eigen::MatrixXd::Identity(n, n) - U * U.transpose()) * A * U).norm();
    if (invariance > 1e-8)
        throw PrerequisiteError(
            "lti_invariant_pair: computed subspace is not invariant (residual " +
            std::to_string(invariance) + "); eigenproblem too ill-conditioned");

    Eigen::MatrixXd V = orthonormal_complement(U);
    fix_column_signs(V);
    return SubspacePair{U, V};
}

VectorFieldModel assemble_feedback(const FeedbackSystem& sys) {
    if (sys.M.rows() != sys.k || sys.M.cols() != sys.n)
        throw InvalidArgument("assemble_feedback: M must be k x n");
    VectorFieldModel out;
    out.id = sys.id;
    out.dim = sys.n + sys.m;
    Eigen::VectorXd lo(out.dim), hi(out.dim);
    lo << sys.x_domain.lower, sys.z_domain.lower;
    hi << sys.x_domain.upper, sys.z_domain.upper;
    out.domain = BoxDomain(lo, hi);
    const FeedbackSystem s = sys;
    out.rhs = [s](double, const Eigen::VectorXd& xz) {
        Eigen::VectorXd f(s.n + s.m);
        const Eigen::VectorXd x = xz.head(s.n), z = xz.tail(s.m);
        f.head(s.n) = s.g(z);
        f.tail(s.m) = s.h(s.M * x, z);
        return f;
    };
    if (s.g_jac && s.h_jac_w && s.h_jac_z) {
        out.jac = [s](double, const Eigen::VectorXd& xz) {
            const Eigen::VectorXd x = xz.head(s.n), z = xz.tail(s.m);
            const Eigen::VectorXd w = s.M * x;
            Eigen::MatrixXd J = Eigen::MatrixXd::Zero(s.n + s.m, s.n + s.m);
            J.topRightCorner(s.n, s.m) = s.g_jac(z);
            J.bottomLeftCorner(s.m, s.n) = s.h_jac_w(w, z) * s.M;
            J.bottomRightCorner(s.m, s.m) = s.h_jac_z(w, z);
            return J;
        };
    }
    return out;
}

SerialPair feedback_form_reduce(const FeedbackSystem& sys, const SubspacePair& xpair) {
    if (xpair.n() != sys.n)
        throw InvalidArgument("feedback_form_reduce: pair dimension != dim(x)");
    const PairResiduals pr = validate_pair(xpair);
    if (!pr.passed) throw InvalidArgument("feedback_form_reduce: subspace pair invalid");
    const double mu = (sys.M * xpair.U).cwiseAbs().maxCoeff();
    if (mu > 1e-10)
        throw InvalidArgument("feedback_form_reduce: M U != 0 (residual " + std::to_string(mu) +
                              ")");

    const FeedbackSystem s = sys;
    const Eigen::MatrixXd U = xpair.U, V = xpair.V;
    const int q = xpair.q_dim(), m = sys.m, p = xpair.p_dim();

    SerialPair out;
    out.upstream.id = sys.id + "/y1y2";
    out.upstream.dim = q + m;
    out.upstream.domain = [&] {
        const BoxDomain xb = box_image(V.transpose(), sys.x_domain);
        Eigen::VectorXd lo(q + m), hi(q + m);
        lo << xb.lower, sys.z_domain.lower;
        hi << xb.upper, sys.z_domain.upper;
        return BoxDomain(lo, hi);
    }();
    out.upstream.rhs = [s, V, q, m](double, const Eigen::VectorXd& y) {
        const Eigen::VectorXd y1 = y.head(q), y2 = y.tail(m);
        Eigen::VectorXd f(q + m);
        f.head(q) = V.transpose() * s.g(y2);
        f.tail(m) = s.h(s.M * V * y1, y2);
        return f;
    };
    if (s.g_jac && s.h_jac_w && s.h_jac_z) {
        out.upstream.jac = [s, V, q, m](double, const Eigen::VectorXd& y) {
            const Eigen::VectorXd y1 = y.head(q), y2 = y.tail(m);
            const Eigen::VectorXd w = s.M * V * y1;
            Eigen::MatrixXd J = Eigen::MatrixXd::Zero(q + m, q + m);
            J.topRightCorner(q, m) = V.transpose() * s.g_jac(y2);
            J.bottomLeftCorner(m, q) = s.h_jac_w(w, y2) * s.M * V;
            J.bottomRightCorner(m, m) = s.h_jac_z(w, y2);
            return J;
        };
    }

    out.output_map = [s, q](const Eigen::VectorXd& y) { return s.g(y.tail(s.m)).eval(); };
    if (s.g_jac) {
        out.output_jac = [s, q](const Eigen::VectorXd& y) {
            Eigen::MatrixXd D = Eigen::MatrixXd::Zero(s.n, q + s.m);
            D.rightCols(s.m) = s.g_jac(y.tail(s.m));
            return D;
        };
    }

    out.downstream.id = sys.id + "/y3";
    out.downstream.dim = p;
    out.downstream.input_dim = sys.n;
    out.downstream.domain = box_image(U.transpose(), sys.x_domain);
    out.downstream.input_box = sys.x_domain;
    out.downstream.rhs = [U](double, const Eigen::VectorXd&, const Eigen::VectorXd& u) {
        return (U.transpose() * u).eval();
    };
    out.downstream.jac_x = [p](double, const Eigen::VectorXd&, const Eigen::VectorXd&) {
        return Eigen::MatrixXd::Zero(p, p).eval();
    };
    out.downstream.jac_u = [U](double, const Eigen::VectorXd&, const Eigen::VectorXd&) {
        return U.transpose().eval();
    };
    return out;
}

}  // namespace kcontract
