#include "kcontract/models.hpp"

#include <cmath>
#include <numbers>

#include "kcontract/errors.hpp"

namespace kcontract {

namespace {

constexpr double kPi = std::numbers::pi;

double get_param(const Params& params, const Params& defaults, const std::string& key) {
    if (auto it = params.find(key); it != params.end()) return it->second;
    return defaults.at(key);
}

void reject_unknown(const Params& params, const Params& defaults, const std::string& model) {
    for (const auto& [key, _] : params)
        if (!defaults.count(key))
            throw InvalidArgument("model '" + model + "': unknown parameter '" + key + "'");
}

double sech2(double y) {
    const double c = std::cosh(y);
    return 1.0 / (c * c);
}

VectorFieldModel make_sin_clock() {
    VectorFieldModel m;
    m.id = "sin-clock";
    m.dim = 2;
    m.time_varying = true;
    m.forcing_period = 2 * kPi;
    m.domain = BoxDomain::cube(2, 10.0);
    m.rhs = [](double t, const Eigen::VectorXd& x) {
        Eigen::VectorXd f(2);
        f << std::sin(t), -x(1);
        return f;
    };
    m.jac = [](double, const Eigen::VectorXd&) {
        Eigen::MatrixXd J(2, 2);
        J << 0, 0, 0, -1;
        return J;
    };
    return m;
}

VectorFieldModel make_duffing(double alpha, double beta, double gamma, double delta,
                              double omega) {
    if (delta <= 0) throw InvalidArgument("duffing: delta must be positive");
    if (alpha < 0 || beta < 0 || gamma < 0 || omega < 0)
        throw InvalidArgument("duffing: alpha, beta, gamma, omega must be nonnegative");
    VectorFieldModel m;
    m.id = "duffing";
    m.dim = 2;
    m.time_varying = gamma > 0;
    m.forcing_period = (gamma > 0 && omega > 0) ? 2 * kPi / omega : 0.0;
    m.domain = BoxDomain::cube(2, 10.0);
    m.rhs = [=](double t, const Eigen::VectorXd& x) {
        Eigen::VectorXd f(2);
        f << x(1),
            -beta * x(0) * x(0) * x(0) + alpha * x(0) - delta * x(1) +
                gamma * std::cos(omega * t);
        return f;
    };
    m.jac = [=](double, const Eigen::VectorXd& x) {
        Eigen::MatrixXd J(2, 2);
        J << 0, 1, -3 * beta * x(0) * x(0) + alpha, -delta;
        return J;
    };
    return m;
}

VectorFieldModel make_two_agent_3d(double s) {
    // x1' = f(x1, x2) = -x1 + s sin(x2)
    // x2' = x3 - x1
    // x3' = g(x3, x2) = -x3 - s sin(x2)
    // d1 f = d3 g = -1 identically, so the coupling condition holds with
    // delta = 1 everywhere, not just on a region.
    VectorFieldModel m;
    m.id = "two-agent-3d";
    m.dim = 3;
    m.domain = BoxDomain::cube(3, 10.0);
    m.rhs = [s](double, const Eigen::VectorXd& x) {
        Eigen::VectorXd f(3);
        f << -x(0) + s * std::sin(x(1)), x(2) - x(0), -x(2) - s * std::sin(x(1));
        return f;
    };
    m.jac = [s](double, const Eigen::VectorXd& x) {
        Eigen::MatrixXd J(3, 3);
        J << -1, s * std::cos(x(1)), 0,
             -1, 0, 1,
              0, -s * std::cos(x(1)), -1;
        return J;
    };
    return m;
}

VectorFieldModel make_three_agents(double a, double b) {
    if (a <= 0) throw InvalidArgument("three-agents: a must be positive");
    if (b < 0) throw InvalidArgument("three-agents: b must be nonnegative");
    // coupling F(p) = -a p - b tanh(p), applied to all pairwise differences
    const auto F = [a, b](double p) { return -a * p - b * std::tanh(p); };
    const auto dF = [a, b](double p) { return -a - b * sech2(p); };
    VectorFieldModel m;
    m.id = "three-agents";
    m.dim = 3;
    m.domain = BoxDomain::cube(3, 10.0);
    m.rhs = [F](double, const Eigen::VectorXd& x) {
        Eigen::VectorXd f(3);
        f << F(x(0) - x(1)) + F(x(0) - x(2)),
             F(x(1) - x(0)) + F(x(1) - x(2)),
             F(x(2) - x(1)) + F(x(2) - x(0));
        return f;
    };
    m.jac = [dF](double, const Eigen::VectorXd& x) {
        const double f12 = dF(x(0) - x(1)), f13 = dF(x(0) - x(2));
        const double g21 = dF(x(1) - x(0)), g23 = dF(x(1) - x(2));
        const double h31 = dF(x(2) - x(0)), h32 = dF(x(2) - x(1));
        Eigen::MatrixXd J(3, 3);
        J << f12 + f13, -f12, -f13,
             -g21, g21 + g23, -g23,
             -h31, -h32, h32 + h31;
        return J;
    };
    return m;
}

}  // namespace

Eigen::MatrixXd cycle_laplacian(int n) {
    if (n < 2) throw InvalidArgument("cycle_laplacian: need n >= 2");
    Eigen::MatrixXd L = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i) L(i, (i + 1) % n) -= 1.0;
    return L;
}

Eigen::MatrixXd laplacian_from_edge_list(const Eigen::MatrixXd& edges, int n) {
    if (edges.cols() != 3)
        throw InvalidArgument("laplacian_from_edge_list: rows must be (from, to, weight)");
    int nodes = n;
    for (Eigen::Index r = 0; r < edges.rows(); ++r)
        nodes = std::max({nodes, static_cast<int>(edges(r, 0)), static_cast<int>(edges(r, 1))});
    if (nodes < 2) throw InvalidArgument("laplacian_from_edge_list: need at least two nodes");
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(nodes, nodes);
    for (Eigen::Index r = 0; r < edges.rows(); ++r) {
        const int i = static_cast<int>(edges(r, 0)) - 1;
        const int j = static_cast<int>(edges(r, 1)) - 1;
        const double w = edges(r, 2);
        if (i < 0 || j < 0 || i >= nodes || j >= nodes || i == j)
            throw InvalidArgument("laplacian_from_edge_list: bad edge at row " + std::to_string(r));
        if (w < 0) throw InvalidArgument("laplacian_from_edge_list: negative weight");
        L(i, i) += w;
        L(i, j) -= w;
    }
    return L;
}

VectorFieldModel build_laplacian_consensus(const Eigen::MatrixXd& L, bool tanh_flavor) {
    const int n = static_cast<int>(L.rows());
    if (L.cols() != n) throw InvalidArgument("laplacian-consensus: L must be square");
    VectorFieldModel m;
    m.id = "laplacian-consensus";
    m.dim = n;
    m.domain = BoxDomain::cube(n, 10.0);
    m.rhs = [L, tanh_flavor](double, const Eigen::VectorXd& x) {
        const Eigen::VectorXd y = L * x;
        if (!tanh_flavor) return (-y).eval();
        return (-y.array().tanh()).matrix().eval();
    };
    m.jac = [L, tanh_flavor](double, const Eigen::VectorXd& x) {
        if (!tanh_flavor) return (-L).eval();
        const Eigen::VectorXd y = L * x;
        Eigen::VectorXd d(y.size());
        for (Eigen::Index i = 0; i < y.size(); ++i) d(i) = -sech2(y(i));
        return (d.asDiagonal() * L).eval();
    };
    return m;
}

FeedbackSystem second_order_consensus_system(const Eigen::MatrixXd& L, double alpha, double beta,
                                             bool tanh_flavor) {
    if (alpha <= 0 || beta <= 0)
        throw InvalidArgument("second-order-consensus: alpha and beta must be positive");
    const int n = static_cast<int>(L.rows());
    if (L.cols() != n) throw InvalidArgument("second-order-consensus: L must be square");

    FeedbackSystem sys;
    sys.id = "second-order-consensus";
    sys.n = n;
    sys.m = n;
    sys.k = n;
    sys.M = beta * L;
    sys.x_domain = BoxDomain::cube(n, 10.0);
    sys.z_domain = BoxDomain::cube(n, 10.0);
    sys.g = [](const Eigen::VectorXd& z) { return z; };
    sys.g_jac = [n](const Eigen::VectorXd&) { return Eigen::MatrixXd::Identity(n, n).eval(); };
    const Eigen::MatrixXd aL = alpha * L;
    sys.h = [aL, tanh_flavor](const Eigen::VectorXd& w, const Eigen::VectorXd& z) {
        const Eigen::VectorXd y = w + aL * z;
        if (!tanh_flavor) return (-y).eval();
        return (-y.array().tanh()).matrix().eval();
    };
    sys.h_jac_w = [aL, n, tanh_flavor](const Eigen::VectorXd& w, const Eigen::VectorXd& z) {
        if (!tanh_flavor) return (-Eigen::MatrixXd::Identity(n, n)).eval();
        const Eigen::VectorXd y = w + aL * z;
        Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) D(i, i) = -sech2(y(i));
        return D.eval();
    };
    sys.h_jac_z = [aL, n, tanh_flavor](const Eigen::VectorXd& w, const Eigen::VectorXd& z) {
        if (!tanh_flavor) return (-aL).eval();
        const Eigen::VectorXd y = w + aL * z;
        Eigen::VectorXd d(n);
        for (int i = 0; i < n; ++i) d(i) = -sech2(y(i));
        return (d.asDiagonal() * aL).eval();
    };
    return sys;
}

VectorFieldModel build_lti(const Eigen::MatrixXd& A, const std::string& id) {
    const int n = static_cast<int>(A.rows());
    if (A.cols() != n) throw InvalidArgument("lti: A must be square");
    if (!A.allFinite()) throw NonFiniteError("lti: A has non-finite entries");
    VectorFieldModel m;
    m.id = id;
    m.dim = n;
    m.domain = BoxDomain::cube(n, 10.0);
    m.rhs = [A](double, const Eigen::VectorXd& x) { return (A * x).eval(); };
    m.jac = [A](double, const Eigen::VectorXd&) { return A; };
    return m;
}

const std::vector<ModelCatalogEntry>& model_catalog() {
    static const std::vector<ModelCatalogEntry> entries = {
        {"sin-clock",
         "planar system with a sinusoidally driven first coordinate and a decaying second; "
         "2-contracting yet carries a non-trivial periodic solution",
         {}},
        {"duffing",
         "forced Duffing oscillator x'' + delta x' + beta x^3 - alpha x = gamma cos(omega t)",
         {{"alpha", 0.0}, {"beta", 0.1}, {"gamma", 5.0}, {"delta", 0.1}, {"omega", 1.0}}},
        {"laplacian-consensus",
         "x' = f(L x) consensus protocol on a weighted digraph; f linear (tanh=0) or "
         "bounded-derivative tanh (tanh=1); default graph is a directed cycle",
         {{"n", 4}, {"tanh", 0}}},
        {"second-order-consensus",
         "positions/velocities x' = v, v' = f(beta L x + alpha L v); feedback form with M U = 0",
         {{"n", 4}, {"alpha", 1.0}, {"beta", 1.0}, {"tanh", 0}}},
        {"two-agent-3d",
         "two agents coupled through an integrator of their difference: x1' = -x1 + s sin(x2), "
         "x2' = x3 - x1, x3' = -x3 - s sin(x2)",
         {{"s", 1.0}}},
        {"three-agents",
         "three synchronizing agents with pairwise coupling F(p) = -a p - b tanh(p)",
         {{"a", 1.0}, {"b", 0.0}}},
        {"lti-example6", "linear system x' = A x with A = diag(2, -3, -1, -1)", {}},
    };
    return entries;
}

VectorFieldModel build_model(const std::string& name, const Params& params) {
    const auto* entry = [&]() -> const ModelCatalogEntry* {
        for (const auto& e : model_catalog())
            if (e.name == name) return &e;
        return nullptr;
    }();
    if (!entry) throw InvalidArgument("unknown model '" + name + "'");
    reject_unknown(params, entry->defaults, name);
    const auto get = [&](const std::string& key) { return get_param(params, entry->defaults, key); };

    if (name == "sin-clock") return make_sin_clock();
    if (name == "duffing")
        return make_duffing(get("alpha"), get("beta"), get("gamma"), get("delta"), get("omega"));
    if (name == "laplacian-consensus") {
        const int n = static_cast<int>(get("n"));
        return build_laplacian_consensus(cycle_laplacian(n), get("tanh") != 0);
    }
    if (name == "second-order-consensus") {
        const int n = static_cast<int>(get("n"));
        const FeedbackSystem sys = second_order_consensus_system(cycle_laplacian(n), get("alpha"),
                                                                 get("beta"), get("tanh") != 0);
        VectorFieldModel m = assemble_feedback(sys);
        m.id = "second-order-consensus";
        return m;
    }
    if (name == "two-agent-3d") return make_two_agent_3d(get("s"));
    if (name == "three-agents") return make_three_agents(get("a"), get("b"));
    if (name == "lti-example6") {
        Eigen::VectorXd d(4);
        d << 2, -3, -1, -1;
        return build_lti(Eigen::MatrixXd(d.asDiagonal()), "lti-example6");
    }
    throw InvalidArgument("unknown model '" + name + "'");
}

std::optional<SubspacePair> model_known_pair(const std::string& name, const Params& params) {
    const auto consensus_pair = [](int n) {
        Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
        SubspacePair raw = pair_from_first_integral(ones);  // V = 1/sqrt(n) 1
        return SubspacePair{raw.V, raw.U};  // the consensus direction plays U here
    };
    if (name == "laplacian-consensus") {
        int n = 4;
        if (auto it = params.find("n"); it != params.end()) n = static_cast<int>(it->second);
        return consensus_pair(n);
    }
    if (name == "three-agents") return consensus_pair(3);
    if (name == "two-agent-3d") {
        Eigen::MatrixXd U(3, 1), V(3, 2);
        const double r2 = std::sqrt(2.0);
        U << 1 / r2, 0, 1 / r2;
        V << 0, 1 / r2,
             1, 0,
             0, -1 / r2;
        return SubspacePair{U, V};
    }
    if (name == "second-order-consensus") {
        int n = 4;
        if (auto it = params.find("n"); it != params.end()) n = static_cast<int>(it->second);
        const SubspacePair xp = consensus_pair(n);
        Eigen::MatrixXd U = Eigen::MatrixXd::Zero(2 * n, 1);
        U.topRows(n) = xp.U;
        Eigen::MatrixXd V = Eigen::MatrixXd::Zero(2 * n, 2 * n - 1);
        V.topLeftCorner(n, n - 1) = xp.V;
        V.bottomRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
        return SubspacePair{U, V};
    }
    if (name == "lti-example6") {
        Eigen::MatrixXd U = Eigen::MatrixXd::Zero(4, 2), V = Eigen::MatrixXd::Zero(4, 2);
        U(2, 0) = 1;
        U(3, 1) = 1;
        V(0, 0) = 1;
        V(1, 1) = 1;
        return SubspacePair{U, V};
    }
    return std::nullopt;
}

}  // namespace kcontract
