#include "kcontract/certify.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <random>

#include "kcontract/compound.hpp"
#include "kcontract/decompose.hpp"
#include "kcontract/errors.hpp"

namespace kcontract {

using nlohmann::json;

namespace {

double uniform01(std::mt19937_64& rng) {
    // fixed bit-level construction so sample sequences are portable
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int capped_points_per_axis(int requested, int dim, long long cap) {
    int ppa = std::max(requested, 2);
    auto total = [dim](int p) {
        long long t = 1;
        for (int i = 0; i < dim; ++i) {
            t *= p;
            if (t > 100'000'000) return t;
        }
        return t;
    };
    while (ppa > 2 && total(ppa) > cap) --ppa;
    return ppa;
}

void require_orthonormal(const Eigen::MatrixXd& B, const char* what) {
    const int q = static_cast<int>(B.cols());
    const double resid =
        (B.transpose() * B - Eigen::MatrixXd::Identity(q, q)).cwiseAbs().maxCoeff();
    if (resid > 1e-10)
        throw InvalidArgument(std::string(what) + ": columns not orthonormal (residual " +
                              std::to_string(resid) + ")");
}

}  // namespace

std::vector<Eigen::VectorXd> enumerate_samples(const BoxDomain& box, const SamplingGrid& grid) {
    const int n = box.dim();
    if (n < 1) throw InvalidArgument("enumerate_samples: empty domain");
    std::vector<Eigen::VectorXd> out;

    const int ppa = capped_points_per_axis(grid.points_per_axis, n, grid.max_grid_points);
    long long total = 1;
    for (int i = 0; i < n; ++i) total *= ppa;
    out.reserve(static_cast<std::size_t>(total + grid.random_samples));

    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    Eigen::VectorXd x(n);
    for (long long c = 0; c < total; ++c) {
        for (int i = 0; i < n; ++i)
            x(i) = box.lower(i) + (box.upper(i) - box.lower(i)) * idx[static_cast<std::size_t>(i)] /
                                      (ppa - 1);
        out.push_back(x);
        for (int i = n - 1; i >= 0; --i) {
            if (++idx[static_cast<std::size_t>(i)] < ppa) break;
            idx[static_cast<std::size_t>(i)] = 0;
        }
    }

    std::mt19937_64 rng(grid.seed);
    for (long long r = 0; r < grid.random_samples; ++r) {
        for (int i = 0; i < n; ++i)
            x(i) = box.lower(i) + (box.upper(i) - box.lower(i)) * uniform01(rng);
        out.push_back(x);
    }
    if (out.empty()) throw InvalidArgument("enumerate_samples: empty sample set");
    return out;
}

std::vector<double> enumerate_times(const VectorFieldModel& model, const SamplingGrid& grid) {
    if (!model.time_varying) return {0.0};
    double T = grid.t_horizon;
    if (T < 0) T = model.forcing_period > 0 ? model.forcing_period : 10.0;
    const int m = std::max(grid.time_samples, 2);
    std::vector<double> ts(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) ts[static_cast<std::size_t>(i)] = T * i / (m - 1);
    return ts;
}

json Certificate::to_json() const {
    json wx = json::array();
    for (Eigen::Index i = 0; i < worst_x.size(); ++i) wx.push_back(worst_x(i));
    json j{{"kind", kind},
           {"bound", bound},
           {"margin_eta", margin_eta},
           {"worst_point", json{{"t", worst_t}, {"x", wx}}},
           {"samples", samples},
           {"norm", norm_name(norm)},
           {"passed", passed},
           {"eta_min", eta_min},
           {"model", model_id},
           {"toolkit_version", kVersion},
           {"sampled_not_formal", true}};
    if (!extra.empty()) j["extra"] = extra;
    return j;
}

Certificate Certificate::from_json(const json& j) {
    Certificate c;
    c.kind = j.at("kind").get<std::string>();
    c.bound = j.at("bound").get<double>();
    c.margin_eta = j.at("margin_eta").get<double>();
    c.worst_t = j.at("worst_point").at("t").get<double>();
    const auto& wx = j.at("worst_point").at("x");
    c.worst_x.resize(static_cast<Eigen::Index>(wx.size()));
    for (std::size_t i = 0; i < wx.size(); ++i)
        c.worst_x(static_cast<Eigen::Index>(i)) = wx[i].get<double>();
    c.samples = j.at("samples").get<long long>();
    c.norm = norm_from_name(j.at("norm").get<std::string>());
    c.passed = j.at("passed").get<bool>();
    c.eta_min = j.at("eta_min").get<double>();
    c.model_id = j.at("model").get<std::string>();
    if (j.contains("extra")) c.extra = j.at("extra").get<std::map<std::string, double>>();
    return c;
}

namespace {

/// Shared max-reduction over the (time x state) sample set.
Certificate sup_over_samples(
    const VectorFieldModel& model, const std::string& kind, Norm p, const SamplingGrid& grid,
    double eta_min,
    const std::function<double(double, const Eigen::VectorXd&)>& quantity) {
    const auto states = enumerate_samples(model.domain, grid);
    const auto times = enumerate_times(model, grid);

    Certificate cert;
    cert.kind = kind;
    cert.norm = p;
    cert.eta_min = eta_min;
    cert.model_id = model.id;
    cert.bound = -std::numeric_limits<double>::infinity();
    for (const auto& x : states) {
        for (double t : times) {
            const double v = quantity(t, x);
            ++cert.samples;
            if (v > cert.bound) {
                cert.bound = v;
                cert.worst_t = t;
                cert.worst_x = x;
            }
        }
    }
    cert.margin_eta = std::max(-cert.bound, 0.0);
    cert.passed = cert.bound <= -eta_min;
    return cert;
}

}  // namespace

Certificate certify_k_contraction(const VectorFieldModel& model, int k, Norm p,
                                  const SamplingGrid& grid, double eta_min) {
    if (k != 1 && k != 2) throw InvalidArgument("certify_k_contraction: k must be 1 or 2");
    if (model.dim < k) throw InvalidArgument("certify_k_contraction: model dimension < k");
    if (eta_min <= 0) throw InvalidArgument("certify_k_contraction: eta_min must be positive");
    return sup_over_samples(model, "k_contraction", p, grid, eta_min,
                            [&](double t, const Eigen::VectorXd& x) {
                                const Eigen::MatrixXd J = model.jacobian(t, x);
                                return k == 1 ? measure(J, p) : measure_of_second_compound(J, p);
                            });
}

Certificate certify_subspace_2contraction(const VectorFieldModel& model, const Eigen::MatrixXd& V,
                                          Norm p, const SamplingGrid& grid, double eta_min) {
    if (V.rows() != model.dim)
        throw InvalidArgument("certify_subspace_2contraction: V row count != model dimension");
    if (V.cols() < 2)
        throw InvalidArgument(
            "certify_subspace_2contraction: V must span at least two dimensions");
    require_orthonormal(V, "certify_subspace_2contraction");
    const Eigen::MatrixXd Vt2 = mult_compound(V.transpose(), 2);
    const Eigen::MatrixXd V2 = mult_compound(V, 2);
    return sup_over_samples(model, "subspace_2contraction", p, grid, eta_min,
                            [&](double t, const Eigen::VectorXd& x) {
                                const Eigen::MatrixXd J = model.jacobian(t, x);
                                return measure(Vt2 * add_compound(J, 2) * V2, p);
                            });
}

Certificate certify_subspace_1contraction(const VectorFieldModel& model, const Eigen::MatrixXd& U,
                                          Norm p, const SamplingGrid& grid, double eta_min) {
    if (U.rows() != model.dim)
        throw InvalidArgument("certify_subspace_1contraction: U row count != model dimension");
    if (U.cols() < 1) throw InvalidArgument("certify_subspace_1contraction: U is empty");
    require_orthonormal(U, "certify_subspace_1contraction");
    return sup_over_samples(model, "subspace_1contraction", p, grid, eta_min,
                            [&](double t, const Eigen::VectorXd& x) {
                                return measure(U.transpose() * model.jacobian(t, x) * U, p);
                            });
}

Certificate certify_nob(const VectorFieldModel& model, const Eigen::MatrixXd& U,
                        const Eigen::MatrixXd& V, Norm p, const SamplingGrid& grid,
                        double eta_min) {
    if (U.cols() != 1) throw InvalidArgument("certify_nob: U must be one-dimensional (p = 1)");
    const SubspacePair pair{U, V};
    const Certificate red = check_reducibility(model, pair, grid);
    if (!red.passed)
        throw PrerequisiteError("certify_nob: reducibility gate failed (residual " +
                                std::to_string(red.bound) + ")");
    Certificate cert = certify_subspace_2contraction(model, V, p, grid, eta_min);
    cert.kind = "nob";
    cert.extra["reducibility_residual"] = red.bound;
    return cert;
}

Certificate certify_convergence(const VectorFieldModel& model, const Eigen::MatrixXd& U,
                                const Eigen::MatrixXd& V, Norm p, const SamplingGrid& grid,
                                double eta_min) {
    const SubspacePair pair{U, V};
    const Certificate red = check_reducibility(model, pair, grid);
    if (!red.passed)
        throw PrerequisiteError("certify_convergence: reducibility gate failed (residual " +
                                std::to_string(red.bound) + ")");
    // one measure for both conditions; mixed norms are not supported
    const Certificate c2 = certify_subspace_2contraction(model, V, p, grid, eta_min);
    const Certificate c1 = certify_subspace_1contraction(model, U, p, grid, eta_min);

    Certificate cert;
    cert.kind = "convergence";
    cert.norm = p;
    cert.eta_min = eta_min;
    cert.model_id = model.id;
    cert.samples = c1.samples + c2.samples;
    cert.bound = std::max(c1.bound, c2.bound);
    cert.margin_eta = std::max(-cert.bound, 0.0);
    cert.passed = c1.passed && c2.passed;
    if (c1.bound >= c2.bound) {
        cert.worst_t = c1.worst_t;
        cert.worst_x = c1.worst_x;
    } else {
        cert.worst_t = c2.worst_t;
        cert.worst_x = c2.worst_x;
    }
    cert.extra["subspace_1contraction_bound"] = c1.bound;
    cert.extra["subspace_2contraction_bound"] = c2.bound;
    cert.extra["reducibility_residual"] = red.bound;
    return cert;
}

}  // namespace kcontract
