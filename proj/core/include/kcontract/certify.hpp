#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "kcontract/measures.hpp"
#include "kcontract/model.hpp"

namespace kcontract {

/// Sampling plan for a certificate: a dense axis grid over the domain box
/// plus seeded uniform-random points, and a time grid for time-varying
/// fields. The grid is capped; points_per_axis is reduced automatically when
/// points_per_axis^n would exceed max_grid_points.
struct SamplingGrid {
    int points_per_axis = 9;
    long long random_samples = 1000;
    std::uint64_t seed = 0;
    double t_horizon = -1.0;  // < 0: model forcing period if declared, else 10
    int time_samples = 17;
    long long max_grid_points = 200000;
};

/// Enumerates the sample states in a fixed deterministic order (grid first,
/// then random). Shared by every sampled check.
std::vector<Eigen::VectorXd> enumerate_samples(const BoxDomain& box, const SamplingGrid& grid);

/// Time sample points for a model under a grid spec ({0} when time-invariant).
std::vector<double> enumerate_times(const VectorFieldModel& model, const SamplingGrid& grid);

/// Result of a sampled check. `bound` is the sup of the checked quantity
/// over all samples; the certificate passes iff bound <= -eta_min
/// (or bound <= tolerance, for residual-style kinds).
struct Certificate {
    std::string kind;
    double bound = 0.0;
    double margin_eta = 0.0;  // max(-bound, 0)
    double worst_t = 0.0;
    Eigen::VectorXd worst_x;
    long long samples = 0;
    Norm norm = Norm::Inf;
    bool passed = false;
    double eta_min = 1e-6;
    std::string model_id;
    std::map<std::string, double> extra;

    nlohmann::json to_json() const;
    static Certificate from_json(const nlohmann::json& j);
};

/// Sampled k-contraction check, k in {1, 2}:
/// bound = sup over samples of mu_p(J) (k=1) or mu_p(J^[2]) via the
/// closed forms (k=2). Sampled, not formal.
Certificate certify_k_contraction(const VectorFieldModel& model, int k, Norm p,
                                  const SamplingGrid& grid, double eta_min = 1e-6);

/// bound = sup mu_p( (V^T)^(2) J^[2] V^(2) ); V must have >= 2 orthonormal
/// columns.
Certificate certify_subspace_2contraction(const VectorFieldModel& model, const Eigen::MatrixXd& V,
                                          Norm p, const SamplingGrid& grid, double eta_min = 1e-6);

/// bound = sup mu_p( U^T J U ); U must have orthonormal columns.
Certificate certify_subspace_1contraction(const VectorFieldModel& model, const Eigen::MatrixXd& U,
                                          Norm p, const SamplingGrid& grid, double eta_min = 1e-6);

/// Non-oscillation certificate: requires the (U, V) reducibility gate to
/// pass (U one-dimensional), then certifies 2-contraction restricted to V.
/// Throws PrerequisiteError if the gate fails.
Certificate certify_nob(const VectorFieldModel& model, const Eigen::MatrixXd& U,
                        const Eigen::MatrixXd& V, Norm p, const SamplingGrid& grid,
                        double eta_min = 1e-6);

/// Convergence certificate: reducibility gate, then 2-contraction on V and
/// 1-contraction on U under the same norm.
Certificate certify_convergence(const VectorFieldModel& model, const Eigen::MatrixXd& U,
                                const Eigen::MatrixXd& V, Norm p, const SamplingGrid& grid,
                                double eta_min = 1e-6);

}  // namespace kcontract
