#pragma once

#include <Eigen/Dense>
#include <functional>

#include "kcontract/certify.hpp"
#include "kcontract/model.hpp"

namespace kcontract {

/// Orthogonal decomposition of R^n: U (n x p) and V (n x q) with p + q = n,
/// U^T U = I, V^T V = I, U^T V = 0, U U^T + V V^T = I.
struct SubspacePair {
    Eigen::MatrixXd U;
    Eigen::MatrixXd V;

    int n() const { return static_cast<int>(U.rows()); }
    int p_dim() const { return static_cast<int>(U.cols()); }
    int q_dim() const { return static_cast<int>(V.cols()); }
};

struct PairResiduals {
    double utu = 0.0;           // ||U^T U - I||_F
    double vtv = 0.0;           // ||V^T V - I||_F
    double utv = 0.0;           // ||U^T V||_F
    double completeness = 0.0;  // ||U U^T + V V^T - I||_F
    bool passed = false;

    double max() const { return std::max(std::max(utu, vtv), std::max(utv, completeness)); }
};

inline constexpr double kPairTol = 1e-10;
inline constexpr double kReducibilityTol = 1e-8;

PairResiduals validate_pair(const SubspacePair& pair);

/// Sampled reducibility check: bound = sup |V^T J(t,x) U|_max; passes at
/// 1e-8. Also cross-checks the integral form V^T f(t,x) = V^T f(t, VV^T x)
/// on the same samples (reported in extra["condition_a_residual"]).
Certificate check_reducibility(const VectorFieldModel& model, const SubspacePair& pair,
                               const SamplingGrid& grid);

/// Builds the reduced cascade y1' = V^T f(t, V y1), y2' = U^T f(t, U y2 + V y1).
/// Runs the reducibility gate first and throws PrerequisiteError on failure.
SerialPair serial_reduce(const VectorFieldModel& model, const SubspacePair& pair,
                         const SamplingGrid& grid);

/// V = c/|c| (q = 1), U = deterministic Householder completion.
SubspacePair pair_from_first_integral(const Eigen::VectorXd& c);

/// U spans an invariant subspace of A read off its eigenstructure: the
/// eigenvalue with largest real part decides, a real one giving a
/// one-dimensional U, a complex pair giving the orthonormalized span of the
/// real and imaginary eigenvector parts.
SubspacePair lti_invariant_pair(const Eigen::MatrixXd& A);

/// x' = g(z), z' = h(M x, z) with M U = 0 (feedback form).
struct FeedbackSystem {
    std::string id;
    int n = 0;  // dim x
    int m = 0;  // dim z
    int k = 0;  // rows of M
    Eigen::MatrixXd M;
    BoxDomain x_domain;
    BoxDomain z_domain;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> g;      // R^m -> R^n
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> g_jac;  // n x m
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> h;  // -> R^m
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> h_jac_w;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> h_jac_z;
};

/// The assembled (n+m)-dimensional closed system.
VectorFieldModel assemble_feedback(const FeedbackSystem& sys);

/// Three-block reduction y1' = V^T g(y2), y2' = h(M V y1, y2), y3' = U^T g(y2):
/// an (n+m-p)-dimensional upstream (y1, y2) feeding the p-dimensional y3.
SerialPair feedback_form_reduce(const FeedbackSystem& sys, const SubspacePair& xpair);

}  // namespace kcontract
