#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kcontract/decompose.hpp"
#include "kcontract/model.hpp"

namespace kcontract {

using Params = std::map<std::string, double>;

struct ModelCatalogEntry {
    std::string name;
    std::string description;
    Params defaults;
};

/// Built-in parameterized example systems. Every entry carries an analytic
/// Jacobian and a documented box domain ([-10, 10]^n unless noted).
const std::vector<ModelCatalogEntry>& model_catalog();

/// Builds a catalog model. Unknown names and out-of-range parameters throw
/// InvalidArgument. The `lti` entry needs a matrix: use build_lti or the
/// `lti-example6` preset.
VectorFieldModel build_model(const std::string& name, const Params& params = {});

VectorFieldModel build_lti(const Eigen::MatrixXd& A, const std::string& id = "lti");
VectorFieldModel build_laplacian_consensus(const Eigen::MatrixXd& L, bool tanh_flavor);
FeedbackSystem second_order_consensus_system(const Eigen::MatrixXd& L, double alpha, double beta,
                                             bool tanh_flavor);

/// The decomposition pair that comes with a model, when one is known
/// (consensus direction, agent-sum direction, or the block split of the
/// 4-dimensional diagonal LTI preset).
std::optional<SubspacePair> model_known_pair(const std::string& name, const Params& params = {});

/// Laplacian (out-degree convention, L 1 = 0) of a directed cycle on n nodes.
Eigen::MatrixXd cycle_laplacian(int n);

/// Laplacian from an edge list with rows (from, to, weight), 1-based nodes.
Eigen::MatrixXd laplacian_from_edge_list(const Eigen::MatrixXd& edges, int n = 0);

}  // namespace kcontract
