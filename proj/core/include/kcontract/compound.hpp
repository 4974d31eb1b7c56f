#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "kcontract/errors.hpp"

namespace kcontract {

/// Largest ambient dimension accepted by the compound constructors.
inline constexpr int kMaxCompoundDim = 16;

/// All k-element subsets of {1,...,n} in lexicographic order.
/// Indices are 1-based, matching the usual minor notation; callers that
/// address Eigen matrices subtract one.
struct LexIndexSet {
    int n = 0;
    int k = 0;
    std::vector<std::vector<int>> subsets;

    std::int64_t size() const { return static_cast<std::int64_t>(subsets.size()); }
};

LexIndexSet lex_subsets(int n, int k);

std::int64_t binomial(int n, int k);

/// k-th multiplicative compound: the binom(n,k) x binom(m,k) matrix of all
/// k x k minors of C, rows and columns ordered by lex_subsets.
Eigen::MatrixXd mult_compound(const Eigen::MatrixXd& C, int k);

/// k-th additive compound of a square matrix, built by the signed
/// single-replacement rule:
///   entry(alpha, alpha) = sum of a_ii over i in alpha,
///   entry(alpha, beta)  = (-1)^(s+t) a_{alpha_s, beta_t} when alpha and beta
///                         differ in exactly one element (at positions s, t),
///   entry(alpha, beta)  = 0 otherwise.
Eigen::MatrixXd add_compound(const Eigen::MatrixXd& A, int k);

/// (V A W)^[k] computed as V^(k) A^[k] W^(k); requires V W = I to 1e-10.
/// This is the quantity consumed by the subspace contraction certificates.
Eigen::MatrixXd transform_add_compound(const Eigen::MatrixXd& V,
                                       const Eigen::MatrixXd& A,
                                       const Eigen::MatrixXd& W, int k);

}  // namespace kcontract
