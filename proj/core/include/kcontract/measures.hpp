#pragma once

#include <Eigen/Dense>
#include <string>

#include "kcontract/errors.hpp"

namespace kcontract {

/// The three induced norms for which closed-form matrix measures exist.
enum class Norm { One, Two, Inf };

std::string norm_name(Norm p);
Norm norm_from_name(const std::string& s);

/// Matrix measure (logarithmic norm) of a square matrix:
///   mu_1  = max_j ( a_jj + sum_{i != j} |a_ij| )
///   mu_inf= max_i ( a_ii + sum_{j != i} |a_ij| )
///   mu_2  = largest eigenvalue of (A + A^T)/2
double measure(const Eigen::MatrixXd& A, Norm p);

/// Measure of the second additive compound without materializing A^[2].
/// For p in {1, inf} this is the pairwise row/column closed form; for p = 2
/// it is the sum of the two largest eigenvalues of (A + A^T)/2.
double measure_of_second_compound(const Eigen::MatrixXd& A, Norm p);

}  // namespace kcontract
