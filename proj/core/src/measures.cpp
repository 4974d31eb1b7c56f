#include "kcontract/measures.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace kcontract {

std::string norm_name(Norm p) {
    switch (p) {
        case Norm::One: return "1";
        case Norm::Two: return "2";
        case Norm::Inf: return "inf";
    }
    return "?";
}

Norm norm_from_name(const std::string& s) {
    if (s == "1") return Norm::One;
    if (s == "2") return Norm::Two;
    if (s == "inf" || s == "Inf" || s == "INF") return Norm::Inf;
    throw InvalidArgument("unknown norm '" + s + "' (expected 1, 2, or inf)");
}

namespace {

void check_square_finite(const Eigen::MatrixXd& A, const char* what) {
    if (A.rows() != A.cols()) throw InvalidArgument(std::string(what) + ": matrix must be square");
    if (!A.allFinite()) throw NonFiniteError(std::string(what) + ": non-finite entries");
}

Eigen::VectorXd symmetric_part_eigenvalues(const Eigen::MatrixXd& A) {
    const Eigen::MatrixXd S = 0.5 * (A + A.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
    return es.eigenvalues();  // ascending
}

}  // namespace

double measure(const Eigen::MatrixXd& A, Norm p) {
    check_square_finite(A, "measure");
    const int n = static_cast<int>(A.rows());
    switch (p) {
        case Norm::One: {
            double best = -std::numeric_limits<double>::infinity();
            for (int j = 0; j < n; ++j) {
                double v = A(j, j);
                for (int i = 0; i < n; ++i)
                    if (i != j) v += std::abs(A(i, j));
                best = std::max(best, v);
            }
            return best;
        }
        case Norm::Inf: {
            double best = -std::numeric_limits<double>::infinity();
            for (int i = 0; i < n; ++i) {
                double v = A(i, i);
                for (int j = 0; j < n; ++j)
                    if (j != i) v += std::abs(A(i, j));
                best = std::max(best, v);
            }
            return best;
        }
        case Norm::Two: {
            const Eigen::VectorXd ev = symmetric_part_eigenvalues(A);
            return ev(ev.size() - 1);
        }
    }
    throw InvalidArgument("measure: bad norm tag");
}

double measure_of_second_compound(const Eigen::MatrixXd& A, Norm p) {
    check_square_finite(A, "measure_of_second_compound");
    const int n = static_cast<int>(A.rows());
    if (n < 2) throw InvalidArgument("measure_of_second_compound: need n >= 2");
    if (n == 2) return A.trace();  // A^[2] is the 1x1 trace; all measures agree
    switch (p) {
        case Norm::Inf: {
            double best = -std::numeric_limits<double>::infinity();
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) {
                    double v = A(i, i) + A(j, j);
                    for (int k = 0; k < n; ++k)
                        if (k != i && k != j) v += std::abs(A(i, k)) + std::abs(A(j, k));
                    best = std::max(best, v);
                }
            return best;
        }
        case Norm::One: {
            double best = -std::numeric_limits<double>::infinity();
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) {
                    double v = A(i, i) + A(j, j);
                    for (int k = 0; k < n; ++k)
                        if (k != i && k != j) v += std::abs(A(k, i)) + std::abs(A(k, j));
                    best = std::max(best, v);
                }
            return best;
        }
        case Norm::Two: {
            const Eigen::VectorXd ev = symmetric_part_eigenvalues(A);
            return ev(ev.size() - 1) + ev(ev.size() - 2);
        }
    }
    throw InvalidArgument("measure_of_second_compound: bad norm tag");
}

}  // namespace kcontract
