#include "kcontract/compound.hpp"

#include <cmath>

namespace kcontract {

namespace {

void require_finite(const Eigen::MatrixXd& M, const char* what) {
    if (!M.allFinite()) throw NonFiniteError(std::string(what) + ": non-finite entries");
}

void require_capacity(int n) {
    if (n > kMaxCompoundDim)
        throw CapacityError("compound: dimension " + std::to_string(n) + " exceeds cap " +
                            std::to_string(kMaxCompoundDim));
}

// Determinant of the k x k submatrix of C picked by (1-based) rows/cols.
double minor_det(const Eigen::MatrixXd& C, const std::vector<int>& rows,
                 const std::vector<int>& cols) {
    const int k = static_cast<int>(rows.size());
    switch (k) {
        case 1:
            return C(rows[0] - 1, cols[0] - 1);
        case 2: {
            const double a = C(rows[0] - 1, cols[0] - 1), b = C(rows[0] - 1, cols[1] - 1);
            const double c = C(rows[1] - 1, cols[0] - 1), d = C(rows[1] - 1, cols[1] - 1);
            return a * d - b * c;
        }
        case 3: {
            double m[3][3];
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) m[i][j] = C(rows[i] - 1, cols[j] - 1);
            return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                   m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                   m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        }
        default: {
            Eigen::MatrixXd sub(k, k);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) sub(i, j) = C(rows[i] - 1, cols[j] - 1);
            return sub.partialPivLu().determinant();
        }
    }
}

}  // namespace

std::int64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::int64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

LexIndexSet lex_subsets(int n, int k) {
    if (n < 1) throw InvalidArgument("lex_subsets: n must be positive");
    if (k < 1 || k > n) throw InvalidArgument("lex_subsets: require 1 <= k <= n");
    require_capacity(n);
    LexIndexSet out;
    out.n = n;
    out.k = k;
    std::vector<int> cur(k);
    for (int i = 0; i < k; ++i) cur[i] = i + 1;
    while (true) {
        out.subsets.push_back(cur);
        // advance to the next k-subset in lexicographic order
        int i = k - 1;
        while (i >= 0 && cur[i] == n - (k - 1 - i)) --i;
        if (i < 0) break;
        ++cur[i];
        for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
    }
    return out;
}

Eigen::MatrixXd mult_compound(const Eigen::MatrixXd& C, int k) {
    const int n = static_cast<int>(C.rows());
    const int m = static_cast<int>(C.cols());
    if (k < 1 || k > std::min(n, m))
        throw InvalidArgument("mult_compound: require 1 <= k <= min(rows, cols)");
    require_capacity(std::max(n, m));
    require_finite(C, "mult_compound");

    const LexIndexSet rows = lex_subsets(n, k);
    const LexIndexSet cols = lex_subsets(m, k);
    Eigen::MatrixXd out(rows.size(), cols.size());
    for (std::int64_t i = 0; i < rows.size(); ++i)
        for (std::int64_t j = 0; j < cols.size(); ++j)
            out(i, j) = minor_det(C, rows.subsets[i], cols.subsets[j]);
    return out;
}

Eigen::MatrixXd add_compound(const Eigen::MatrixXd& A, int k) {
    const int n = static_cast<int>(A.rows());
    if (A.cols() != n) throw InvalidArgument("add_compound: matrix must be square");
    if (k < 1 || k > n) throw InvalidArgument("add_compound: require 1 <= k <= n");
    require_capacity(n);
    require_finite(A, "add_compound");

    const LexIndexSet idx = lex_subsets(n, k);
    const std::int64_t N = idx.size();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(N, N);
    for (std::int64_t i = 0; i < N; ++i) {
        const auto& alpha = idx.subsets[i];
        double diag = 0.0;
        for (int a : alpha) diag += A(a - 1, a - 1);
        out(i, i) = diag;
        for (std::int64_t j = 0; j < N; ++j) {
            if (i == j) continue;
            const auto& beta = idx.subsets[j];
            // find positions where alpha and beta disagree as sets
            int s = -1, t = -1, mismatches = 0;
            {
                // two-pointer sweep over the sorted tuples
                int a = 0, b = 0;
                while (a < k || b < k) {
                    if (a < k && b < k && alpha[a] == beta[b]) {
                        ++a;
                        ++b;
                    } else if (b == k || (a < k && alpha[a] < beta[b])) {
                        s = a;
                        ++a;
                        ++mismatches;
                    } else {
                        t = b;
                        ++b;
                        ++mismatches;
                    }
                    if (mismatches > 2) break;
                }
            }
            if (mismatches == 2 && s >= 0 && t >= 0) {
                const double sign = ((s + t) % 2 == 0) ? 1.0 : -1.0;
                out(i, j) = sign * A(alpha[s] - 1, beta[t] - 1);
            }
        }
    }
    return out;
}

Eigen::MatrixXd transform_add_compound(const Eigen::MatrixXd& V, const Eigen::MatrixXd& A,
                                       const Eigen::MatrixXd& W, int k) {
    const int m = static_cast<int>(V.rows());
    const int n = static_cast<int>(V.cols());
    if (A.rows() != n || A.cols() != n)
        throw InvalidArgument("transform_add_compound: A must be n x n with n = cols(V)");
    if (W.rows() != n || W.cols() != m)
        throw InvalidArgument("transform_add_compound: W must be n x m");
    if (k < 1 || k > m) throw InvalidArgument("transform_add_compound: require 1 <= k <= m");
    const double resid = (V * W - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff();
    if (resid > 1e-10)
        throw InvalidArgument("transform_add_compound: V W != I (residual " +
                              std::to_string(resid) + ")");
    return mult_compound(V, k) * add_compound(A, k) * mult_compound(W, k);
}

}  // namespace kcontract
