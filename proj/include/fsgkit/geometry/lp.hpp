#pragma once

#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace fsgkit {

/// Dense tableau simplex for   max c^T x   s.t.   A x <= b,  x >= 0,
/// with b >= 0 so the origin is a feasible starting vertex. Bland's rule
/// keeps it cycle-free. Returns nullopt when the problem is unbounded.
struct LpSolution {
    Eigen::VectorXd x;
    double objective = 0;
};

inline std::optional<LpSolution> solve_lp_origin_feasible(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                                          const Eigen::VectorXd& c, double tol = 1e-12) {
    const auto m = A.rows();
    const auto n = A.cols();
    // tableau: m constraint rows + objective row; columns: n vars, m slacks, rhs
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
    t.topLeftCorner(m, n) = A;
    t.block(0, n, m, m).setIdentity();
    t.col(n + m).head(m) = b.cwiseMax(0.0);
    t.row(m).head(n) = -c.transpose();
    std::vector<Eigen::Index> basis(m);
    for (Eigen::Index i = 0; i < m; ++i) basis[i] = n + i;

    for (int iter = 0; iter < 10000; ++iter) {
        Eigen::Index enter = -1;
        for (Eigen::Index j = 0; j < n + m; ++j) {
            if (t(m, j) < -tol) {
                enter = j;
                break;
            }
        }
        if (enter < 0) break;
        Eigen::Index leave = -1;
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < m; ++i) {
            if (t(i, enter) > tol) {
                const double ratio = t(i, n + m) / t(i, enter);
                if (ratio < best - tol || (ratio <= best + tol && (leave < 0 || basis[i] < basis[leave]))) {
                    best = ratio;
                    leave = i;
                }
            }
        }
        if (leave < 0) return std::nullopt;
        t.row(leave) /= t(leave, enter);
        for (Eigen::Index i = 0; i <= m; ++i) {
            if (i != leave && t(i, enter) != 0.0) t.row(i) -= t(i, enter) * t.row(leave);
        }
        basis[leave] = enter;
    }
    LpSolution sol;
    sol.x = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < m; ++i) {
        if (basis[i] < n) sol.x[basis[i]] = t(i, n + m);
    }
    sol.objective = c.dot(sol.x);
    return sol;
}

}  // namespace fsgkit
