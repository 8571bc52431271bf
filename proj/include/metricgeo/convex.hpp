#pragma once

// Small dense convex solvers used by the modulus and Hajlasz modules.
//
//   solve_covering_lp   min c.x  s.t. A x >= b, x >= 0, with c >= 0
//   nnls                min |E u - f|  s.t. u >= 0          (Lawson-Hanson)
//   least_distance      min |x|        s.t. G x >= h        (via nnls)
//   hildreth            min |x|        s.t. G x >= h        (dual coordinate ascent)

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"

namespace metricgeo::convex {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct LpResult {
    Vector x;         // primal optimum
    Vector y;         // dual optimum (one multiplier per constraint row)
    double value = 0.0;
    std::size_t pivots = 0;
};

/// Solves min c.x s.t. A x >= b, x >= 0 for c >= 0 by running the primal
/// simplex on the dual  max b.y s.t. A^T y <= c, y >= 0, whose slack basis is
/// feasible because c >= 0. Bland's rule prevents cycling. Throws
/// InvalidArgument when the primal is infeasible (dual unbounded).
inline LpResult solve_covering_lp(const Matrix& A, const Vector& b, const Vector& c, double eps = 1e-12) {
    const Eigen::Index m = A.rows();  // dual variables
    const Eigen::Index n = A.cols();  // dual rows
    if (b.size() != m || c.size() != n) throw Error(ErrorCode::InvalidArgument, "LP dimension mismatch");
    for (Eigen::Index j = 0; j < n; ++j)
        if (c[j] < 0.0) throw Error(ErrorCode::InvalidArgument, "LP cost vector must be nonnegative");

    // Tableau rows: A^T | I | c. Objective row stores reduced costs of the max problem.
    const Eigen::Index cols = m + n;
    Matrix T(n, cols + 1);
    T.setZero();
    T.leftCols(m) = A.transpose();
    T.block(0, m, n, n).setIdentity();
    T.col(cols) = c;
    Vector z = Vector::Zero(cols + 1);
    z.head(m) = -b;
    std::vector<Eigen::Index> basis(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) basis[static_cast<std::size_t>(i)] = m + i;

    LpResult res;
    const std::size_t max_pivots = 50000 + 50 * static_cast<std::size_t>(cols);
    while (true) {
        Eigen::Index enter = -1;
        for (Eigen::Index j = 0; j < cols; ++j)
            if (z[j] < -eps) {
                enter = j;
                break;
            }
        if (enter < 0) break;
        Eigen::Index leave = -1;
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < n; ++i) {
            double a = T(i, enter);
            if (a <= eps) continue;
            double ratio = T(i, cols) / a;
            if (leave < 0 || ratio < best - eps) {
                best = ratio;
                leave = i;
            } else if (ratio <= best + eps &&
                       basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)]) {
                best = std::min(best, ratio);
                leave = i;
            }
        }
        if (leave < 0) throw Error(ErrorCode::InvalidArgument, "LP is infeasible (dual unbounded)");
        const double piv = T(leave, enter);
        T.row(leave) /= piv;
        for (Eigen::Index i = 0; i < n; ++i)
            if (i != leave && T(i, enter) != 0.0) T.row(i) -= T(i, enter) * T.row(leave);
        z -= z[enter] * T.row(leave).transpose();
        basis[static_cast<std::size_t>(leave)] = enter;
        if (++res.pivots > max_pivots) throw Error(ErrorCode::IterationLimit, "simplex pivot limit reached");
    }
    res.y = Vector::Zero(m);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index var = basis[static_cast<std::size_t>(i)];
        if (var < m) res.y[var] = std::max(0.0, T(i, cols));
    }
    // Primal values are the reduced costs of the dual slacks.
    res.x = z.segment(m, n).cwiseMax(0.0);
    res.value = c.dot(res.x);
    return res;
}

struct NnlsResult {
    Vector u;
    Vector residual;  // E u - f
    std::size_t iterations = 0;
};

/// Lawson-Hanson active-set NNLS.
inline NnlsResult nnls(const Matrix& E, const Vector& f, double tol = 1e-12, std::size_t max_iter = 0) {
    const Eigen::Index n = E.cols();
    if (max_iter == 0) max_iter = 30 * static_cast<std::size_t>(n) + 100;
    std::vector<bool> passive(static_cast<std::size_t>(n), false);
    Vector u = Vector::Zero(n);
    NnlsResult res;
    const double scale = std::max(1.0, E.cwiseAbs().maxCoeff());

    auto solve_passive = [&](Vector& out) {
        std::vector<Eigen::Index> idx;
        for (Eigen::Index j = 0; j < n; ++j)
            if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
        Matrix Ep(E.rows(), static_cast<Eigen::Index>(idx.size()));
        for (std::size_t k = 0; k < idx.size(); ++k) Ep.col(static_cast<Eigen::Index>(k)) = E.col(idx[k]);
        Vector zp = Ep.colPivHouseholderQr().solve(f);
        out = Vector::Zero(n);
        for (std::size_t k = 0; k < idx.size(); ++k) out[idx[k]] = zp[static_cast<Eigen::Index>(k)];
    };

    while (res.iterations < max_iter) {
        Vector w = E.transpose() * (f - E * u);
        Eigen::Index t = -1;
        double wmax = tol * scale;
        for (Eigen::Index j = 0; j < n; ++j)
            if (!passive[static_cast<std::size_t>(j)] && w[j] > wmax) {
                wmax = w[j];
                t = j;
            }
        if (t < 0) break;
        passive[static_cast<std::size_t>(t)] = true;
        ++res.iterations;
        while (true) {
            Vector z;
            solve_passive(z);
            bool feasible = true;
            for (Eigen::Index j = 0; j < n; ++j)
                if (passive[static_cast<std::size_t>(j)] && z[j] <= 0.0) feasible = false;
            if (feasible) {
                u = z;
                break;
            }
            double alpha = 1.0;
            for (Eigen::Index j = 0; j < n; ++j)
                if (passive[static_cast<std::size_t>(j)] && z[j] <= 0.0) alpha = std::min(alpha, u[j] / (u[j] - z[j]));
            u += alpha * (z - u);
            for (Eigen::Index j = 0; j < n; ++j)
                if (passive[static_cast<std::size_t>(j)] && u[j] <= tol) {
                    passive[static_cast<std::size_t>(j)] = false;
                    u[j] = 0.0;
                }
        }
    }
    res.u = u;
    res.residual = E * u - f;
    return res;
}

struct LeastDistanceResult {
    Vector x;
    Vector multipliers;  // one per row of G
};

/// Minimum-norm point of {x : G x >= h} (Lawson-Hanson least-distance programming).
inline LeastDistanceResult least_distance(const Matrix& G, const Vector& h) {
    const Eigen::Index m = G.rows(), n = G.cols();
    Matrix E(n + 1, m);
    E.topRows(n) = G.transpose();
    E.row(n) = h.transpose();
    Vector f = Vector::Zero(n + 1);
    f[n] = 1.0;
    auto sol = nnls(E, f);
    const double last = sol.residual[n];
    if (sol.residual.norm() < 1e-12 || !(std::abs(last) > 1e-300))
        throw Error(ErrorCode::InvalidArgument, "least-distance constraints are infeasible");
    LeastDistanceResult out;
    out.x = -sol.residual.head(n) / last;
    out.multipliers = sol.u / (-last);
    return out;
}

struct HildrethResult {
    Vector x;
    double lower_bound = 0.0;  // dual value of min |x|^2
    double upper_bound = 0.0;  // |x / s|^2, s = min(1, smallest constraint ratio)
    std::size_t sweeps = 0;
};

/// Cyclic exact coordinate ascent on the dual of min |x|^2 s.t. G x >= h
/// (Hildreth). Stops when upper and lower bounds on min |x|^2 meet to gap_tol.
/// Intended for h > 0 (covering constraints).
inline HildrethResult hildreth(const Matrix& G, const Vector& h, double gap_tol = 1e-11,
                               std::size_t max_sweeps = 2000000) {
    const Eigen::Index m = G.rows();
    Vector lambda = Vector::Zero(m);
    Vector x = Vector::Zero(G.cols());
    Vector row_norm2(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        row_norm2[i] = G.row(i).squaredNorm();
        if (!(row_norm2[i] > 0.0)) throw Error(ErrorCode::InvalidArgument, "constraint row is zero");
    }
    HildrethResult res;
    for (res.sweeps = 1; res.sweeps <= max_sweeps; ++res.sweeps) {
        for (Eigen::Index i = 0; i < m; ++i) {
            // x = G^T lambda / 2 is the minimiser of |x|^2 - lambda.(Gx - h).
            double step = 2.0 * (h[i] - G.row(i).dot(x)) / row_norm2[i];
            double next = std::max(0.0, lambda[i] + step);
            double delta = next - lambda[i];
            if (delta != 0.0) {
                lambda[i] = next;
                x += 0.5 * delta * G.row(i).transpose();
            }
        }
        if (res.sweeps % 16 == 0 || res.sweeps == max_sweeps) {
            res.lower_bound = lambda.dot(h) - x.squaredNorm();
            Vector ratios = (G * x).cwiseQuotient(h);
            double s = std::min(1.0, ratios.minCoeff());
            res.upper_bound = s > 0.0 ? x.squaredNorm() / (s * s) : std::numeric_limits<double>::infinity();
            if (res.upper_bound - res.lower_bound <= gap_tol * std::max(1.0, res.upper_bound)) break;
        }
    }
    Vector ratios = (G * x).cwiseQuotient(h);
    double s = ratios.minCoeff();
    res.x = s > 0.0 ? Vector(x / std::min(1.0, s)) : x;
    return res;
}

}  // namespace metricgeo::convex
