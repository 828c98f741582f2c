#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

namespace toposwitch {

// min c'x  s.t.  A x = b,  lo <= x <= up  (entries may be +-inf).
// Bounded-variable two-phase revised simplex, dense, deterministic:
// Dantzig pricing with lowest-index tie-break, lowest-index leaving row,
// Bland's rule after a stall so cycling terminates.
struct LpProblem {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    Eigen::VectorXd c;
    Eigen::VectorXd lo;
    Eigen::VectorXd up;
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpSolution {
    LpStatus status = LpStatus::iteration_limit;
    Eigen::VectorXd x;
    Eigen::VectorXd y;   // duals of the equality rows
    double objective = 0.0;
};

namespace lpdetail {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Tableau {
    int m, n;               // rows, structural columns
    Eigen::MatrixXd A;      // m x (n + m): structural + artificial columns
    Eigen::VectorXd b, lo, up, x;
    Eigen::MatrixXd Binv;
    std::vector<int> basis;         // size m, column indices
    std::vector<int> pos_in_basis;  // column -> basis row or -1

    void refactorize() {
        Eigen::MatrixXd B(m, m);
        for (int i = 0; i < m; ++i) B.col(i) = A.col(basis[i]);
        Binv = B.partialPivLu().inverse();
    }

    void recompute_basic_values() {
        Eigen::VectorXd r = b;
        for (int j = 0; j < n + m; ++j)
            if (pos_in_basis[j] < 0 && x[j] != 0.0) r -= A.col(j) * x[j];
        Eigen::VectorXd xb = Binv * r;
        for (int i = 0; i < m; ++i) x[basis[i]] = xb[i];
    }
};

}  // namespace lpdetail

inline LpSolution solve_lp(const LpProblem& prob, int max_iter = 0) {
    using lpdetail::kInf;
    const int m = (int)prob.A.rows();
    const int n = (int)prob.A.cols();
    if (max_iter <= 0) max_iter = 200 + 40 * (m + n);
    const double feas_tol = 1e-7;
    const double dual_tol = 1e-9;
    const double pivot_tol = 1e-10;

    lpdetail::Tableau t;
    t.m = m; t.n = n;
    t.A.resize(m, n + m);
    t.A.leftCols(n) = prob.A;
    t.b = prob.b;
    t.lo.resize(n + m); t.up.resize(n + m);
    t.lo.head(n) = prob.lo; t.up.head(n) = prob.up;
    t.x = Eigen::VectorXd::Zero(n + m);

    // row equilibration for scale robustness
    Eigen::VectorXd rscale(m);
    for (int i = 0; i < m; ++i) {
        double s = t.A.row(i).head(n).cwiseAbs().maxCoeff();
        rscale[i] = s > 0.0 ? s : 1.0;
        t.A.row(i).head(n) /= rscale[i];
        t.b[i] /= rscale[i];
    }

    // start structural variables at a finite bound (or 0 when free)
    for (int j = 0; j < n; ++j) {
        if (std::isfinite(t.lo[j])) t.x[j] = t.lo[j];
        else if (std::isfinite(t.up[j])) t.x[j] = t.up[j];
        else t.x[j] = 0.0;
    }
    Eigen::VectorXd resid = t.b - t.A.leftCols(n) * t.x.head(n);
    for (int i = 0; i < m; ++i) {
        int j = n + i;
        t.A.col(j).setZero();
        t.A(i, j) = resid[i] >= 0.0 ? 1.0 : -1.0;
        t.lo[j] = 0.0; t.up[j] = kInf;
        t.x[j] = std::abs(resid[i]);
    }
    t.basis.resize(m);
    t.pos_in_basis.assign(n + m, -1);
    for (int i = 0; i < m; ++i) { t.basis[i] = n + i; t.pos_in_basis[n + i] = i; }
    t.Binv = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) t.Binv(i, i) = t.A(i, n + i);   // +-1 diagonal

    Eigen::VectorXd cost = Eigen::VectorXd::Zero(n + m);
    cost.tail(m).setOnes();   // phase 1

    LpSolution sol;
    int phase = 1;
    int since_refactor = 0;
    int stall = 0;
    double last_obj = kInf;

    for (int iter = 0; iter < max_iter; ++iter) {
        Eigen::VectorXd cb(m);
        for (int i = 0; i < m; ++i) cb[i] = cost[t.basis[i]];
        Eigen::VectorXd y = t.Binv.transpose() * cb;

        double obj = 0.0;
        for (int j = 0; j < n + m; ++j) obj += cost[j] * t.x[j];
        if (obj < last_obj - 1e-12) { stall = 0; last_obj = obj; }
        else ++stall;
        bool bland = stall > 2 * (m + n);

        if (phase == 1 && obj < feas_tol) {
            // feasible: pin artificials at zero and switch to the real objective
            for (int i = 0; i < m; ++i) { t.lo[n + i] = 0.0; t.up[n + i] = 0.0; }
            cost.setZero();
            cost.head(n) = prob.c;
            phase = 2;
            last_obj = kInf; stall = 0;
            continue;
        }

        // pricing
        int enter = -1, dir = 0;
        double best = 0.0;
        for (int j = 0; j < n + m; ++j) {
            if (t.pos_in_basis[j] >= 0) continue;
            if (t.lo[j] == t.up[j]) continue;   // fixed
            double d = cost[j] - y.dot(t.A.col(j));
            bool at_lo = std::isfinite(t.lo[j]) && t.x[j] <= t.lo[j] + 1e-9;
            bool at_up = std::isfinite(t.up[j]) && t.x[j] >= t.up[j] - 1e-9;
            int cand_dir = 0;
            double score = 0.0;
            if (!at_lo && !at_up) {            // free variable off both bounds
                if (d < -dual_tol) { cand_dir = +1; score = -d; }
                else if (d > dual_tol) { cand_dir = -1; score = d; }
            } else if (at_lo && d < -dual_tol) { cand_dir = +1; score = -d; }
            else if (at_up && d > dual_tol) { cand_dir = -1; score = d; }
            if (cand_dir != 0) {
                if (bland) { enter = j; dir = cand_dir; break; }
                if (score > best + 1e-15) { best = score; enter = j; dir = cand_dir; }
            }
        }
        if (enter < 0) {
            if (phase == 1) {
                // phase-1 optimum positive -> infeasible
                sol.status = LpStatus::infeasible;
                return sol;
            }
            sol.status = LpStatus::optimal;
            sol.x = t.x.head(n);
            sol.y = y;
            for (int i = 0; i < m; ++i) sol.y[i] /= rscale[i];
            sol.objective = prob.c.dot(sol.x);
            return sol;
        }

        // ratio test: entering moves by step s*dir >= 0
        Eigen::VectorXd w = t.Binv * t.A.col(enter);
        double limit = kInf;
        int leave_row = -1;
        double leave_to = 0.0;
        // entering variable's own opposite bound
        double own = kInf;
        if (dir > 0 && std::isfinite(t.up[enter])) own = t.up[enter] - t.x[enter];
        if (dir < 0 && std::isfinite(t.lo[enter])) own = t.x[enter] - t.lo[enter];
        limit = own;
        for (int i = 0; i < m; ++i) {
            double wi = dir * w[i];
            int bj = t.basis[i];
            if (wi > pivot_tol && std::isfinite(t.lo[bj])) {
                double s = (t.x[bj] - t.lo[bj]) / wi;
                if (s < limit - 1e-12 || (s < limit + 1e-12 && leave_row >= 0 &&
                                          t.basis[i] < t.basis[leave_row])) {
                    limit = s; leave_row = i; leave_to = t.lo[bj];
                }
            } else if (wi < -pivot_tol && std::isfinite(t.up[bj])) {
                double s = (t.x[bj] - t.up[bj]) / wi;
                if (s < limit - 1e-12 || (s < limit + 1e-12 && leave_row >= 0 &&
                                          t.basis[i] < t.basis[leave_row])) {
                    limit = s; leave_row = i; leave_to = t.up[bj];
                }
            }
        }
        if (!std::isfinite(limit)) {
            sol.status = phase == 1 ? LpStatus::infeasible : LpStatus::unbounded;
            return sol;
        }
        double step = std::max(0.0, limit);
        t.x[enter] += dir * step;
        for (int i = 0; i < m; ++i) t.x[t.basis[i]] -= dir * step * w[i];

        if (leave_row < 0) continue;   // bound flip, basis unchanged
        {
            int out = t.basis[leave_row];
            t.x[out] = leave_to;
            t.basis[leave_row] = enter;
            t.pos_in_basis[out] = -1;
            t.pos_in_basis[enter] = leave_row;
            // product-form update of Binv
            double piv = w[leave_row];
            Eigen::VectorXd row = t.Binv.row(leave_row) / piv;
            for (int i = 0; i < m; ++i) {
                if (i == leave_row) continue;
                double f = w[i];
                if (f != 0.0) t.Binv.row(i) -= f * row.transpose();
            }
            t.Binv.row(leave_row) = row.transpose();
            if (++since_refactor >= 80) {
                t.refactorize();
                t.recompute_basic_values();
                since_refactor = 0;
            }
        }
    }
    sol.status = LpStatus::iteration_limit;
    return sol;
}

}  // namespace toposwitch
