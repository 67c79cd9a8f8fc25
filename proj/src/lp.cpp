#include "risitl/lp.hpp"

#include <limits>
#include <stdexcept>
#include <vector>

namespace risitl {

namespace {

// Tableau simplex on  min c^T z  s.t.  A z = b, z >= 0  with b >= 0 and a
// starting identity basis in the trailing columns. Bland's rule throughout.
struct Tableau {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    Eigen::VectorXd c;
    std::vector<int> basis;
    double tol;

    // Returns false when the LP is unbounded (cannot happen for phase-1).
    bool solve() {
        const int m = static_cast<int>(A.rows());
        const int n = static_cast<int>(A.cols());
        Eigen::VectorXd y(m);
        for (int iter = 0; iter < 20000; ++iter) {
            // reduced costs: r_j = c_j - c_B^T B^{-1} A_j; tableau form keeps
            // A already reduced, so r_j = c_j - sum_i c_basis[i] * A(i,j)
            int enter = -1;
            for (int j = 0; j < n; ++j) {
                double r = c(j);
                for (int i = 0; i < m; ++i) r -= c(basis[static_cast<size_t>(i)]) * A(i, j);
                if (r < -tol) { enter = j; break; }  // Bland: first improving index
            }
            if (enter < 0) return true;
            int leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int i = 0; i < m; ++i) {
                if (A(i, enter) > tol) {
                    double ratio = b(i) / A(i, enter);
                    if (ratio < best - tol ||
                        (ratio < best + tol &&
                         (leave < 0 || basis[static_cast<size_t>(i)] < basis[static_cast<size_t>(leave)])))
                    {
                        best = ratio;
                        leave = i;
                    }
                }
            }
            if (leave < 0) return false;  // unbounded
            pivot(leave, enter);
        }
        throw std::runtime_error("lp: iteration limit");
    }

    void pivot(int row, int col) {
        const int m = static_cast<int>(A.rows());
        double p = A(row, col);
        A.row(row) /= p;
        b(row) /= p;
        for (int i = 0; i < m; ++i) {
            if (i == row) continue;
            double f = A(i, col);
            if (f != 0.0) {
                A.row(i) -= f * A.row(row);
                b(i) -= f * b(row);
            }
        }
        basis[static_cast<size_t>(row)] = col;
    }

    double objective() const {
        double v = 0.0;
        for (int i = 0; i < static_cast<int>(A.rows()); ++i)
            v += c(basis[static_cast<size_t>(i)]) * b(i);
        return v;
    }
};

}  // namespace

FeasibilityResult lp_phase1(const Eigen::MatrixXd& G, const Eigen::VectorXd& h, double tol) {
    const int m = static_cast<int>(G.rows());
    const int n = static_cast<int>(G.cols());
    FeasibilityResult res;
    if (m == 0) {
        res.feasible = true;
        res.point = Eigen::VectorXd::Zero(n);
        return res;
    }

    // Variables: x+ (n), x- (n), slack s (m), artificial a (m).
    const int nv = 2 * n + 2 * m;
    Tableau t;
    t.tol = tol;
    t.A = Eigen::MatrixXd::Zero(m, nv);
    t.b = Eigen::VectorXd(m);
    t.c = Eigen::VectorXd::Zero(nv);
    t.basis.resize(static_cast<size_t>(m));

    for (int i = 0; i < m; ++i) {
        double rhs = h(i);
        int s = rhs >= 0 ? 1 : -1;
        for (int j = 0; j < n; ++j) {
            t.A(i, j) = s * G(i, j);
            t.A(i, n + j) = -s * G(i, j);
        }
        t.A(i, 2 * n + i) = s;        // slack
        t.A(i, 2 * n + m + i) = 1.0;  // artificial
        t.b(i) = s * rhs;
        t.basis[static_cast<size_t>(i)] = 2 * n + m + i;
        t.c(2 * n + m + i) = 1.0;
    }

    if (!t.solve()) throw std::runtime_error("lp_phase1: unbounded phase-1 (impossible)");

    if (t.objective() <= tol * (1.0 + h.cwiseAbs().maxCoeff())) {
        res.feasible = true;
        Eigen::VectorXd z = Eigen::VectorXd::Zero(nv);
        for (int i = 0; i < m; ++i) z(t.basis[static_cast<size_t>(i)]) = t.b(i);
        res.point = z.head(n) - z.segment(n, n);
        return res;
    }

    // Infeasible: the reduced cost of slack column i at the phase-1 optimum
    // is exactly the Farkas multiplier y_i (y >= 0, y^T G = 0, y^T h < 0).
    res.feasible = false;
    Eigen::VectorXd y(m);
    for (int i = 0; i < m; ++i) {
        double r = 0.0;
        for (int k = 0; k < m; ++k) r -= t.c(t.basis[static_cast<size_t>(k)]) * t.A(k, 2 * n + i);
        y(i) = r < 0.0 ? 0.0 : r;  // clamp roundoff
    }
    res.farkas_ray = y;
    return res;
}

std::optional<Eigen::VectorXd> lp_minimize(const Eigen::VectorXd& c, const Eigen::MatrixXd& G,
                                           const Eigen::VectorXd& h, double tol) {
    const int m = static_cast<int>(G.rows());
    const int n = static_cast<int>(G.cols());
    auto feas = lp_phase1(G, h, tol);
    if (!feas.feasible) return std::nullopt;
    if (m == 0) return std::nullopt;  // free minimum of a linear function: unbounded

    // Phase-2 on the slack formulation: variables x+, x-, s.
    const int nv = 2 * n + m;
    Tableau t;
    t.tol = tol;
    t.A = Eigen::MatrixXd::Zero(m, nv + m);  // extra artificials to seed the basis
    t.b = Eigen::VectorXd(m);
    t.c = Eigen::VectorXd::Zero(nv + m);
    t.basis.resize(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
        double rhs = h(i);
        int s = rhs >= 0 ? 1 : -1;
        for (int j = 0; j < n; ++j) {
            t.A(i, j) = s * G(i, j);
            t.A(i, n + j) = -s * G(i, j);
        }
        t.A(i, 2 * n + i) = s;
        t.A(i, nv + i) = 1.0;
        t.b(i) = s * rhs;
        t.basis[static_cast<size_t>(i)] = nv + i;
        t.c(nv + i) = 1.0;
    }
    if (!t.solve()) return std::nullopt;
    if (t.objective() > tol * (1.0 + h.cwiseAbs().maxCoeff())) return std::nullopt;

    // Swap in the real objective, forbid artificials, re-optimize.
    t.c.setZero();
    for (int j = 0; j < n; ++j) { t.c(j) = c(j); t.c(n + j) = -c(j); }
    for (int i = 0; i < m; ++i) t.c(nv + i) = 1e12;  // keep artificials out
    if (!t.solve()) return std::nullopt;  // unbounded

    Eigen::VectorXd z = Eigen::VectorXd::Zero(nv + m);
    for (int i = 0; i < m; ++i) z(t.basis[static_cast<size_t>(i)]) = t.b(i);
    return Eigen::VectorXd(z.head(n) - z.segment(n, n));
}

}  // namespace risitl
