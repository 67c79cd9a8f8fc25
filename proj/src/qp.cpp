#include "risitl/qp.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "risitl/lp.hpp"

namespace risitl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Rank-one updates of the Goldfarb-Idnani factorization. J = L^{-T} Q with
// H = L L^T; R is the upper-triangular factor of the active normals in the
// transformed space.
struct GiWork {
    int n = 0;
    Eigen::MatrixXd J;
    Eigen::MatrixXd R;
    std::vector<int> active;

    int q() const { return static_cast<int>(active.size()); }

    // Reduce d (= J^T n_p) so that components below q+1 vanish, rotating J.
    void householder_step(Eigen::VectorXd& dv) {
        for (int j = n - 1; j > q(); --j) {
            double a = dv(j - 1), b = dv(j);
            if (std::abs(b) < 1e-300) continue;
            double r = std::hypot(a, b);
            double c = a / r, s = b / r;
            dv(j - 1) = r;
            dv(j) = 0.0;
            for (int i = 0; i < n; ++i) {
                double t1 = J(i, j - 1), t2 = J(i, j);
                J(i, j - 1) = c * t1 + s * t2;
                J(i, j) = -s * t1 + c * t2;
            }
        }
    }

    void add_constraint(const Eigen::VectorXd& dv, int idx) {
        for (int i = 0; i < q(); ++i) R(i, q()) = dv(i);
        R(q(), q()) = dv(q());
        active.push_back(idx);
    }

    void delete_constraint(int k) {
        active.erase(active.begin() + k);
        // shift columns of R left and re-triangularize with Givens rotations
        int m = q();
        for (int j = k; j < m; ++j)
            for (int i = 0; i <= j + 1 && i < n; ++i) R(i, j) = R(i, j + 1);
        for (int j = k; j < m; ++j) {
            double a = R(j, j), b = R(j + 1, j);
            if (std::abs(b) < 1e-300) continue;
            double r = std::hypot(a, b);
            double c = a / r, s = b / r;
            for (int col = j; col < m; ++col) {
                double t1 = R(j, col), t2 = R(j + 1, col);
                R(j, col) = c * t1 + s * t2;
                R(j + 1, col) = -s * t1 + c * t2;
            }
            // rotate the corresponding columns of J
            for (int i = 0; i < n; ++i) {
                double t1 = J(i, j), t2 = J(i, j + 1);
                J(i, j) = c * t1 + s * t2;
                J(i, j + 1) = -s * t1 + c * t2;
            }
        }
    }
};

Eigen::VectorXd farkas_from_lp(const QpProblem& qp) {
    // feasibility of C x + d >= 0  <->  (-C) x <= d
    return lp_phase1(-qp.C, qp.d).farkas_ray;
}

}  // namespace

QpResult solve_qp_active_set(const QpProblem& qp, double tol) {
    const int n = qp.dim();
    const int m = qp.num_ineq();
    QpResult res;

    Eigen::LLT<Eigen::MatrixXd> llt(qp.H);
    if (llt.info() != Eigen::Success) {
        res.status = QpStatus::IterationLimit;
        res.message = "objective not positive definite";
        return res;
    }

    GiWork w;
    w.n = n;
    // J = L^{-T}
    w.J = llt.matrixL().solve(Eigen::MatrixXd::Identity(n, n)).transpose();
    w.R = Eigen::MatrixXd::Zero(n, std::max(n, 1));

    Eigen::VectorXd x = -llt.solve(qp.g);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(m);  // multipliers by constraint index
    std::vector<char> in_active(static_cast<size_t>(m), 0);

    const int max_iter = 50 * (m + n) + 1000;
    int iter = 0;

    double scale = 1.0 + qp.g.norm();

    while (true) {
        if (++iter > max_iter) {
            res.status = QpStatus::IterationLimit;
            res.message = "active-set iteration limit";
            return res;
        }
        // most violated inactive constraint
        int p = -1;
        double worst = -tol * scale - 1e-12;
        for (int i = 0; i < m; ++i) {
            if (in_active[static_cast<size_t>(i)]) continue;
            double s = qp.C.row(i).dot(x) + qp.d(i);
            if (s < worst) {
                worst = s;
                p = i;
            }
        }
        if (p < 0) break;  // primal feasible: done

        Eigen::VectorXd np = qp.C.row(p).transpose();
        double up = 0.0;

        while (true) {
            if (++iter > max_iter) {
                res.status = QpStatus::IterationLimit;
                res.message = "active-set iteration limit";
                return res;
            }
            Eigen::VectorXd dv = w.J.transpose() * np;
            w.householder_step(dv);
            int q = w.q();
            // primal step direction
            Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
            if (q < n) z = w.J.col(q) * dv(q);
            // dual step direction r = R^{-1} dv[0..q)
            Eigen::VectorXd r;
            if (q > 0)
                r = w.R.topLeftCorner(q, q)
                        .triangularView<Eigen::Upper>()
                        .solve(dv.head(q));

            double t1 = kInf;
            int k_drop = -1;
            for (int i = 0; i < q; ++i) {
                if (r(i) > tol) {
                    double ratio = u(w.active[static_cast<size_t>(i)]) / r(i);
                    if (ratio < t1) {
                        t1 = ratio;
                        k_drop = i;
                    }
                }
            }
            double ztnp = z.dot(np);
            double s_p = qp.C.row(p).dot(x) + qp.d(p);
            double t2 = std::abs(ztnp) > tol ? -s_p / ztnp : kInf;
            double t = std::min(t1, t2);

            if (t >= kInf) {
                res.status = QpStatus::Infeasible;
                res.farkas_ray = farkas_from_lp(qp);
                res.message = "constraints inconsistent";
                return res;
            }

            if (t2 >= kInf) {
                // dual-only step
                for (int i = 0; i < q; ++i) u(w.active[static_cast<size_t>(i)]) -= t * r(i);
                up += t;
                in_active[static_cast<size_t>(w.active[static_cast<size_t>(k_drop)])] = 0;
                w.delete_constraint(k_drop);
                continue;
            }

            x += t * z;
            for (int i = 0; i < q; ++i) u(w.active[static_cast<size_t>(i)]) -= t * r(i);
            up += t;

            if (t == t2) {
                u(p) = up;
                w.add_constraint(dv, p);
                in_active[static_cast<size_t>(p)] = 1;
                break;
            }
            in_active[static_cast<size_t>(w.active[static_cast<size_t>(k_drop)])] = 0;
            w.delete_constraint(k_drop);
        }
    }

    res.status = QpStatus::Optimal;
    res.x = x;
    res.lambda = u;
    res.cost = 0.5 * x.dot(qp.H * x) + qp.g.dot(x);
    res.iterations = iter;
    fill_kkt_residuals(qp, res);
    return res;
}

QpResult solve_qp_admm(const QpProblem& qp, double tol, int max_iter) {
    const int n = qp.dim();
    const int m = qp.num_ineq();
    QpResult res;

    // minimize 1/2 x'Hx + g'x  s.t.  s = Cx + d, s >= 0
    double rho = 10.0;
    const double sigma = 1e-6;
    Eigen::MatrixXd K = qp.H + sigma * Eigen::MatrixXd::Identity(n, n) +
                        rho * qp.C.transpose() * qp.C;
    Eigen::LLT<Eigen::MatrixXd> kkt(K);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd s = (qp.C * x + qp.d).cwiseMax(0.0);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m);

    int iter = 0;
    for (; iter < max_iter; ++iter) {
        Eigen::VectorXd rhs =
            -qp.g + sigma * x + qp.C.transpose() * (rho * (s - qp.d) - y);
        x = kkt.solve(rhs);
        Eigen::VectorXd cx = qp.C * x + qp.d;
        Eigen::VectorXd s_new = (cx + y / rho).cwiseMax(0.0);
        y += rho * (cx - s_new);
        s = s_new;
        if (iter % 25 == 0) {
            double prim = (cx - s).lpNorm<Eigen::Infinity>();
            Eigen::VectorXd lam = (-y).cwiseMax(0.0);
            double stat = (qp.H * x + qp.g - qp.C.transpose() * lam).lpNorm<Eigen::Infinity>();
            if (prim < tol && stat < tol * (1.0 + qp.g.norm())) break;
        }
    }
    Eigen::VectorXd viol = qp.C * x + qp.d;
    if (viol.minCoeff() < -1e-4) {
        // likely infeasible; certify through the LP
        auto f = lp_phase1(-qp.C, qp.d);
        if (!f.feasible) {
            res.status = QpStatus::Infeasible;
            res.farkas_ray = f.farkas_ray;
            res.message = "constraints inconsistent";
            return res;
        }
    }
    res.status = iter >= max_iter ? QpStatus::IterationLimit : QpStatus::Optimal;
    res.x = x;
    res.lambda = (-y).cwiseMax(0.0);
    res.cost = 0.5 * x.dot(qp.H * x) + qp.g.dot(x);
    res.iterations = iter;
    fill_kkt_residuals(qp, res);
    return res;
}

QpResult solve_qp(const QpProblem& qp, int dense_limit) {
    if (qp.dim() <= dense_limit) {
        QpResult r = solve_qp_active_set(qp);
        if (r.status != QpStatus::IterationLimit) return r;
        return solve_qp_admm(qp);
    }
    return solve_qp_admm(qp);
}

void fill_kkt_residuals(const QpProblem& qp, QpResult& r) {
    if (r.x.size() == 0) return;
    Eigen::VectorXd lam = r.lambda.size() ? r.lambda : Eigen::VectorXd::Zero(qp.num_ineq());
    Eigen::VectorXd grad = qp.H * r.x + qp.g - qp.C.transpose() * lam;
    r.kkt_stationarity = qp.dim() ? grad.lpNorm<Eigen::Infinity>() : 0.0;
    Eigen::VectorXd slack = qp.C * r.x + qp.d;
    r.kkt_primal = qp.num_ineq() ? std::max(0.0, -slack.minCoeff()) : 0.0;
    double comp = 0.0;
    for (int i = 0; i < qp.num_ineq(); ++i) comp = std::max(comp, std::abs(lam(i) * slack(i)));
    r.kkt_slackness = comp;
}

}  // namespace risitl
