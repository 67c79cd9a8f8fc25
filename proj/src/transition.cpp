#include "risitl/transition.hpp"

#include <cmath>
#include <stdexcept>

#include <limits>

#include "json.hpp"

namespace risitl {

std::vector<Eigen::MatrixXd> covariance_samples(const LinearSystem& sys, const Eigen::MatrixXd& K,
                                                const Eigen::MatrixXd& P0, double dt, int N) {
    const int n = sys.n();
    Eigen::MatrixXd A2 = covariance_generator(closed_loop(sys, K));
    const int nn = n * n;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nn + 1, nn + 1);
    M.topLeftCorner(nn, nn) = A2;
    M.block(0, nn, nn, 1) = Eigen::Map<const Eigen::VectorXd>(sys.Sigma.data(), nn);
    Eigen::MatrixXd E = expm(M * dt);
    Eigen::MatrixXd E11 = E.topLeftCorner(nn, nn);
    Eigen::VectorXd e12 = E.block(0, nn, nn, 1);

    std::vector<Eigen::MatrixXd> out;
    out.reserve(static_cast<size_t>(N) + 1);
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(P0.data(), nn);
    for (int i = 0; i <= N; ++i) {
        Eigen::MatrixXd P = Eigen::Map<const Eigen::MatrixXd>(v.data(), n, n);
        out.push_back(0.5 * (P + P.transpose()));
        if (i < N) v = E11 * v + e12;
    }
    return out;
}

QpProblem build_qp(const TimedTransitionProblem& prob) {
    const LinearSystem& sys = *prob.sys;
    const int n = sys.n();
    const int m = sys.m();
    const int N = prob.steps();
    if (N < 1) throw std::invalid_argument("build_qp: need at least one step");

    auto [Ad, Bd] = discretize(sys, prob.K, prob.dt);
    auto P = covariance_samples(sys, prob.K, prob.P0, prob.dt, N);

    // x(i) = Ad^i x0 + sum_{j<i} Ad^{i-1-j} Bd k[j]
    std::vector<Eigen::MatrixXd> Apow(static_cast<size_t>(N) + 1);
    Apow[0] = Eigen::MatrixXd::Identity(n, n);
    for (int i = 1; i <= N; ++i) Apow[static_cast<size_t>(i)] = Ad * Apow[static_cast<size_t>(i - 1)];

    const int nz = m * N;
    QpProblem qp;
    qp.H = Eigen::MatrixXd::Zero(nz, nz);
    for (int i = 0; i < N; ++i)
        qp.H.block(i * m, i * m, m, m) = 2.0 * prob.R + 1e-9 * Eigen::MatrixXd::Identity(m, m);
    qp.g = Eigen::VectorXd::Zero(nz);

    std::vector<Eigen::VectorXd> rows;
    std::vector<double> rhs;
    auto add_row = [&](const Eigen::VectorXd& c, double dd) {
        rows.push_back(c);
        rhs.push_back(dd);
    };

    // input box at every sample
    for (int i = 0; i < N; ++i)
        for (int a = 0; a < m; ++a) {
            Eigen::VectorXd c = Eigen::VectorXd::Zero(nz);
            c(i * m + a) = 1.0;
            add_row(c, -sys.k_min(a));   // k >= k_min
            c(i * m + a) = -1.0;
            add_row(c, sys.k_max(a));    // k <= k_max
        }

    // mean-sensitivity rows: coefficient of x(i) on z block j is Ad^{i-1-j} Bd
    auto region_rows = [&](const TightenedRegion& region, int i, const Eigen::MatrixXd& Pi,
                           double extra) {
        for (const auto& rr : region.rows()) {
            double beff = rr.b_eff(Pi, region.extra_offset() + extra);
            Eigen::VectorXd c = Eigen::VectorXd::Zero(nz);
            for (int j = 0; j < i && j < N; ++j) {
                Eigen::RowVectorXd blk =
                    rr.a.transpose() * Apow[static_cast<size_t>(i - 1 - j)] * Bd;
                c.segment(j * m, m) = blk.transpose();
            }
            double constant = rr.a.dot(Apow[static_cast<size_t>(i)] * prob.x0) + beff;
            add_row(c, constant);
        }
    };

    const double offset = prob.speed * prob.dt;
    for (int i = 0; i <= N - 1; ++i) {
        bool relaxed = i < prob.n_relax || i > N - prob.n_relax;
        region_rows(prob.S1, i, P[static_cast<size_t>(i)], relaxed ? 0.0 : offset);
    }
    region_rows(prob.S2, N, P[static_cast<size_t>(N)], 0.0);

    qp.C = Eigen::MatrixXd(static_cast<int>(rows.size()), nz);
    qp.d = Eigen::VectorXd(static_cast<int>(rows.size()));
    for (size_t i = 0; i < rows.size(); ++i) {
        qp.C.row(static_cast<int>(i)) = rows[i].transpose();
        qp.d(static_cast<int>(i)) = rhs[i];
    }
    return qp;
}

TransitionOutcome solve_transition(const TimedTransitionProblem& prob) {
    TransitionOutcome out;
    const LinearSystem& sys = *prob.sys;
    const int m = sys.m();
    const int N = prob.steps();

    TimedTransitionProblem attempt = prob;
    for (int round = 0; round < 2; ++round) {
        QpProblem qp = build_qp(attempt);
        QpResult r = solve_qp(qp, 500);
        if (r.status == QpStatus::Optimal) {
            TransitionSolution sol;
            sol.k = Eigen::MatrixXd(m, N);
            for (int i = 0; i < N; ++i) sol.k.col(i) = r.x.segment(i * m, m);
            auto [Ad, Bd] = discretize(sys, attempt.K, attempt.dt);
            sol.mean_path.push_back(attempt.x0);
            for (int i = 0; i < N; ++i)
                sol.mean_path.push_back(Ad * sol.mean_path.back() + Bd * sol.k.col(i));
            sol.cov_path = covariance_samples(sys, attempt.K, attempt.P0, attempt.dt, N);
            double cost = 0.0;
            for (int i = 0; i < N; ++i) cost += sol.k.col(i).dot(attempt.R * sol.k.col(i));
            sol.cost = cost;
            sol.diagnostics = std::move(r);
            out.feasible = true;
            out.solution = std::move(sol);
            return out;
        }
        if (r.status == QpStatus::IterationLimit) {
            out.iteration_limit = true;
            out.message = "solver iteration limit: " + r.message;
            return out;
        }
        out.infeasibility_certificate = r.farkas_ray;
        out.message = "infeasible";
        // Remark-5 workaround: drop the DT-tightening margin near the
        // endpoints once, then report failure honestly.
        if (attempt.n_relax > 0) break;
        attempt.n_relax = 3;
    }
    return out;
}

ContinuousCheck verify_continuous(const TimedTransitionProblem& prob,
                                  const TransitionSolution& sol, int oversample) {
    ContinuousCheck chk;
    // solver tolerance: active constraints sit numerically on the boundary
    const double tol = 1e-7;
    if (oversample < 1) throw std::invalid_argument("verify_continuous: oversample >= 1 required");
    const LinearSystem& sys = *prob.sys;
    const int N = prob.steps();
    const double h = prob.dt / oversample;
    auto [Af, Bf] = discretize(sys, prob.K, h);
    auto Pfine = covariance_samples(sys, prob.K, prob.P0, h, N * oversample);

    double worst1 = std::numeric_limits<double>::infinity();
    chk.ok = true;
    Eigen::VectorXd x = prob.x0;
    for (int i = 0; i < N * oversample; ++i) {
        double margin = prob.S1.margin(x, Pfine[static_cast<size_t>(i)]);
        if (margin < worst1) worst1 = margin;
        if (margin < -tol && chk.violation_time < 0) {
            chk.ok = false;
            chk.violation_time = i * h;
            chk.message = "left S1 during the dwell";
        }
        x = Af * x + Bf * sol.k.col(i / oversample);
    }
    chk.worst_margin_s1 = worst1;
    chk.worst_margin_s2 = prob.S2.margin(x, Pfine.back());
    if (chk.worst_margin_s2 < -tol) {
        chk.ok = false;
        if (chk.violation_time < 0) {
            chk.violation_time = prob.T;
            chk.message = "missed S2 at the transition time";
        }
    }
    return chk;
}

std::string dump_qp_json(const QpProblem& qp) {
    nlohmann::json j;
    j["n"] = qp.dim();
    j["num_ineq"] = qp.num_ineq();
    auto triplets = [](const Eigen::MatrixXd& M) {
        nlohmann::json t = nlohmann::json::array();
        for (int i = 0; i < M.rows(); ++i)
            for (int c = 0; c < M.cols(); ++c)
                if (M(i, c) != 0.0) t.push_back({i, c, M(i, c)});
        return t;
    };
    j["H"] = triplets(qp.H);
    j["g"] = std::vector<double>(qp.g.data(), qp.g.data() + qp.g.size());
    j["C"] = triplets(qp.C);
    j["d"] = std::vector<double>(qp.d.data(), qp.d.data() + qp.d.size());
    j["convention"] = "minimize 0.5 x'Hx + g'x subject to Cx + d >= 0";
    return j.dump(2);
}

}  // namespace risitl
