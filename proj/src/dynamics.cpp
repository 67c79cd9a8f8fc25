#include "risitl/dynamics.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <stdexcept>

namespace risitl {

Eigen::MatrixXd expm(const Eigen::MatrixXd& A) {
    const int n = static_cast<int>(A.rows());
    if (A.cols() != n) throw std::invalid_argument("expm: square matrix required");

    // Pade order 13 coefficients.
    static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                               1187353796428800.0,  129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,       1323241920.0,
                               40840800.0,          960960.0,            16380.0,
                               182.0,               1.0};

    double norm = A.cwiseAbs().rowwise().sum().maxCoeff();  // infinity norm
    int squarings = 0;
    const double theta13 = 5.371920351148152;
    Eigen::MatrixXd As = A;
    if (norm > theta13) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
        As /= std::pow(2.0, squarings);
    }

    Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd A2 = As * As;
    Eigen::MatrixXd A4 = A2 * A2;
    Eigen::MatrixXd A6 = A2 * A4;
    Eigen::MatrixXd U =
        As * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 + b[3] * A2 +
              b[1] * I);
    Eigen::MatrixXd V =
        A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;

    Eigen::MatrixXd R = (V - U).partialPivLu().solve(V + U);
    for (int i = 0; i < squarings; ++i) R = R * R;
    return R;
}

Eigen::MatrixXd closed_loop(const LinearSystem& sys, const Eigen::MatrixXd& K) {
    if (K.rows() != sys.m() || K.cols() != sys.n())
        throw std::invalid_argument("gain K has wrong dimensions");
    return sys.A + sys.B * K;
}

Eigen::MatrixXd covariance_generator(const Eigen::MatrixXd& Abar) {
    const int n = static_cast<int>(Abar.rows());
    Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    return Eigen::kroneckerProduct(I, Abar) + Eigen::kroneckerProduct(Abar, I);
}

bool is_hurwitz(const Eigen::MatrixXd& M, double margin) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(M);
    return es.eigenvalues().real().maxCoeff() < -margin;
}

namespace {

Eigen::VectorXd vec(const Eigen::MatrixXd& M) {
    return Eigen::Map<const Eigen::VectorXd>(M.data(), M.size());
}

Eigen::MatrixXd unvec(const Eigen::VectorXd& v, int n) {
    return Eigen::Map<const Eigen::MatrixXd>(v.data(), n, n);
}

}  // namespace

Eigen::MatrixXd propagate_covariance(const LinearSystem& sys, const Eigen::MatrixXd& K,
                                     const Eigen::MatrixXd& P0, double t) {
    const int n = sys.n();
    if (t == 0.0) return 0.5 * (P0 + P0.transpose());
    Eigen::MatrixXd A2 = covariance_generator(closed_loop(sys, K));
    const int N = n * n;
    // Augmented exponential integrates the constant forcing vec(Sigma):
    // exp([[A2, s],[0,0]] t) top-right block = \int_0^t exp(A2 u) du s.
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N + 1, N + 1);
    M.topLeftCorner(N, N) = A2;
    M.block(0, N, N, 1) = vec(sys.Sigma);
    Eigen::MatrixXd E = expm(M * t);
    Eigen::VectorXd v = E.topLeftCorner(N, N) * vec(P0) + E.block(0, N, N, 1);
    Eigen::MatrixXd P = unvec(v, n);
    return 0.5 * (P + P.transpose());
}

Eigen::MatrixXd steady_state_covariance(const LinearSystem& sys, const Eigen::MatrixXd& K) {
    Eigen::MatrixXd Abar = closed_loop(sys, K);
    if (!is_hurwitz(Abar)) throw std::domain_error("steady_state_covariance: gain is not stabilizing");
    const int n = sys.n();
    Eigen::MatrixXd A2 = covariance_generator(Abar);
    Eigen::VectorXd rhs = -vec(sys.Sigma);
    Eigen::VectorXd v = A2.fullPivLu().solve(rhs);
    Eigen::MatrixXd P = unvec(v, n);
    P = 0.5 * (P + P.transpose());
    double residual = (Abar * P + P * Abar.transpose() + sys.Sigma).norm();
    if (residual > 1e-10 * std::max(1.0, sys.Sigma.norm()))
        throw std::runtime_error("steady_state_covariance: Lyapunov residual " +
                                 std::to_string(residual));
    return P;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> discretize(const LinearSystem& sys,
                                                       const Eigen::MatrixXd& K, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("discretize: dt must be positive");
    const int n = sys.n();
    const int m = sys.m();
    Eigen::MatrixXd Abar = closed_loop(sys, K);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n + m, n + m);
    M.topLeftCorner(n, n) = Abar;
    M.topRightCorner(n, m) = sys.B;
    Eigen::MatrixXd E = expm(M * dt);
    return {E.topLeftCorner(n, n), E.topRightCorner(n, m)};
}

namespace {

// Enumerate box vertices, calling f with each corner vector.
template <typename F>
void for_each_vertex(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, F&& f) {
    const int d = static_cast<int>(lo.size());
    Eigen::VectorXd x(d);
    for (std::uint64_t mask = 0; mask < (1ull << d); ++mask) {
        for (int i = 0; i < d; ++i) x(i) = (mask >> i) & 1 ? hi(i) : lo(i);
        f(x);
    }
}

}  // namespace

double speed_bound(const LinearSystem& sys, const Eigen::MatrixXd& K) {
    const int n = sys.n();
    const int m = sys.m();
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(sys.mean_box.lo(i)) || !std::isfinite(sys.mean_box.hi(i)))
            throw std::invalid_argument("speed_bound: mean box must be finite");
    }
    Eigen::MatrixXd Abar = closed_loop(sys, K);
    Eigen::MatrixXd A2 = covariance_generator(Abar);
    Eigen::VectorXd sig = vec(sys.Sigma);
    Eigen::VectorXd dvec = vec(sys.D);
    if ((dvec.array() < 0).any()) throw std::invalid_argument("speed_bound: D must be nonnegative");

    // xdot_mean = Abar x + B k ; xdot_cov = A2 vec(P) + vec(Sigma).
    // The norm is convex, so the max over the product box sits at a vertex.
    if (n <= 3) {
        double best = 0.0;
        for_each_vertex(sys.mean_box.lo, sys.mean_box.hi, [&](const Eigen::VectorXd& x) {
            for_each_vertex(Eigen::VectorXd::Zero(n * n), dvec, [&](const Eigen::VectorXd& p) {
                for_each_vertex(sys.k_min, sys.k_max, [&](const Eigen::VectorXd& k) {
                    double sq = (Abar * x + sys.B * k).squaredNorm() + (A2 * p + sig).squaredNorm();
                    if (sq > best) best = sq;
                });
            });
        });
        return std::sqrt(best);
    }

    // Interval bound: per-component |row| * max(|lo|,|hi|) style envelope.
    auto row_bound = [](const Eigen::MatrixXd& M, const Eigen::VectorXd& lo,
                        const Eigen::VectorXd& hi) {
        Eigen::VectorXd out(M.rows());
        for (int i = 0; i < M.rows(); ++i) {
            double s = 0.0;
            for (int j = 0; j < M.cols(); ++j)
                s += std::abs(M(i, j)) * std::max(std::abs(lo(j)), std::abs(hi(j)));
            out(i) = s;
        }
        return out;
    };
    Eigen::VectorXd mean_part = row_bound(Abar, sys.mean_box.lo, sys.mean_box.hi) +
                                row_bound(sys.B, sys.k_min, sys.k_max);
    Eigen::VectorXd cov_part =
        row_bound(A2, Eigen::VectorXd::Zero(n * n), dvec) + sig.cwiseAbs();
    return std::sqrt(mean_part.squaredNorm() + cov_part.squaredNorm());
}

GainCheck check_gain(const LinearSystem& sys, const Eigen::MatrixXd& K, double m_max) {
    GainCheck r;
    if (K.rows() != sys.m() || K.cols() != sys.n())
        throw std::invalid_argument("check_gain: K has wrong dimensions");
    Eigen::MatrixXd Abar = closed_loop(sys, K);
    Eigen::EigenSolver<Eigen::MatrixXd> es(Abar);
    r.max_real_eig = es.eigenvalues().real().maxCoeff();
    r.hurwitz = r.max_real_eig < 0.0;
    if (r.hurwitz) {
        Eigen::MatrixXd Pinf = steady_state_covariance(sys, K);
        r.covariance_within_D = true;
        for (int i = 0; i < sys.n() && r.covariance_within_D; ++i)
            for (int j = 0; j < sys.n(); ++j)
                if (std::abs(Pinf(i, j)) > sys.D(i, j) + 1e-12) {
                    r.covariance_within_D = false;
                    r.detail = "steady-state covariance exceeds D at (" + std::to_string(i) + "," +
                               std::to_string(j) + ")";
                    break;
                }
        r.speed = speed_bound(sys, K);
        r.speed_within_limit = r.speed <= m_max;
        if (!r.speed_within_limit) r.detail = "speed bound " + std::to_string(r.speed) + " exceeds limit";
    } else {
        r.detail = "closed loop not Hurwitz (max Re eig = " + std::to_string(r.max_real_eig) + ")";
    }
    r.ok = r.hurwitz && r.covariance_within_D && r.speed_within_limit;
    return r;
}

}  // namespace risitl
