#include "risitl/risk.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "risitl/lp.hpp"

namespace risitl {

double tightening_factor(double eta) {
    if (!(eta > 0.0 && eta < 1.0)) throw std::domain_error("tightening_factor: eta outside (0,1)");
    return std::sqrt((1.0 - eta) / eta);
}

namespace {

// Symmetrize and verify psd with a -1e-10 eigenvalue floor.
Eigen::MatrixXd checked_psd(const Eigen::MatrixXd& P) {
    Eigen::MatrixXd S = 0.5 * (P + P.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10)
        throw std::domain_error("covariance is not positive semidefinite");
    return S;
}

double tighten_amount(const Eigen::VectorXd& a, double eta, const Eigen::MatrixXd& P) {
    Eigen::MatrixXd S = checked_psd(P);
    double q = a.dot(S * a);
    if (q < 0.0) q = 0.0;
    return tightening_factor(eta) * std::sqrt(q);
}

}  // namespace

std::pair<Eigen::VectorXd, double> tighten_halfspace(const Eigen::VectorXd& a, double b,
                                                     double eta, const Eigen::MatrixXd& P) {
    return {a, b - tighten_amount(a, eta, P)};
}

bool tightened_holds(const Eigen::VectorXd& a, double b, double eta, const Eigen::VectorXd& mean,
                     const Eigen::MatrixXd& P) {
    return a.dot(mean) + b - tighten_amount(a, eta, P) >= 0.0;
}

bool MeanBox::contains(const Eigen::VectorXd& x, double tol) const {
    for (int i = 0; i < dim(); ++i)
        if (x(i) < lo(i) - tol || x(i) > hi(i) + tol) return false;
    return true;
}

double RegionRow::b_eff(const Eigen::MatrixXd& P, double extra_offset) const {
    return b - sign * tighten_amount(a, eta, P) - extra_offset;
}

void TightenedRegion::add_literal(const PredicateTable& table, int idx, bool positive) {
    const Predicate& p = table.at(idx);
    RegionRow r;
    r.eta = p.eta;
    r.pred = idx;
    if (positive) {
        r.a = p.a;
        r.b = p.b;
        r.sign = +1;
    } else {
        r.a = -p.a;
        r.b = -p.b;
        r.sign = -1;
    }
    rows_.push_back(std::move(r));
}

std::vector<std::pair<Eigen::VectorXd, double>> TightenedRegion::halfspaces(
    const Eigen::MatrixXd& P) const {
    std::vector<std::pair<Eigen::VectorXd, double>> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_) out.emplace_back(r.a, -r.b_eff(P, extra_offset_));
    return out;
}

std::vector<std::pair<Eigen::VectorXd, double>> TightenedRegion::halfspaces(
    const std::vector<Eigen::MatrixXd>& per_row_P) const {
    if (per_row_P.size() != rows_.size())
        throw std::invalid_argument("halfspaces: per-row covariance count mismatch");
    std::vector<std::pair<Eigen::VectorXd, double>> out;
    out.reserve(rows_.size());
    for (size_t i = 0; i < rows_.size(); ++i)
        out.emplace_back(rows_[i].a, -rows_[i].b_eff(per_row_P[i], extra_offset_));
    return out;
}

bool TightenedRegion::contains(const Eigen::VectorXd& x, const Eigen::MatrixXd& P, double tol) const {
    return margin(x, P) >= -tol;
}

double TightenedRegion::margin(const Eigen::VectorXd& x, const Eigen::MatrixXd& P) const {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& r : rows_) {
        double m = r.a.dot(x) + r.b_eff(P, extra_offset_);
        if (m < worst) worst = m;
    }
    return worst;
}

TightenedRegion inner_offset(const TightenedRegion& r, double eps) {
    if (eps < 0.0) throw std::invalid_argument("inner_offset: eps must be nonnegative");
    TightenedRegion out = r;
    out.extra_offset_ += eps;
    return out;
}

namespace {

bool feasible_impl(const std::vector<std::pair<Eigen::VectorXd, double>>& halfspaces,
                   const MeanBox& box) {
    const int n = box.dim();
    const int m = static_cast<int>(halfspaces.size());
    Eigen::MatrixXd G(m + 2 * n, n);
    Eigen::VectorXd h(m + 2 * n);
    for (int i = 0; i < m; ++i) {
        // a^T x >= c  ->  -a^T x <= -c
        G.row(i) = -halfspaces[static_cast<size_t>(i)].first.transpose();
        h(i) = -halfspaces[static_cast<size_t>(i)].second;
    }
    for (int j = 0; j < n; ++j) {
        G.row(m + 2 * j).setZero();
        G(m + 2 * j, j) = 1.0;
        h(m + 2 * j) = box.hi(j);
        G.row(m + 2 * j + 1).setZero();
        G(m + 2 * j + 1, j) = -1.0;
        h(m + 2 * j + 1) = -box.lo(j);
    }
    return lp_phase1(G, h).feasible;
}

}  // namespace

bool region_feasible(const TightenedRegion& region, const Eigen::MatrixXd& P, const MeanBox& box) {
    return feasible_impl(region.halfspaces(P), box);
}

bool region_feasible(const TightenedRegion& region, const std::vector<Eigen::MatrixXd>& per_row_P,
                     const MeanBox& box) {
    return feasible_impl(region.halfspaces(per_row_P), box);
}

namespace {

Eigen::MatrixXd project_box(const Eigen::MatrixXd& P, const Eigen::MatrixXd& D) {
    Eigen::MatrixXd out = P;
    for (int i = 0; i < P.rows(); ++i)
        for (int j = 0; j < P.cols(); ++j) {
            if (out(i, j) < 0.0) out(i, j) = 0.0;
            if (out(i, j) > D(i, j)) out(i, j) = D(i, j);
        }
    return out;
}

Eigen::MatrixXd project_psd(const Eigen::MatrixXd& P) {
    Eigen::MatrixXd S = 0.5 * (P + P.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

bool is_axis(const Eigen::VectorXd& a, int* axis) {
    int nz = -1;
    for (int i = 0; i < a.size(); ++i) {
        if (std::abs(a(i)) > 1e-12) {
            if (nz >= 0) return false;
            nz = i;
        }
    }
    if (nz < 0) return false;
    *axis = nz;
    return true;
}

}  // namespace

std::vector<Eigen::MatrixXd> max_tightening_P(const std::vector<Eigen::VectorXd>& directions,
                                              const Eigen::MatrixXd& D) {
    if ((D.array() < -1e-12).any())
        throw std::invalid_argument("max_tightening_P: D must be componentwise nonnegative");
    std::vector<Eigen::MatrixXd> out;
    out.reserve(directions.size());
    const int n = static_cast<int>(D.rows());
    for (const auto& a : directions) {
        int axis = -1;
        if (is_axis(a, &axis)) {
            Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
            P(axis, axis) = D(axis, axis);
            out.push_back(P);
            continue;
        }
        // Projected ascent on the linear objective <a a^T, P> over box /\ psd.
        Eigen::MatrixXd grad = a * a.transpose();
        Eigen::MatrixXd P = project_psd(project_box(grad * D.norm(), D));
        double best = a.dot(P * a);
        Eigen::MatrixXd best_P = P;
        double step = D.maxCoeff();
        for (int it = 0; it < 200; ++it) {
            Eigen::MatrixXd cand = project_psd(project_box(P + step * grad, D));
            // keep iterates inside the box (psd projection can leave it)
            cand = project_box(cand, D);
            double v = a.dot(cand * a);
            if (v > best + 1e-12) {
                best = v;
                best_P = cand;
                P = cand;
            } else {
                step *= 0.5;
                if (step < 1e-9) break;
            }
        }
        out.push_back(project_psd(best_P));
    }
    return out;
}

}  // namespace risitl
