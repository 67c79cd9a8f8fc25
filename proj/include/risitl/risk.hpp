#ifndef RISITL_RISK_HPP
#define RISITL_RISK_HPP

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "risitl/formula.hpp"

namespace risitl {

/// Distributionally-robust tightening factor H = sqrt((1-eta)/eta).
/// Strictly decreasing in eta; H(0.5) = 1, H(0.1) = 3.
double tightening_factor(double eta);

/// Effective offset of a unit halfspace a^T x + b >= 0 tightened at
/// covariance P: b_eff = b - H(eta) * sqrt(a^T P a).
/// P is symmetrized and checked psd to a 1e-10 eigenvalue floor.
std::pair<Eigen::VectorXd, double> tighten_halfspace(const Eigen::VectorXd& a, double b,
                                                     double eta, const Eigen::MatrixXd& P);

/// DR-tightened membership test for one predicate at a belief state.
bool tightened_holds(const Eigen::VectorXd& a, double b, double eta, const Eigen::VectorXd& mean,
                     const Eigen::MatrixXd& P);

/// Componentwise mean bounds.
struct MeanBox {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;

    int dim() const { return static_cast<int>(lo.size()); }
    bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;
};

/// One halfspace of a tightened region. `sign` is +1 for a positive literal
/// and -1 for a negated one (the complement halfspace loosens with P instead
/// of shrinking). Membership at covariance P:
///     a^T x + b - sign * H(eta) * sqrt(a^T P a) - offset >= 0.
struct RegionRow {
    Eigen::VectorXd a;  // unit normal
    double b = 0.0;
    double eta = 0.5;
    int sign = +1;
    int pred = -1;  // source predicate index, -1 for synthetic rows

    double b_eff(const Eigen::MatrixXd& P, double extra_offset) const;
};

/// Conjunction of DR-tightened halfspaces, linear in the mean once P is
/// fixed. `extra_offset` is the uniform inner offset (the DT margin).
class TightenedRegion {
public:
    TightenedRegion() = default;
    explicit TightenedRegion(std::vector<RegionRow> rows) : rows_(std::move(rows)) {}

    void add_row(RegionRow r) { rows_.push_back(std::move(r)); }
    /// Adds predicate `idx` from the table as a positive or negated literal.
    void add_literal(const PredicateTable& table, int idx, bool positive);

    const std::vector<RegionRow>& rows() const { return rows_; }
    double extra_offset() const { return extra_offset_; }
    bool empty() const { return rows_.empty(); }

    /// Halfspace list (a_i, c_i) with membership a_i^T x >= c_i, at fixed P.
    std::vector<std::pair<Eigen::VectorXd, double>> halfspaces(const Eigen::MatrixXd& P) const;
    /// Per-row covariances (indexed like rows()); used by maximum tightening.
    std::vector<std::pair<Eigen::VectorXd, double>> halfspaces(
        const std::vector<Eigen::MatrixXd>& per_row_P) const;

    bool contains(const Eigen::VectorXd& x, const Eigen::MatrixXd& P, double tol = 1e-9) const;
    /// Worst (most violated) margin min_i a_i^T x - c_i at fixed P.
    double margin(const Eigen::VectorXd& x, const Eigen::MatrixXd& P) const;

    friend TightenedRegion inner_offset(const TightenedRegion& r, double eps);

private:
    std::vector<RegionRow> rows_;
    double extra_offset_ = 0.0;
};

/// Phase-1 LP feasibility of a tightened region intersected with the mean
/// box, at fixed covariance P (one P for all rows).
bool region_feasible(const TightenedRegion& region, const Eigen::MatrixXd& P, const MeanBox& box);

/// Same with a per-row covariance choice (maximum-tightening pruning).
bool region_feasible(const TightenedRegion& region, const std::vector<Eigen::MatrixXd>& per_row_P,
                     const MeanBox& box);

/// Uniform inward offset by eps >= 0 of every halfspace. Offsets compose
/// additively: inner_offset(inner_offset(r, e1), e2) = inner_offset(r, e1+e2).
TightenedRegion inner_offset(const TightenedRegion& r, double eps);

/// Per-predicate worst-case covariance: maximize a_i^T P a_i subject to
/// 0 <= vec(P) <= D componentwise and P psd. Axis-aligned directions solve
/// in closed form; the general case runs projected ascent to tolerance 1e-7.
std::vector<Eigen::MatrixXd> max_tightening_P(const std::vector<Eigen::VectorXd>& directions,
                                              const Eigen::MatrixXd& D);

}  // namespace risitl

#endif
