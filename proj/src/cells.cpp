#include "risitl/cells.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "risitl/lp.hpp"

namespace risitl {

namespace {

bool raw_sign(const Predicate& p, const Eigen::VectorXd& x) { return p.a.dot(x) + p.b >= 0.0; }

}  // namespace

CellComplex::CellComplex(const PredicateTable& table, std::vector<int> tracked,
                         std::vector<int> env, const MeanBox& box)
    : table_(&table), tracked_(std::move(tracked)), env_(std::move(env)), box_(box) {
    const int k = static_cast<int>(tracked_.size());
    if (k > 20) throw std::invalid_argument("cell complex: too many tracked predicates");
    Eigen::MatrixXd P0 = Eigen::MatrixXd::Zero(box_.dim(), box_.dim());
    for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
        std::vector<bool> s(static_cast<size_t>(k));
        for (int i = 0; i < k; ++i) s[static_cast<size_t>(i)] = (mask >> i) & 1;
        TightenedRegion r;
        for (int i = 0; i < k; ++i)
            r.add_literal(*table_, tracked_[static_cast<size_t>(i)], s[static_cast<size_t>(i)]);
        for (int e : env_) r.add_literal(*table_, e, true);
        if (region_feasible(r, P0, box_)) {
            signs_.push_back(std::move(s));
        }
    }
    adj_.resize(signs_.size());
    for (int a = 0; a < num_cells(); ++a)
        for (int b = a + 1; b < num_cells(); ++b) {
            int diff = -1;
            bool single = true;
            for (int i = 0; i < k && single; ++i) {
                if (signs_[static_cast<size_t>(a)][static_cast<size_t>(i)] !=
                    signs_[static_cast<size_t>(b)][static_cast<size_t>(i)]) {
                    if (diff >= 0) single = false;
                    diff = i;
                }
            }
            if (!single || diff < 0) continue;
            // shared facet: the flipped predicate at equality, the rest as in a
            TightenedRegion facet;
            const Predicate& fp = table_->at(tracked_[static_cast<size_t>(diff)]);
            facet.add_row({fp.a, fp.b, fp.eta, 0, tracked_[static_cast<size_t>(diff)]});
            facet.add_row({-fp.a, -fp.b, fp.eta, 0, tracked_[static_cast<size_t>(diff)]});
            for (int i = 0; i < k; ++i) {
                if (i == diff) continue;
                facet.add_literal(*table_, tracked_[static_cast<size_t>(i)],
                                  signs_[static_cast<size_t>(a)][static_cast<size_t>(i)]);
            }
            for (int e : env_) facet.add_literal(*table_, e, true);
            if (region_feasible(facet, Eigen::MatrixXd::Zero(box_.dim(), box_.dim()), box_)) {
                adj_[static_cast<size_t>(a)].push_back(b);
                adj_[static_cast<size_t>(b)].push_back(a);
            }
        }
}

int CellComplex::flipped_predicate(int a, int b) const {
    for (size_t i = 0; i < tracked_.size(); ++i)
        if (signs_[static_cast<size_t>(a)][i] != signs_[static_cast<size_t>(b)][i])
            return static_cast<int>(i);
    return -1;
}

TightenedRegion CellComplex::region(int cell) const {
    TightenedRegion r;
    for (size_t i = 0; i < tracked_.size(); ++i)
        r.add_literal(*table_, tracked_[i], signs_[static_cast<size_t>(cell)][i]);
    for (int e : env_) r.add_literal(*table_, e, true);
    return r;
}

TightenedRegion CellComplex::facet_region(int a, int b) const {
    int diff = flipped_predicate(a, b);
    if (diff < 0) throw std::invalid_argument("facet_region: cells are not adjacent");
    TightenedRegion r;
    for (size_t i = 0; i < tracked_.size(); ++i) {
        if (static_cast<int>(i) == diff) continue;
        r.add_literal(*table_, tracked_[i], signs_[static_cast<size_t>(a)][i]);
    }
    for (int e : env_) r.add_literal(*table_, e, true);
    return r;
}

int CellComplex::cell_containing_raw(const Eigen::VectorXd& x) const {
    if (!box_.contains(x, 1e-9)) return -1;
    for (int c = 0; c < num_cells(); ++c) {
        bool ok = true;
        for (size_t i = 0; i < tracked_.size() && ok; ++i)
            if (raw_sign(table_->at(tracked_[i]), x) != signs_[static_cast<size_t>(c)][i]) ok = false;
        if (ok) return c;
    }
    return -1;
}

int CellComplex::cell_containing(const Eigen::VectorXd& x, const Eigen::MatrixXd& P) const {
    for (int c = 0; c < num_cells(); ++c) {
        bool ok = true;
        for (size_t i = 0; i < tracked_.size() && ok; ++i) {
            const Predicate& p = table_->at(tracked_[i]);
            if (tightened_holds(p.a, p.b, p.eta, x, P) != signs_[static_cast<size_t>(c)][i])
                ok = false;
        }
        if (ok) return c;
    }
    return -1;
}

bool CellComplex::matches(int cell, const std::vector<int>& props,
                          const std::vector<bool>& values) const {
    for (size_t i = 0; i < props.size(); ++i) {
        int t = props[i];
        if (t < 0 || t >= static_cast<int>(tracked_.size())) continue;
        if (signs_[static_cast<size_t>(cell)][static_cast<size_t>(t)] != values[i]) return false;
    }
    return true;
}

std::vector<double> covariance_guard(const TightenedRegion& region, int dim) {
    std::vector<double> out(static_cast<size_t>(dim), std::numeric_limits<double>::infinity());
    // classify rows as +-axis with shrink coefficient H (sign +1 rows shrink)
    struct AxisRow {
        int axis;
        bool positive;  // a = +e_axis
        double b;
        double coeff;  // sign * H(eta); negative rows loosen
    };
    std::vector<AxisRow> rows;
    for (const auto& r : region.rows()) {
        int axis = -1;
        for (int i = 0; i < r.a.size(); ++i) {
            if (std::abs(std::abs(r.a(i)) - 1.0) < 1e-9) {
                if (axis >= 0) { axis = -2; break; }
                axis = i;
            } else if (std::abs(r.a(i)) > 1e-9) {
                axis = -2;
                break;
            }
        }
        if (axis < 0) continue;  // general direction: vacuous for the guard
        rows.push_back({axis, r.a(axis) > 0, r.b, r.sign * tightening_factor(r.eta)});
    }
    for (int d = 0; d < dim; ++d) {
        for (const auto& lo : rows) {
            if (lo.axis != d || !lo.positive) continue;
            for (const auto& hi : rows) {
                if (hi.axis != d || hi.positive) continue;
                // x >= -lo.b + lo.coeff*s  and  x <= hi.b - hi.coeff*s, s = sqrt(P_dd)
                double denom = lo.coeff + hi.coeff;
                if (denom <= 1e-12) continue;  // loosening pair never empties
                double width = lo.b + hi.b;
                double s_max = width / denom;
                double bound = s_max <= 0 ? 0.0 : s_max * s_max;
                out[static_cast<size_t>(d)] = std::min(out[static_cast<size_t>(d)], bound);
            }
        }
    }
    return out;
}

}  // namespace risitl
