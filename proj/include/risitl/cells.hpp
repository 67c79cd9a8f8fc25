#ifndef RISITL_CELLS_HPP
#define RISITL_CELLS_HPP

#include <vector>

#include "risitl/risk.hpp"

namespace risitl {

/// Sign-vector cells of the predicate arrangement inside the mean box.
/// A cell fixes every tracked predicate's truth value; adjacency connects
/// cells across a single shared facet. Environment rows (predicates that
/// every region must satisfy) do not split cells; they are conjoined into
/// every cell region.
class CellComplex {
public:
    /// `tracked` lists the predicate indices that define cells (the ones the
    /// formula mentions); `env` lists always-on predicate indices.
    CellComplex(const PredicateTable& table, std::vector<int> tracked, std::vector<int> env,
                const MeanBox& box);

    int num_cells() const { return static_cast<int>(signs_.size()); }
    const std::vector<bool>& signs(int cell) const { return signs_[static_cast<size_t>(cell)]; }
    const std::vector<int>& neighbors(int cell) const { return adj_[static_cast<size_t>(cell)]; }
    const std::vector<int>& tracked() const { return tracked_; }

    /// Predicate whose sign flips between two adjacent cells.
    int flipped_predicate(int a, int b) const;

    /// Region of a cell: tracked literals plus the environment rows.
    TightenedRegion region(int cell) const;
    /// Region of the facet between adjacent cells: both cells' shared
    /// literals, environment rows, and the flipped predicate free.
    TightenedRegion facet_region(int a, int b) const;

    /// Cell whose raw (untightened) signs match x; -1 if outside the box.
    int cell_containing_raw(const Eigen::VectorXd& x) const;
    /// Cell matching the DR-tightened truth values at (x, P); -1 if none.
    int cell_containing(const Eigen::VectorXd& x, const Eigen::MatrixXd& P) const;

    /// True when the cell's tracked signs agree with the given partial
    /// assignment (prop index into `tracked` order -> value).
    bool matches(int cell, const std::vector<int>& props, const std::vector<bool>& values) const;

    const MeanBox& box() const { return box_; }
    const PredicateTable& table() const { return *table_; }
    const std::vector<int>& env() const { return env_; }

private:
    const PredicateTable* table_;
    std::vector<int> tracked_;
    std::vector<int> env_;
    MeanBox box_;
    std::vector<std::vector<bool>> signs_;
    std::vector<std::vector<int>> adj_;
};

/// Axis-aligned nonemptiness thresholds of a region: the largest diagonal
/// covariance entries for which the tightened region stays nonempty,
/// per axis (infinity when no facing pair constrains an axis). General
/// (non-rectangular) rows make the guard vacuous for that axis.
std::vector<double> covariance_guard(const TightenedRegion& region, int dim);

}  // namespace risitl

#endif
