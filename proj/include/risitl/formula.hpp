#ifndef RISITL_FORMULA_HPP
#define RISITL_FORMULA_HPP

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "risitl/rational.hpp"

namespace risitl {

/// Linear risk predicate a^T x + b >= 0 held at risk level eta.
/// Normals are rescaled to unit length at table load; b rescales with them
/// so the tightening offsets read directly as Euclidean margins.
struct Predicate {
    std::string name;
    Eigen::VectorXd a;
    double b = 0.0;
    double eta = 0.5;
};

class PredicateTable {
public:
    /// Adds a predicate, rescaling (a, b) so that ||a||_2 = 1.
    /// Throws on zero normal, eta outside (0,1), or duplicate name.
    int add(const std::string& name, const Eigen::VectorXd& a, double b, double eta);

    int index_of(const std::string& name) const;       // -1 when absent
    const Predicate& at(int i) const { return preds_.at(static_cast<size_t>(i)); }
    int size() const { return static_cast<int>(preds_.size()); }
    const std::vector<Predicate>& all() const { return preds_; }

private:
    std::vector<Predicate> preds_;
};

/// Temporal operator interval with rational endpoints. The upper endpoint
/// may be +inf (unbounded). Singletons are rejected at construction.
struct FormulaInterval {
    Rational lo;
    Rational hi;
    bool lo_closed = true;
    bool hi_closed = true;
    bool unbounded = false;

    static FormulaInterval closed(const Rational& a, const Rational& b);
    static FormulaInterval make(const Rational& a, bool ac, const Rational& b, bool bc);
    static FormulaInterval ray(const Rational& a, bool ac);

    bool contains_zero() const { return lo.is_zero() && lo_closed; }
    std::string str() const;
    bool operator==(const FormulaInterval& o) const;
};

enum class FormulaKind {
    True,
    Atom,        // atom index into an external table (predicates or propositions)
    Not,
    And,
    Or,          // derived, removed by normalize
    Until,
    Eventually,  // derived
    Always,      // derived
    Periodic     // top-level extension: body holds at start + k*period
};

/// Immutable formula tree. Atoms carry an index into whatever table the
/// surrounding context supplies (predicates for RiSITL, propositions for
/// MITL); the shapes are otherwise identical.
class Formula {
public:
    using Ptr = std::shared_ptr<const Formula>;

    FormulaKind kind = FormulaKind::True;
    int atom = -1;
    FormulaInterval interval;
    Ptr lhs;
    Ptr rhs;
    Rational period_start;             // Periodic only
    Rational period;                   // Periodic only
    std::optional<long> repetitions;   // Periodic: nullopt = unbounded

    static Ptr mk_true();
    static Ptr mk_atom(int index);
    static Ptr mk_not(Ptr f);
    static Ptr mk_and(Ptr a, Ptr b);
    static Ptr mk_or(Ptr a, Ptr b);
    static Ptr mk_until(const FormulaInterval& i, Ptr a, Ptr b);
    static Ptr mk_eventually(const FormulaInterval& i, Ptr f);
    static Ptr mk_always(const FormulaInterval& i, Ptr f);
    static Ptr mk_periodic(const Rational& start, const Rational& period,
                           std::optional<long> reps, Ptr body);

    std::string str(const std::vector<std::string>* atom_names = nullptr) const;
};

bool structurally_equal(const Formula::Ptr& a, const Formula::Ptr& b);

struct ParseError : std::runtime_error {
    std::size_t position;
    ParseError(std::size_t pos, const std::string& msg)
        : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};

/// Parses the concrete syntax documented in the README against a declared
/// predicate table. Atom names must resolve; singleton intervals are errors.
Formula::Ptr parse_risitl(const std::string& text, const PredicateTable& table);

/// Rewrites to the core fragment {True, Atom, Not, And, Until}:
///   phi1 | phi2  ->  !(!phi1 & !phi2)
///   F_I phi      ->  True U_I phi
///   G_I phi      ->  !(True U_I !phi)
/// Periodic nodes keep their place with a normalized body.
Formula::Ptr normalize(const Formula::Ptr& f);

/// MITL abstraction: the tree with each distinct predicate replaced by a
/// fresh proposition, plus the proposition -> predicate bijection.
struct MitlFormula {
    Formula::Ptr root;
    int num_props = 0;
    std::vector<int> prop_to_pred;  // proposition i stands for predicate prop_to_pred[i]
};

MitlFormula abstract_to_mitl(const Formula::Ptr& f);

/// Substitutes predicates back for propositions (inverse of abstract_to_mitl).
Formula::Ptr substitute_predicates(const MitlFormula& mf);

/// Sum of nested interval upper bounds; nullopt when any is unbounded.
std::optional<Rational> horizon(const Formula::Ptr& f);

/// Expands Periodic nodes into finite conjunctions of shifted obligations,
/// using the node's own repetition count or `default_reps` when unbounded.
/// Non-periodic formulas are returned unchanged.
Formula::Ptr flatten_periodic(const Formula::Ptr& f, long default_reps);

}  // namespace risitl

#endif
