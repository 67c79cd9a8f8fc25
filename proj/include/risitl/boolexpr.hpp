#ifndef RISITL_BOOLEXPR_HPP
#define RISITL_BOOLEXPR_HPP

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace risitl {

/// Boolean combination over integer-identified variables, used for the
/// input/output labels of timed signal transducers. Immutable; smart
/// constructors fold constants.
class BoolExpr {
public:
    enum class Kind { True, False, Var, Not, And, Or };

    BoolExpr() : BoolExpr(tru()) {}

    static BoolExpr tru();
    static BoolExpr fls();
    static BoolExpr var(int id);
    static BoolExpr negate(const BoolExpr& e);
    static BoolExpr conj(const BoolExpr& a, const BoolExpr& b);
    static BoolExpr disj(const BoolExpr& a, const BoolExpr& b);
    static BoolExpr literal(const BoolExpr& e, bool positive) { return positive ? e : negate(e); }

    Kind kind() const { return node_->kind; }
    bool is_true() const { return node_->kind == Kind::True; }
    bool is_false() const { return node_->kind == Kind::False; }
    int var_id() const { return node_->var; }
    BoolExpr lhs() const { return BoolExpr(node_->lhs); }
    BoolExpr rhs() const { return BoolExpr(node_->rhs); }

    bool eval(const std::function<bool(int)>& assignment) const;

    /// Allocation-free evaluation against any callable.
    template <typename F>
    bool eval_with(const F& assignment) const {
        return eval_node_t(node_.get(), assignment);
    }

    /// Sorted distinct variable ids.
    std::vector<int> support() const;

    /// Partial evaluation of one variable.
    BoolExpr substitute(int id, bool value) const;

    /// Enumerates the (small) support.
    bool satisfiable() const;
    bool implies(const BoolExpr& other) const;
    bool equivalent(const BoolExpr& other) const;

    /// Calls f once per satisfying assignment of the support, passing
    /// parallel vectors (ids, values). Support sizes here stay tiny.
    void for_each_satisfying(
        const std::function<void(const std::vector<int>&, const std::vector<bool>&)>& f) const;

    std::string str(const std::function<std::string(int)>& name = nullptr) const;

private:
    struct Node {
        Kind kind;
        int var = -1;
        std::shared_ptr<const Node> lhs;
        std::shared_ptr<const Node> rhs;
    };
    explicit BoolExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    static bool eval_node(const Node* n, const std::function<bool(int)>& a);

    template <typename F>
    static bool eval_node_t(const Node* n, const F& a) {
        switch (n->kind) {
            case Kind::True: return true;
            case Kind::False: return false;
            case Kind::Var: return a(n->var);
            case Kind::Not: return !eval_node_t(n->lhs.get(), a);
            case Kind::And: return eval_node_t(n->lhs.get(), a) && eval_node_t(n->rhs.get(), a);
            case Kind::Or: return eval_node_t(n->lhs.get(), a) || eval_node_t(n->rhs.get(), a);
        }
        return false;
    }

    std::shared_ptr<const Node> node_;
};

}  // namespace risitl

#endif
