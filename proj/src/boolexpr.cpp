#include "risitl/boolexpr.hpp"

#include <algorithm>
#include <stdexcept>

namespace risitl {

BoolExpr BoolExpr::tru() {
    static const auto n = [] {
        auto p = std::make_shared<Node>();
        p->kind = Kind::True;
        return p;
    }();
    return BoolExpr(n);
}

BoolExpr BoolExpr::fls() {
    static const auto n = [] {
        auto p = std::make_shared<Node>();
        p->kind = Kind::False;
        return p;
    }();
    return BoolExpr(n);
}

BoolExpr BoolExpr::var(int id) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Var;
    n->var = id;
    return BoolExpr(std::move(n));
}

BoolExpr BoolExpr::negate(const BoolExpr& e) {
    if (e.is_true()) return fls();
    if (e.is_false()) return tru();
    if (e.kind() == Kind::Not) return BoolExpr(e.node_->lhs);
    auto n = std::make_shared<Node>();
    n->kind = Kind::Not;
    n->lhs = e.node_;
    return BoolExpr(std::move(n));
}

BoolExpr BoolExpr::conj(const BoolExpr& a, const BoolExpr& b) {
    if (a.is_false() || b.is_false()) return fls();
    if (a.is_true()) return b;
    if (b.is_true()) return a;
    auto n = std::make_shared<Node>();
    n->kind = Kind::And;
    n->lhs = a.node_;
    n->rhs = b.node_;
    return BoolExpr(std::move(n));
}

BoolExpr BoolExpr::disj(const BoolExpr& a, const BoolExpr& b) {
    if (a.is_true() || b.is_true()) return tru();
    if (a.is_false()) return b;
    if (b.is_false()) return a;
    auto n = std::make_shared<Node>();
    n->kind = Kind::Or;
    n->lhs = a.node_;
    n->rhs = b.node_;
    return BoolExpr(std::move(n));
}

bool BoolExpr::eval_node(const Node* n, const std::function<bool(int)>& a) {
    switch (n->kind) {
        case Kind::True: return true;
        case Kind::False: return false;
        case Kind::Var: return a(n->var);
        case Kind::Not: return !eval_node(n->lhs.get(), a);
        case Kind::And: return eval_node(n->lhs.get(), a) && eval_node(n->rhs.get(), a);
        case Kind::Or: return eval_node(n->lhs.get(), a) || eval_node(n->rhs.get(), a);
    }
    return false;
}

bool BoolExpr::eval(const std::function<bool(int)>& assignment) const {
    return eval_node(node_.get(), assignment);
}

namespace {
void collect(const BoolExpr& e, std::vector<int>& out) {
    switch (e.kind()) {
        case BoolExpr::Kind::True:
        case BoolExpr::Kind::False:
            return;
        case BoolExpr::Kind::Var:
            out.push_back(e.var_id());
            return;
        case BoolExpr::Kind::Not:
            collect(e.lhs(), out);
            return;
        case BoolExpr::Kind::And:
        case BoolExpr::Kind::Or:
            collect(e.lhs(), out);
            collect(e.rhs(), out);
            return;
    }
}
}  // namespace

std::vector<int> BoolExpr::support() const {
    std::vector<int> out;
    collect(*this, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

BoolExpr BoolExpr::substitute(int id, bool value) const {
    switch (kind()) {
        case Kind::True:
        case Kind::False:
            return *this;
        case Kind::Var:
            if (var_id() == id) return value ? tru() : fls();
            return *this;
        case Kind::Not:
            return negate(lhs().substitute(id, value));
        case Kind::And:
            return conj(lhs().substitute(id, value), rhs().substitute(id, value));
        case Kind::Or:
            return disj(lhs().substitute(id, value), rhs().substitute(id, value));
    }
    return *this;
}

namespace {
constexpr int kMaxSupport = 24;
}

bool BoolExpr::satisfiable() const {
    auto vars = support();
    if (static_cast<int>(vars.size()) > kMaxSupport)
        throw std::runtime_error("BoolExpr: support too large for enumeration");
    const std::uint64_t total = 1ull << vars.size();
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        auto assign = [&](int id) {
            auto it = std::lower_bound(vars.begin(), vars.end(), id);
            return ((mask >> (it - vars.begin())) & 1) != 0;
        };
        if (eval(assign)) return true;
    }
    return false;
}

bool BoolExpr::implies(const BoolExpr& other) const {
    return !conj(*this, negate(other)).satisfiable();
}

bool BoolExpr::equivalent(const BoolExpr& other) const {
    return implies(other) && other.implies(*this);
}

void BoolExpr::for_each_satisfying(
    const std::function<void(const std::vector<int>&, const std::vector<bool>&)>& f) const {
    auto vars = support();
    if (static_cast<int>(vars.size()) > kMaxSupport)
        throw std::runtime_error("BoolExpr: support too large for enumeration");
    const std::uint64_t total = 1ull << vars.size();
    std::vector<bool> values(vars.size());
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        for (size_t i = 0; i < vars.size(); ++i) values[i] = ((mask >> i) & 1) != 0;
        auto assign = [&](int id) {
            auto it = std::lower_bound(vars.begin(), vars.end(), id);
            return values[static_cast<size_t>(it - vars.begin())];
        };
        if (eval(assign)) f(vars, values);
    }
}

std::string BoolExpr::str(const std::function<std::string(int)>& name) const {
    auto nm = [&](int id) { return name ? name(id) : "v" + std::to_string(id); };
    switch (kind()) {
        case Kind::True: return "true";
        case Kind::False: return "false";
        case Kind::Var: return nm(var_id());
        case Kind::Not: return "!" + lhs().str(name);
        case Kind::And: return "(" + lhs().str(name) + " & " + rhs().str(name) + ")";
        case Kind::Or: return "(" + lhs().str(name) + " | " + rhs().str(name) + ")";
    }
    return "?";
}

}  // namespace risitl
