#include "risitl/formula.hpp"

#include <cctype>
#include <map>

namespace risitl {

int PredicateTable::add(const std::string& name, const Eigen::VectorXd& a, double b, double eta) {
    if (index_of(name) >= 0) throw std::invalid_argument("duplicate predicate name: " + name);
    double n = a.norm();
    if (!(n > 0.0)) throw std::invalid_argument("predicate '" + name + "' has zero normal");
    if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("predicate '" + name + "': eta must lie in (0,1)");
    Predicate p;
    p.name = name;
    p.a = a / n;
    p.b = b / n;
    p.eta = eta;
    preds_.push_back(std::move(p));
    return static_cast<int>(preds_.size()) - 1;
}

int PredicateTable::index_of(const std::string& name) const {
    for (size_t i = 0; i < preds_.size(); ++i)
        if (preds_[i].name == name) return static_cast<int>(i);
    return -1;
}

FormulaInterval FormulaInterval::closed(const Rational& a, const Rational& b) {
    return make(a, true, b, true);
}

FormulaInterval FormulaInterval::make(const Rational& a, bool ac, const Rational& b, bool bc) {
    if (a > b) throw std::invalid_argument("interval with lower > upper");
    if (a == b && !(ac && bc)) throw std::invalid_argument("empty interval");
    if (a == b) throw std::invalid_argument("singleton interval not allowed");
    if (a.is_negative()) throw std::invalid_argument("negative interval endpoint");
    FormulaInterval i;
    i.lo = a; i.hi = b; i.lo_closed = ac; i.hi_closed = bc; i.unbounded = false;
    return i;
}

FormulaInterval FormulaInterval::ray(const Rational& a, bool ac) {
    if (a.is_negative()) throw std::invalid_argument("negative interval endpoint");
    FormulaInterval i;
    i.lo = a; i.lo_closed = ac; i.unbounded = true; i.hi_closed = false;
    return i;
}

std::string FormulaInterval::str() const {
    std::string s = lo_closed ? "[" : "(";
    s += lo.str();
    s += ",";
    s += unbounded ? "inf)" : hi.str() + (hi_closed ? "]" : ")");
    return s;
}

bool FormulaInterval::operator==(const FormulaInterval& o) const {
    if (unbounded != o.unbounded || lo != o.lo || lo_closed != o.lo_closed) return false;
    if (!unbounded && (hi != o.hi || hi_closed != o.hi_closed)) return false;
    return true;
}

namespace {
Formula::Ptr node(FormulaKind k) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    return f;
}
}  // namespace

Formula::Ptr Formula::mk_true() { return node(FormulaKind::True); }

Formula::Ptr Formula::mk_atom(int index) {
    auto f = std::make_shared<Formula>();
    f->kind = FormulaKind::Atom;
    f->atom = index;
    return f;
}

Formula::Ptr Formula::mk_not(Ptr x) {
    auto f = std::make_shared<Formula>();
    f->kind = FormulaKind::Not;
    f->lhs = std::move(x);
    return f;
}

Formula::Ptr Formula::mk_and(Ptr a, Ptr b) {
    auto f = std::make_shared<Formula>();
    f->kind = FormulaKind::And;
    f->lhs = std::move(a);
    f->rhs = std::move(b);
    return f;
}

Formula::Ptr Formula::mk_or(Ptr a, Ptr b) {
    auto f = std::make_shared<Formula>();
    f->kind = FormulaKind::Or;
    f->lhs = std::move(a);
    f->rhs = std::move(b);
    return f;
}

Formula::Ptr Formula::mk_until(const FormulaInterval& i, Ptr a, Ptr b) {
    auto f = std::make_shared<Formula>();
    f->kind = FormulaKind::Until;
    f->interval = i;
    f->lhs = std::move(a);
    f->rhs = std::move(b);
    return f;
}

Formula::Ptr Formula::mk_eventually(const FormulaInterval& i, Ptr x) {
    auto f = std::make_shared<Formula>();
    f->kind = FormulaKind::Eventually;
    f->interval = i;
    f->lhs = std::move(x);
    return f;
}

Formula::Ptr Formula::mk_always(const FormulaInterval& i, Ptr x) {
    auto f = std::make_shared<Formula>();
    f->kind = FormulaKind::Always;
    f->interval = i;
    f->lhs = std::move(x);
    return f;
}

Formula::Ptr Formula::mk_periodic(const Rational& start, const Rational& period,
                                  std::optional<long> reps, Ptr body) {
    if (!(period > Rational(0))) throw std::invalid_argument("cycle period must be positive");
    auto f = std::make_shared<Formula>();
    f->kind = FormulaKind::Periodic;
    f->period_start = start;
    f->period = period;
    f->repetitions = reps;
    f->lhs = std::move(body);
    return f;
}

std::string Formula::str(const std::vector<std::string>* names) const {
    auto atom_str = [&](int i) {
        if (names && i >= 0 && i < (int)names->size()) return (*names)[(size_t)i];
        return "p" + std::to_string(i);
    };
    switch (kind) {
        case FormulaKind::True: return "T";
        case FormulaKind::Atom: return atom_str(atom);
        case FormulaKind::Not: return "!(" + lhs->str(names) + ")";
        case FormulaKind::And: return "(" + lhs->str(names) + " & " + rhs->str(names) + ")";
        case FormulaKind::Or: return "(" + lhs->str(names) + " | " + rhs->str(names) + ")";
        case FormulaKind::Until:
            return "(" + lhs->str(names) + " U" + interval.str() + " " + rhs->str(names) + ")";
        case FormulaKind::Eventually: return "F" + interval.str() + "(" + lhs->str(names) + ")";
        case FormulaKind::Always: return "G" + interval.str() + "(" + lhs->str(names) + ")";
        case FormulaKind::Periodic: {
            std::string s = "cycle[" + period_start.str() + "," + period.str();
            if (repetitions) s += "," + std::to_string(*repetitions);
            return s + "](" + lhs->str(names) + ")";
        }
    }
    return "?";
}

bool structurally_equal(const Formula::Ptr& a, const Formula::Ptr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case FormulaKind::True: return true;
        case FormulaKind::Atom: return a->atom == b->atom;
        case FormulaKind::Not: return structurally_equal(a->lhs, b->lhs);
        case FormulaKind::And:
        case FormulaKind::Or:
            return structurally_equal(a->lhs, b->lhs) && structurally_equal(a->rhs, b->rhs);
        case FormulaKind::Until:
            return a->interval == b->interval && structurally_equal(a->lhs, b->lhs) &&
                   structurally_equal(a->rhs, b->rhs);
        case FormulaKind::Eventually:
        case FormulaKind::Always:
            return a->interval == b->interval && structurally_equal(a->lhs, b->lhs);
        case FormulaKind::Periodic:
            return a->period_start == b->period_start && a->period == b->period &&
                   a->repetitions == b->repetitions && structurally_equal(a->lhs, b->lhs);
    }
    return false;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

class Parser {
public:
    Parser(const std::string& text, const PredicateTable& table) : text_(text), table_(table) {}

    Formula::Ptr parse() {
        auto f = parse_or();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return f;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) { ++pos_; return true; }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    Formula::Ptr parse_or() {
        auto f = parse_and();
        while (eat('|')) f = Formula::mk_or(f, parse_and());
        return f;
    }

    Formula::Ptr parse_and() {
        auto f = parse_until();
        while (eat('&')) f = Formula::mk_and(f, parse_until());
        return f;
    }

    Formula::Ptr parse_until() {
        auto f = parse_unary();
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == 'U' && !is_ident_char(at(pos_ + 1))) {
            ++pos_;
            auto iv = parse_interval();
            auto g = parse_unary();
            return Formula::mk_until(iv, f, g);
        }
        return f;
    }

    char at(size_t i) const { return i < text_.size() ? text_[i] : '\0'; }
    static bool is_ident_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    }

    Formula::Ptr parse_unary() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of formula");
        char c = text_[pos_];
        if (c == '!') { ++pos_; return Formula::mk_not(parse_unary()); }
        if (c == '(') {
            ++pos_;
            auto f = parse_or();
            if (!eat(')')) fail("expected ')'");
            return f;
        }
        if (c == 'F' && (at(pos_ + 1) == '[' || at(pos_ + 1) == '(')) {
            ++pos_;
            auto iv = parse_interval();
            return Formula::mk_eventually(iv, parse_unary());
        }
        if (c == 'G' && (at(pos_ + 1) == '[' || at(pos_ + 1) == '(')) {
            ++pos_;
            auto iv = parse_interval();
            return Formula::mk_always(iv, parse_unary());
        }
        // identifier, "T", or "cycle[...]"
        size_t start = pos_;
        if (!std::isalpha(static_cast<unsigned char>(c)) && c != '_') fail("expected formula");
        while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
        std::string ident = text_.substr(start, pos_ - start);
        if (ident == "T" || ident == "true") return Formula::mk_true();
        if (ident == "cycle") {
            if (!eat('[')) fail("expected '[' after cycle");
            Rational s = parse_rational();
            if (!eat(',')) fail("expected ',' in cycle bounds");
            Rational p = parse_rational();
            std::optional<long> reps;
            if (eat(',')) {
                Rational r = parse_rational();
                if (r.den() != 1 || r.num() <= 0) fail("cycle repetition count must be a positive integer");
                reps = r.num();
            }
            if (!eat(']')) fail("expected ']' after cycle bounds");
            auto body = parse_unary();
            return Formula::mk_periodic(s, p, reps, body);
        }
        int idx = table_.index_of(ident);
        if (idx < 0) { pos_ = start; fail("unknown predicate name '" + ident + "'"); }
        return Formula::mk_atom(idx);
    }

    FormulaInterval parse_interval() {
        skip_ws();
        bool lo_closed;
        if (eat('[')) lo_closed = true;
        else if (eat('(')) lo_closed = false;
        else fail("expected interval");
        Rational lo = parse_rational();
        if (!eat(',')) fail("expected ',' in interval");
        skip_ws();
        bool unbounded = false;
        Rational hi;
        if (pos_ + 3 <= text_.size() && text_.compare(pos_, 3, "inf") == 0) {
            pos_ += 3;
            unbounded = true;
        } else {
            hi = parse_rational();
        }
        bool hi_closed;
        if (eat(']')) hi_closed = true;
        else if (eat(')')) hi_closed = false;
        else fail("expected ']' or ')' closing interval");
        size_t here = pos_;
        try {
            if (unbounded) return FormulaInterval::ray(lo, lo_closed);
            return FormulaInterval::make(lo, lo_closed, hi, hi_closed);
        } catch (const std::invalid_argument& e) {
            throw ParseError(here, e.what());
        }
    }

    Rational parse_rational() {
        skip_ws();
        size_t start = pos_;
        if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
                text_[pos_] == '/'))
            ++pos_;
        if (pos_ == start) fail("expected number");
        try {
            return Rational::parse(text_.substr(start, pos_ - start));
        } catch (const std::exception& e) {
            pos_ = start;
            fail(std::string("bad number: ") + e.what());
        }
    }

    const std::string& text_;
    const PredicateTable& table_;
    size_t pos_ = 0;
};

}  // namespace

Formula::Ptr parse_risitl(const std::string& text, const PredicateTable& table) {
    return Parser(text, table).parse();
}

// ---------------------------------------------------------------------------
// Normalization / abstraction / horizon
// ---------------------------------------------------------------------------

Formula::Ptr normalize(const Formula::Ptr& f) {
    switch (f->kind) {
        case FormulaKind::True:
        case FormulaKind::Atom:
            return f;
        case FormulaKind::Not: {
            auto l = normalize(f->lhs);
            return l == f->lhs ? f : Formula::mk_not(l);
        }
        case FormulaKind::And: {
            auto l = normalize(f->lhs), r = normalize(f->rhs);
            return (l == f->lhs && r == f->rhs) ? f : Formula::mk_and(l, r);
        }
        case FormulaKind::Or:
            return Formula::mk_not(
                Formula::mk_and(Formula::mk_not(normalize(f->lhs)), Formula::mk_not(normalize(f->rhs))));
        case FormulaKind::Until: {
            auto l = normalize(f->lhs), r = normalize(f->rhs);
            return (l == f->lhs && r == f->rhs) ? f : Formula::mk_until(f->interval, l, r);
        }
        case FormulaKind::Eventually:
            return Formula::mk_until(f->interval, Formula::mk_true(), normalize(f->lhs));
        case FormulaKind::Always:
            return Formula::mk_not(
                Formula::mk_until(f->interval, Formula::mk_true(), Formula::mk_not(normalize(f->lhs))));
        case FormulaKind::Periodic: {
            auto body = normalize(f->lhs);
            return body == f->lhs ? f
                                  : Formula::mk_periodic(f->period_start, f->period, f->repetitions, body);
        }
    }
    return f;
}

namespace {

Formula::Ptr remap_atoms(const Formula::Ptr& f, std::map<int, int>& fwd, std::vector<int>& order) {
    switch (f->kind) {
        case FormulaKind::True: return f;
        case FormulaKind::Atom: {
            auto it = fwd.find(f->atom);
            int p;
            if (it == fwd.end()) {
                p = static_cast<int>(order.size());
                fwd[f->atom] = p;
                order.push_back(f->atom);
            } else {
                p = it->second;
            }
            return Formula::mk_atom(p);
        }
        case FormulaKind::Not: return Formula::mk_not(remap_atoms(f->lhs, fwd, order));
        case FormulaKind::And:
            return Formula::mk_and(remap_atoms(f->lhs, fwd, order), remap_atoms(f->rhs, fwd, order));
        case FormulaKind::Or:
            return Formula::mk_or(remap_atoms(f->lhs, fwd, order), remap_atoms(f->rhs, fwd, order));
        case FormulaKind::Until:
            return Formula::mk_until(f->interval, remap_atoms(f->lhs, fwd, order),
                                     remap_atoms(f->rhs, fwd, order));
        case FormulaKind::Eventually:
            return Formula::mk_eventually(f->interval, remap_atoms(f->lhs, fwd, order));
        case FormulaKind::Always:
            return Formula::mk_always(f->interval, remap_atoms(f->lhs, fwd, order));
        case FormulaKind::Periodic:
            return Formula::mk_periodic(f->period_start, f->period, f->repetitions,
                                        remap_atoms(f->lhs, fwd, order));
    }
    return f;
}

Formula::Ptr apply_atom_map(const Formula::Ptr& f, const std::vector<int>& map) {
    switch (f->kind) {
        case FormulaKind::True: return f;
        case FormulaKind::Atom: return Formula::mk_atom(map.at(static_cast<size_t>(f->atom)));
        case FormulaKind::Not: return Formula::mk_not(apply_atom_map(f->lhs, map));
        case FormulaKind::And:
            return Formula::mk_and(apply_atom_map(f->lhs, map), apply_atom_map(f->rhs, map));
        case FormulaKind::Or:
            return Formula::mk_or(apply_atom_map(f->lhs, map), apply_atom_map(f->rhs, map));
        case FormulaKind::Until:
            return Formula::mk_until(f->interval, apply_atom_map(f->lhs, map),
                                     apply_atom_map(f->rhs, map));
        case FormulaKind::Eventually:
            return Formula::mk_eventually(f->interval, apply_atom_map(f->lhs, map));
        case FormulaKind::Always:
            return Formula::mk_always(f->interval, apply_atom_map(f->lhs, map));
        case FormulaKind::Periodic:
            return Formula::mk_periodic(f->period_start, f->period, f->repetitions,
                                        apply_atom_map(f->lhs, map));
    }
    return f;
}

}  // namespace

MitlFormula abstract_to_mitl(const Formula::Ptr& f) {
    MitlFormula mf;
    std::map<int, int> fwd;
    mf.root = remap_atoms(f, fwd, mf.prop_to_pred);
    mf.num_props = static_cast<int>(mf.prop_to_pred.size());
    return mf;
}

Formula::Ptr substitute_predicates(const MitlFormula& mf) {
    return apply_atom_map(mf.root, mf.prop_to_pred);
}

std::optional<Rational> horizon(const Formula::Ptr& f) {
    switch (f->kind) {
        case FormulaKind::True:
        case FormulaKind::Atom:
            return Rational(0);
        case FormulaKind::Not:
            return horizon(f->lhs);
        case FormulaKind::And:
        case FormulaKind::Or: {
            auto l = horizon(f->lhs), r = horizon(f->rhs);
            if (!l || !r) return std::nullopt;
            return Rational::max(*l, *r);
        }
        case FormulaKind::Until: {
            if (f->interval.unbounded) return std::nullopt;
            auto l = horizon(f->lhs), r = horizon(f->rhs);
            if (!l || !r) return std::nullopt;
            return f->interval.hi + Rational::max(*l, *r);
        }
        case FormulaKind::Eventually:
        case FormulaKind::Always: {
            if (f->interval.unbounded) return std::nullopt;
            auto l = horizon(f->lhs);
            if (!l) return std::nullopt;
            return f->interval.hi + *l;
        }
        case FormulaKind::Periodic: {
            if (!f->repetitions) return std::nullopt;
            auto b = horizon(f->lhs);
            if (!b) return std::nullopt;
            return f->period_start + f->period * Rational(*f->repetitions - 1) + *b;
        }
    }
    return std::nullopt;
}

namespace {

Formula::Ptr shift_intervals(const Formula::Ptr& f, const Rational& delta) {
    // Wraps f so that "f at time t0+delta" reads as a formula at t0. Only the
    // outermost temporal layer needs the shift; we wrap with F over a
    // degenerate-avoiding interval by pushing the shift into the top operator.
    switch (f->kind) {
        case FormulaKind::True:
        case FormulaKind::Atom:
            // "atom holds at exactly delta later" is not expressible without
            // singleton intervals; callers avoid this by construction.
            throw std::logic_error("cannot shift a zero-horizon formula by a point delay");
        case FormulaKind::Not:
            return Formula::mk_not(shift_intervals(f->lhs, delta));
        case FormulaKind::And:
            return Formula::mk_and(shift_intervals(f->lhs, delta), shift_intervals(f->rhs, delta));
        case FormulaKind::Or:
            return Formula::mk_or(shift_intervals(f->lhs, delta), shift_intervals(f->rhs, delta));
        case FormulaKind::Until: {
            FormulaInterval i = f->interval;
            i.lo = i.lo + delta;
            if (!i.unbounded) i.hi = i.hi + delta;
            // shifting U's window alone changes semantics of the phi1 part;
            // periodic bodies restrict to F/G/boolean shapes, enforced here.
            throw std::logic_error("periodic bodies may not contain a bare until");
        }
        case FormulaKind::Eventually: {
            FormulaInterval i = f->interval;
            i.lo = i.lo + delta;
            if (!i.unbounded) i.hi = i.hi + delta;
            return Formula::mk_eventually(i, f->lhs);
        }
        case FormulaKind::Always: {
            FormulaInterval i = f->interval;
            i.lo = i.lo + delta;
            if (!i.unbounded) i.hi = i.hi + delta;
            return Formula::mk_always(i, f->lhs);
        }
        case FormulaKind::Periodic:
            throw std::logic_error("nested periodic operators are not supported");
    }
    throw std::logic_error("unreachable");
}

}  // namespace

Formula::Ptr flatten_periodic(const Formula::Ptr& f, long default_reps) {
    switch (f->kind) {
        case FormulaKind::True:
        case FormulaKind::Atom:
            return f;
        case FormulaKind::Not:
            return Formula::mk_not(flatten_periodic(f->lhs, default_reps));
        case FormulaKind::And:
            return Formula::mk_and(flatten_periodic(f->lhs, default_reps),
                                   flatten_periodic(f->rhs, default_reps));
        case FormulaKind::Or:
            return Formula::mk_or(flatten_periodic(f->lhs, default_reps),
                                  flatten_periodic(f->rhs, default_reps));
        case FormulaKind::Until:
            return Formula::mk_until(f->interval, flatten_periodic(f->lhs, default_reps),
                                     flatten_periodic(f->rhs, default_reps));
        case FormulaKind::Eventually:
            return Formula::mk_eventually(f->interval, flatten_periodic(f->lhs, default_reps));
        case FormulaKind::Always:
            return Formula::mk_always(f->interval, flatten_periodic(f->lhs, default_reps));
        case FormulaKind::Periodic: {
            long reps = f->repetitions ? *f->repetitions : default_reps;
            if (reps <= 0) throw std::invalid_argument("flatten_periodic: nonpositive repetition count");
            Formula::Ptr out;
            for (long k = 0; k < reps; ++k) {
                Rational delta = f->period_start + f->period * Rational(k);
                auto inst = shift_intervals(f->lhs, delta);
                out = out ? Formula::mk_and(out, inst) : inst;
            }
            return out;
        }
    }
    return f;
}

}  // namespace risitl
