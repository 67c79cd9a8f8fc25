#include "risitl/tst.hpp"

#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace risitl {

bool ClockAtom::eval(const std::vector<Rational>& clocks) const {
    const Rational& c = clocks.at(static_cast<size_t>(clock));
    switch (rel) {
        case Rel::LE: return c <= bound;
        case Rel::GE: return c >= bound;
        case Rel::LT: return c < bound;
        case Rel::GT: return c > bound;
    }
    return false;
}

std::string ClockAtom::str() const {
    const char* r = rel == Rel::LE ? "<=" : rel == Rel::GE ? ">=" : rel == Rel::LT ? "<" : ">";
    return "c" + std::to_string(clock) + r + bound.str();
}

ClockConstraint ClockConstraint::conjoin(const ClockConstraint& o) const {
    ClockConstraint out;
    out.disjuncts.clear();
    for (const auto& a : disjuncts)
        for (const auto& b : o.disjuncts) {
            auto c = a;
            c.insert(c.end(), b.begin(), b.end());
            out.disjuncts.push_back(std::move(c));
        }
    return out;
}

ClockConstraint ClockConstraint::shifted(int clock_offset) const {
    ClockConstraint out = *this;
    for (auto& d : out.disjuncts)
        for (auto& a : d) a.clock += clock_offset;
    return out;
}

bool ClockConstraint::eval(const std::vector<Rational>& clocks) const {
    for (const auto& d : disjuncts) {
        bool ok = true;
        for (const auto& a : d)
            if (!a.eval(clocks)) { ok = false; break; }
        if (ok) return true;
    }
    return false;
}

bool ClockConstraint::upper_unbounded() const {
    for (const auto& d : disjuncts)
        for (const auto& a : d)
            if (a.rel == ClockAtom::Rel::LE || a.rel == ClockAtom::Rel::LT) return false;
    return true;
}

std::string ClockConstraint::str() const {
    if (is_true()) return "true";
    std::string s;
    for (size_t i = 0; i < disjuncts.size(); ++i) {
        if (i) s += " | ";
        if (disjuncts[i].empty()) { s += "true"; continue; }
        for (size_t j = 0; j < disjuncts[i].size(); ++j) {
            if (j) s += " & ";
            s += disjuncts[i][j].str();
        }
    }
    return s;
}

bool AcceptanceSet::has_state(int s) const {
    for (int x : states)
        if (x == s) return true;
    return false;
}

bool AcceptanceSet::has_transition(int t) const {
    for (int x : transitions)
        if (x == t) return true;
    return false;
}

std::vector<int> TimedSignalTransducer::initial_transitions() const {
    std::vector<int> out;
    for (size_t i = 0; i < transitions.size(); ++i)
        if (transitions[i].src == TstTransition::kInitial) out.push_back(static_cast<int>(i));
    return out;
}

std::vector<std::vector<int>> TimedSignalTransducer::transitions_from() const {
    std::vector<std::vector<int>> out(states.size());
    for (size_t i = 0; i < transitions.size(); ++i) {
        int s = transitions[i].src;
        if (s >= 0) out[static_cast<size_t>(s)].push_back(static_cast<int>(i));
    }
    return out;
}

void TimedSignalTransducer::check_well_formed() const {
    auto check_cc = [&](const ClockConstraint& cc, const char* what) {
        for (const auto& d : cc.disjuncts)
            for (const auto& a : d) {
                if (a.clock < 0 || a.clock >= num_clocks)
                    throw std::logic_error(std::string(what) + ": clock index out of range");
                if (a.bound.is_negative())
                    throw std::logic_error(std::string(what) + ": negative clock bound");
            }
    };
    for (const auto& s : states) {
        check_cc(s.invariant, "state invariant");
        if (!s.invariant.is_conjunctive())
            throw std::logic_error("state invariant must be conjunctive");
    }
    for (const auto& t : transitions) {
        if (t.src < TstTransition::kInitial || t.src >= static_cast<int>(states.size()))
            throw std::logic_error("transition source out of range");
        if (t.dst < 0 || t.dst >= static_cast<int>(states.size()))
            throw std::logic_error("transition target out of range");
        check_cc(t.guard, "transition guard");
        for (int r : t.resets)
            if (r < 0 || r >= num_clocks) throw std::logic_error("reset clock out of range");
    }
    for (const auto& f : acceptance) {
        for (int s : f.states)
            if (s < 0 || s >= static_cast<int>(states.size()))
                throw std::logic_error("acceptance set references missing state");
        for (int t : f.transitions)
            if (t < 0 || t >= static_cast<int>(transitions.size()))
                throw std::logic_error("acceptance set references missing transition");
    }
}

bool TimedSignalTransducer::in_all_acceptance_sets(int s) const {
    for (const auto& f : acceptance)
        if (!f.has_state(s)) return false;
    return true;
}

std::string TimedSignalTransducer::dump_json(const std::function<std::string(int)>& var_name) const {
    nlohmann::json j;
    j["num_clocks"] = num_clocks;
    j["input_vars"] = input_vars;
    j["output_vars"] = output_vars;
    auto nm = [&](int v) { return var_name ? var_name(v) : "v" + std::to_string(v); };
    j["states"] = nlohmann::json::array();
    for (size_t i = 0; i < states.size(); ++i) {
        nlohmann::json s;
        s["id"] = i;
        s["name"] = states[i].name;
        s["invariant"] = states[i].invariant.str();
        s["in"] = states[i].in_label.str(nm);
        s["out"] = states[i].out_label.str(nm);
        j["states"].push_back(std::move(s));
    }
    j["transitions"] = nlohmann::json::array();
    for (size_t i = 0; i < transitions.size(); ++i) {
        const auto& t = transitions[i];
        nlohmann::json e;
        e["id"] = i;
        e["src"] = t.src;
        e["dst"] = t.dst;
        e["guard"] = t.guard.str();
        e["resets"] = t.resets;
        e["in"] = t.in_label.str(nm);
        e["out"] = t.out_label.str(nm);
        j["transitions"].push_back(std::move(e));
    }
    j["acceptance"] = nlohmann::json::array();
    for (const auto& f : acceptance) {
        nlohmann::json m;
        m["states"] = f.states;
        m["transitions"] = f.transitions;
        j["acceptance"].push_back(std::move(m));
    }
    return j.dump(2);
}

// ---------------------------------------------------------------------------
// Gadgets
// ---------------------------------------------------------------------------

namespace {

BoolExpr lit(const BoolExpr& e, bool pos) { return BoolExpr::literal(e, pos); }

ClockAtom le(int c, const Rational& b) { return {c, ClockAtom::Rel::LE, b}; }
ClockAtom ge(int c, const Rational& b) { return {c, ClockAtom::Rel::GE, b}; }
ClockAtom lt(int c, const Rational& b) { return {c, ClockAtom::Rel::LT, b}; }

ClockConstraint eq(int c, const Rational& b) { return ClockConstraint::of({ge(c, b), le(c, b)}); }

TimedSignalTransducer combinational(const BoolExpr& f, int out) {
    TimedSignalTransducer t;
    t.output_vars = {out};
    t.input_vars = f.support();
    BoolExpr y = BoolExpr::var(out);
    t.states.push_back({"on", ClockConstraint::always(), f, y});
    t.states.push_back({"off", ClockConstraint::always(), BoolExpr::negate(f), BoolExpr::negate(y)});
    auto add = [&](int src, int dst, bool point_true) {
        TstTransition tr;
        tr.src = src;
        tr.dst = dst;
        tr.in_label = lit(f, point_true);
        tr.out_label = lit(y, point_true);
        t.transitions.push_back(std::move(tr));
    };
    for (int src : {TstTransition::kInitial, 0, 1})
        for (int dst : {0, 1})
            for (bool v : {true, false}) add(src, dst, v);
    return t;
}

TimedSignalTransducer const_true(int out) {
    TimedSignalTransducer t;
    t.output_vars = {out};
    BoolExpr y = BoolExpr::var(out);
    t.states.push_back({"top", ClockConstraint::always(), BoolExpr::tru(), y});
    TstTransition tr;
    tr.src = TstTransition::kInitial;
    tr.dst = 0;
    tr.in_label = BoolExpr::tru();
    tr.out_label = y;
    t.transitions.push_back(std::move(tr));
    return t;
}

// U over (0, inf): nondeterministic promise states P/N for the (d1, !d2)
// dwell; the Buchi family excludes P so promises cannot be held forever.
TimedSignalTransducer until_unbounded(const BoolExpr& e1, const BoolExpr& e2, int out) {
    TimedSignalTransducer t;
    t.output_vars = {out};
    {
        auto s = e1.support();
        auto s2 = e2.support();
        s.insert(s.end(), s2.begin(), s2.end());
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        t.input_vars = s;
    }
    BoolExpr y = BoolExpr::var(out);
    const int A = 0, B = 1, C = 2, P = 3, N = 4;
    auto dwell = [&](bool v1, bool v2) { return BoolExpr::conj(lit(e1, v1), lit(e2, v2)); };
    t.states.push_back({"A", ClockConstraint::always(), dwell(true, true), y});
    t.states.push_back({"B", ClockConstraint::always(), dwell(false, true), BoolExpr::negate(y)});
    t.states.push_back({"C", ClockConstraint::always(), dwell(false, false), BoolExpr::negate(y)});
    t.states.push_back({"P", ClockConstraint::always(), dwell(true, false), y});
    t.states.push_back({"N", ClockConstraint::always(), dwell(true, false), BoolExpr::negate(y)});
    auto out_of = [&](int s) { return s == A || s == P; };  // y-true states

    for (int src : {TstTransition::kInitial, A, B, C, P, N}) {
        for (int dst : {N, C, B, A, P}) {
            for (bool v1 : {false, true})
                for (bool v2 : {false, true}) {
                    // Output is strictly-future, so point values at the step
                    // are unconstrained except by the promise rules below.
                    if (src == P) {
                        // promise must resolve: a witness at the point or a
                        // true continuation
                        if (!(v2 || (v1 && out_of(dst)))) continue;
                    }
                    if (src == N) {
                        // no-witness claim: the point must not witness and the
                        // continuation must stay false
                        if (v2) continue;
                        if (v1 && out_of(dst)) continue;
                    }
                    TstTransition tr;
                    tr.src = src;
                    tr.dst = dst;
                    tr.in_label = dwell(v1, v2);
                    tr.out_label = t.states[static_cast<size_t>(dst)].out_label;
                    t.transitions.push_back(std::move(tr));
                }
        }
    }
    AcceptanceSet acc;
    for (int s : {A, B, C, N}) acc.states.push_back(s);
    for (size_t i = 0; i < t.transitions.size(); ++i) acc.transitions.push_back(static_cast<int>(i));
    t.acceptance.push_back(std::move(acc));
    return t;
}

// F over (0, inf): the until gadget with the left input fixed true.
TimedSignalTransducer eventually_unbounded(const BoolExpr& e, int out) {
    TimedSignalTransducer t;
    t.output_vars = {out};
    t.input_vars = e.support();
    BoolExpr y = BoolExpr::var(out);
    const int A = 0, P = 1, N = 2;
    t.states.push_back({"A", ClockConstraint::always(), e, y});
    t.states.push_back({"P", ClockConstraint::always(), BoolExpr::negate(e), y});
    t.states.push_back({"N", ClockConstraint::always(), BoolExpr::negate(e), BoolExpr::negate(y)});
    auto y_true = [&](int s) { return s == A || s == P; };
    for (int src : {TstTransition::kInitial, A, P, N}) {
        for (int dst : {N, A, P}) {
            for (bool v : {false, true}) {
                if (src == P && !(v || y_true(dst))) continue;
                if (src == N && (v || y_true(dst))) continue;
                TstTransition tr;
                tr.src = src;
                tr.dst = dst;
                tr.in_label = lit(e, v);
                tr.out_label = t.states[static_cast<size_t>(dst)].out_label;
                t.transitions.push_back(std::move(tr));
            }
        }
    }
    AcceptanceSet acc;
    acc.states = {A, N};
    for (size_t i = 0; i < t.transitions.size(); ++i) acc.transitions.push_back(static_cast<int>(i));
    t.acceptance.push_back(std::move(acc));
    return t;
}

// F over (0,b): output true exactly when a witness sits strictly inside
// (t, t+b). Output components are open intervals, so every rise of the
// output has a false point and every fall lands exactly on an input event.
// qt anticipates the next input component exactly b ahead, ql strictly
// earlier; input point values at discharges are free (the open window never
// contains its endpoints).
TimedSignalTransducer eventually_bounded_open(const BoolExpr& e, const Rational& b, int out) {
    TimedSignalTransducer t;
    t.num_clocks = 1;
    t.output_vars = {out};
    t.input_vars = e.support();
    BoolExpr y = BoolExpr::var(out);
    BoolExpr ny = BoolExpr::negate(y);
    BoolExpr ne = BoolExpr::negate(e);
    const int q00 = 0, qt = 1, ql = 2, q11 = 3;
    t.states.push_back({"q00", ClockConstraint::always(), ne, ny});
    t.states.push_back({"qt", ClockConstraint::of(le(0, b)), ne, y});
    t.states.push_back({"ql", ClockConstraint::of(le(0, b)), ne, y});
    t.states.push_back({"q11", ClockConstraint::always(), e, y});

    auto add = [&](int src, int dst, const BoolExpr& in, const BoolExpr& outl,
                   ClockConstraint g = ClockConstraint::always(), bool reset = false) {
        TstTransition tr;
        tr.src = src;
        tr.dst = dst;
        tr.guard = std::move(g);
        tr.in_label = in;
        tr.out_label = outl;
        if (reset) tr.resets = {0};
        t.transitions.push_back(std::move(tr));
    };
    const int init = TstTransition::kInitial;
    // initial guesses; a true input point at 0 is an isolated witness
    add(init, q00, ne, ny);
    add(init, q00, e, ny);
    add(init, ql, ne, y, ClockConstraint::always(), true);
    add(init, ql, e, y, ClockConstraint::always(), true);
    add(init, qt, ne, ny, ClockConstraint::always(), true);
    add(init, qt, e, ny, ClockConstraint::always(), true);
    add(init, q11, e, y);
    add(init, q11, ne, y);
    // idle: the output rise is an exact anticipation with a false point
    add(q00, qt, ne, ny, ClockConstraint::always(), true);
    // falls of the input; the strict window ignores the fall point value.
    // The no-anticipation exit comes first: promises are for planned visits.
    for (const BoolExpr& pt : {e, ne}) add(q11, q00, pt, ny);
    for (const BoolExpr& pt : {e, ne}) {
        add(q11, ql, pt, y, ClockConstraint::always(), true);
        add(q11, qt, pt, ny, ClockConstraint::always(), true);
    }
    add(q11, q11, ne, y);  // false point inside a true dwell
    // discharges: a real component entered (either flag), or an isolated
    // witness point followed by idling or a fresh anticipation
    for (const BoolExpr& pt : {e, ne}) {
        add(ql, q11, pt, y, ClockConstraint::of(lt(0, b)));
        add(qt, q11, pt, y, eq(0, b));
    }
    add(ql, q00, e, ny, ClockConstraint::of(lt(0, b)));
    add(ql, ql, e, y, ClockConstraint::of(lt(0, b)), true);
    add(ql, qt, e, ny, ClockConstraint::of(lt(0, b)), true);
    add(qt, q00, e, ny, eq(0, b));
    add(qt, ql, e, y, eq(0, b), true);
    add(qt, qt, e, ny, eq(0, b), true);
    return t;
}

// F over [0,b]: the closed window makes the output inherit the input
// component endpoint flags, so exact anticipations must remember whether the
// awaited component opens with a true point (qtc) or a false one (qto).
TimedSignalTransducer eventually_bounded_closed(const BoolExpr& e, const Rational& b, int out) {
    TimedSignalTransducer t;
    t.num_clocks = 1;
    t.output_vars = {out};
    t.input_vars = e.support();
    BoolExpr y = BoolExpr::var(out);
    BoolExpr ny = BoolExpr::negate(y);
    BoolExpr ne = BoolExpr::negate(e);
    const int q00 = 0, qtc = 1, qto = 2, ql = 3, q11 = 4;
    t.states.push_back({"q00", ClockConstraint::always(), ne, ny});
    t.states.push_back({"qtc", ClockConstraint::of(le(0, b)), ne, y});
    t.states.push_back({"qto", ClockConstraint::of(le(0, b)), ne, y});
    t.states.push_back({"ql", ClockConstraint::of(le(0, b)), ne, y});
    t.states.push_back({"q11", ClockConstraint::always(), e, y});

    auto add = [&](int src, int dst, const BoolExpr& in, const BoolExpr& outl,
                   ClockConstraint g = ClockConstraint::always(), bool reset = false) {
        TstTransition tr;
        tr.src = src;
        tr.dst = dst;
        tr.guard = std::move(g);
        tr.in_label = in;
        tr.out_label = outl;
        if (reset) tr.resets = {0};
        t.transitions.push_back(std::move(tr));
    };
    const int init = TstTransition::kInitial;
    add(init, q00, ne, ny);
    add(init, q00, e, y);  // witness point at 0, nothing afterwards
    add(init, ql, ne, y, ClockConstraint::always(), true);
    add(init, ql, e, y, ClockConstraint::always(), true);
    add(init, qto, ne, ny, ClockConstraint::always(), true);
    add(init, qto, e, y, ClockConstraint::always(), true);
    add(init, q11, e, y);
    add(init, q11, ne, y);
    // anticipation from idle: the output rise copies the component flag
    add(q00, qtc, ne, y, ClockConstraint::always(), true);
    add(q00, qto, ne, ny, ClockConstraint::always(), true);
    // falls: the closed window sees a true fall point as its own witness.
    // The no-anticipation exit comes first: promises are for planned visits.
    add(q11, q00, e, y);
    add(q11, q00, ne, ny);
    add(q11, ql, e, y, ClockConstraint::always(), true);
    add(q11, ql, ne, y, ClockConstraint::always(), true);
    add(q11, qto, e, y, ClockConstraint::always(), true);
    add(q11, qto, ne, ny, ClockConstraint::always(), true);
    add(q11, q11, ne, y);
    // discharges
    add(qtc, q11, e, y, eq(0, b));
    add(qto, q11, ne, y, eq(0, b));
    add(ql, q11, e, y, ClockConstraint::of(le(0, b)));
    add(ql, q11, ne, y, ClockConstraint::of(lt(0, b)));
    // isolated witness points (the closed window counts the point itself)
    for (int src : {qtc, ql}) {
        ClockConstraint g = src == qtc ? eq(0, b) : ClockConstraint::of(le(0, b));
        add(src, q00, e, y, g);
        add(src, ql, e, y, g, true);
        add(src, qtc, e, y, g, true);
        add(src, qto, e, y, g, true);
    }
    return t;
}

// Exact shift: output y(t) = input z(t + shift). Guessed output events wait
// in a typed clock pool until the matching input event arrives exactly
// `shift` later; each pending records its kind (dwell flip with either point
// value, or an isolated point). Clock `slots` counts absolute time for the
// unconstrained initial window.
TimedSignalTransducer delay_gadget(const BoolExpr& z, const Rational& shift, int slots, int out,
                                   const Rational& min_dwell) {
    if (slots < 1) throw std::invalid_argument("delay gadget needs at least one pending slot");
    TimedSignalTransducer t;
    const int k = slots;
    t.num_clocks = k + 1;  // pool 0..k-1, global g = k
    t.output_vars = {out};
    t.input_vars = z.support();
    BoolExpr y = BoolExpr::var(out);

    // pending kinds: 0/1 = dwell flip with point value 0/1, 2 = isolated point
    struct StateKey {
        bool zv, yv;
        std::vector<int> queue;  // oldest first
        int head = 0;            // clock of the oldest pending
    };
    std::vector<StateKey> keys;
    std::map<std::string, int> key_ids;
    auto key_str = [](const StateKey& s) {
        std::string r = std::to_string(s.zv) + std::to_string(s.yv) + "h" + std::to_string(s.head) + "q";
        for (int q : s.queue) r += std::to_string(q);
        return r;
    };
    auto flips_in = [](const std::vector<int>& q) {
        int n = 0;
        for (int e2 : q)
            if (e2 != 2) ++n;
        return n;
    };
    // With a known minimum input dwell c, every pending rise or isolated
    // point forces at least c of window to its successor, and isolated
    // points only occur inside true stretches; invalid queues are
    // unreachable and need no states.
    auto queue_valid = [&](bool yv, const std::vector<int>& q) {
        if (min_dwell.is_zero()) return true;
        int flips = 0;
        for (int e2 : q)
            if (e2 != 2) ++flips;
        bool v = flips % 2 == 0 ? yv : !yv;  // dwell before the oldest pending
        int forcing_non_last = 0;
        for (size_t i = 0; i < q.size(); ++i) {
            bool is_last = i + 1 == q.size();
            if (q[i] == 2) {
                if (!v) return false;  // isolated true points never occur
                if (!is_last) ++forcing_non_last;
            } else {
                v = !v;
                if (v && !is_last) ++forcing_non_last;  // a rise
            }
        }
        return Rational(forcing_non_last) * min_dwell < shift;
    };
    std::function<int(const StateKey&)> state_id = [&](const StateKey& s) {
        if (!queue_valid(s.yv, s.queue)) return -1;
        auto it = key_ids.find(key_str(s));
        if (it != key_ids.end()) return it->second;
        int id = static_cast<int>(keys.size());
        key_ids[key_str(s)] = id;
        keys.push_back(s);
        TstState st;
        st.name = "d_" + key_str(s);
        st.in_label = lit(z, s.zv);
        st.out_label = lit(y, s.yv);
        std::vector<ClockAtom> inv;
        if (!s.queue.empty()) inv.push_back(le(s.head, shift));
        bool on_parity = s.zv == (flips_in(s.queue) % 2 == 0 ? s.yv : !s.yv);
        if (!on_parity) inv.push_back(le(k, shift));
        st.invariant = inv.empty() ? ClockConstraint::always() : ClockConstraint::of(inv);
        t.states.push_back(std::move(st));
        return id;
    };

    auto add = [&](int src, int dst, const BoolExpr& in, const BoolExpr& outl, ClockConstraint g,
                   std::vector<int> resets) {
        if (dst < 0 || src < TstTransition::kInitial) return;
        TstTransition tr;
        tr.src = src;
        tr.dst = dst;
        tr.guard = std::move(g);
        tr.in_label = in;
        tr.out_label = outl;
        tr.resets = std::move(resets);
        t.transitions.push_back(std::move(tr));
    };

    // enumerate states breadth-first from the initial guesses
    for (bool zv : {false, true})
        for (bool yv : {false, true})
            for (int kind : {-1, 0, 1, 2}) {
                StateKey s;
                s.zv = zv;
                s.yv = yv;
                s.head = 0;
                BoolExpr outp = lit(y, yv);
                std::vector<int> resets;
                if (kind >= 0) {
                    s.queue = {kind};
                    resets = {0};
                    if (kind != 2) outp = lit(y, kind == 1);   // flip: point = recorded value
                    else outp = lit(y, !yv);                   // isolated point
                }
                add(TstTransition::kInitial, state_id(s), lit(z, zv), outp,
                    ClockConstraint::always(), std::move(resets));
            }

    for (size_t si = 0; si < keys.size(); ++si) {
        StateKey s = keys[si];
        int src = static_cast<int>(si);
        const int l = static_cast<int>(s.queue.size());
        bool on_parity = s.zv == (flips_in(s.queue) % 2 == 0 ? s.yv : !s.yv);

        // output-event guesses (new pending)
        struct Guess {
            StateKey next;
            BoolExpr outp;
            int slot;
        };
        std::vector<Guess> guesses;
        if (l < k) {
            int slot = (s.head + l) % k;
            for (int kind : {0, 1, 2}) {
                StateKey n = s;
                if (l == 0) n.head = slot;
                n.queue.push_back(kind);
                if (kind != 2) n.yv = !s.yv;
                BoolExpr outp = kind == 2 ? lit(y, !s.yv) : lit(y, kind == 1);
                guesses.push_back({std::move(n), outp, slot});
            }
        }
        for (const auto& gu : guesses)
            add(src, state_id(gu.next), lit(z, s.zv), gu.outp, ClockConstraint::always(), {gu.slot});

        // input-event discharges of the oldest pending
        if (l >= 1 && on_parity) {
            int kind = s.queue.front();
            StateKey n = s;
            n.queue.erase(n.queue.begin());
            n.head = n.queue.empty() ? 0 : (s.head + 1) % k;
            BoolExpr inp;
            if (kind == 2) {
                inp = lit(z, !s.zv);  // isolated input point, dwell unchanged
            } else {
                n.zv = !s.zv;
                inp = lit(z, kind == 1);
            }
            int plain_dst = state_id(n);
            add(src, plain_dst, inp, lit(y, s.yv), eq(s.head, shift), {});
            // discharge coinciding with a fresh output guess
            if (static_cast<int>(n.queue.size()) < k) {
                int slot2 = (n.head + static_cast<int>(n.queue.size())) % k;
                for (int kind2 : {0, 1, 2}) {
                    StateKey n2 = n;
                    if (n2.queue.empty()) n2.head = slot2;
                    n2.queue.push_back(kind2);
                    if (kind2 != 2) n2.yv = !n.yv;
                    BoolExpr outp = kind2 == 2 ? lit(y, !n.yv) : lit(y, kind2 == 1);
                    add(src, state_id(n2), inp, outp, eq(s.head, shift), {slot2});
                }
            }
        }

        // free input events inside the unconstrained window
        for (int kind : {0, 1, 2}) {
            StateKey n = s;
            BoolExpr inp;
            if (kind == 2) {
                inp = lit(z, !s.zv);
            } else {
                n.zv = !s.zv;
                inp = lit(z, kind == 1);
            }
            int dst = state_id(n);
            add(src, dst, inp, lit(y, s.yv), ClockConstraint::of(lt(k, shift)), {});
            if (l < k) {
                int slot = (s.head + l) % k;
                for (int kind2 : {0, 1, 2}) {
                    StateKey n2 = n;
                    if (n2.queue.empty()) n2.head = slot;
                    n2.queue.push_back(kind2);
                    if (kind2 != 2) n2.yv = !n.yv;
                    BoolExpr outp = kind2 == 2 ? lit(y, !n.yv) : lit(y, kind2 == 1);
                    add(src, state_id(n2), inp, outp, ClockConstraint::of(lt(k, shift)), {slot});
                }
            }
        }
    }
    return t;
}

// Requires the input wire to be true at start, start+period, ... forever.
// Runs that miss a check die on the state invariant.
TimedSignalTransducer periodic_check(const BoolExpr& w, const Rational& start,
                                     const Rational& period, int out) {
    TimedSignalTransducer t;
    t.num_clocks = 1;
    t.output_vars = {out};
    t.input_vars = w.support();
    BoolExpr y = BoolExpr::var(out);
    const int MAIN = 0;
    t.states.push_back({"main", ClockConstraint::of(le(0, period)), BoolExpr::tru(), y});
    int PRE = -1;
    if (!start.is_zero()) {
        PRE = 1;
        t.states.push_back({"pre", ClockConstraint::of(le(0, start)), BoolExpr::tru(), y});
    }
    auto add = [&](int src, int dst, const BoolExpr& in, ClockConstraint g, bool reset) {
        TstTransition tr;
        tr.src = src;
        tr.dst = dst;
        tr.guard = std::move(g);
        tr.in_label = in;
        tr.out_label = y;
        if (reset) tr.resets = {0};
        t.transitions.push_back(std::move(tr));
    };
    if (PRE >= 0) {
        add(TstTransition::kInitial, PRE, BoolExpr::tru(), ClockConstraint::always(), false);
        add(PRE, MAIN, w, eq(0, start), true);
    } else {
        add(TstTransition::kInitial, MAIN, w, ClockConstraint::always(), false);
    }
    add(MAIN, MAIN, w, eq(0, period), true);
    return t;
}

}  // namespace

TimedSignalTransducer gadget_tst(GadgetOp op, const GadgetParams& p) {
    switch (op) {
        case GadgetOp::Not:
            if (p.inputs.size() != 1) throw std::invalid_argument("Not gadget takes one input");
            return combinational(BoolExpr::negate(p.inputs[0]), p.output_var);
        case GadgetOp::And:
            if (p.inputs.size() != 2) throw std::invalid_argument("And gadget takes two inputs");
            return combinational(BoolExpr::conj(p.inputs[0], p.inputs[1]), p.output_var);
        case GadgetOp::UntilUnbounded:
            if (p.inputs.size() != 2) throw std::invalid_argument("Until gadget takes two inputs");
            return until_unbounded(p.inputs[0], p.inputs[1], p.output_var);
        case GadgetOp::EventuallyBounded:
            if (p.inputs.size() != 1) throw std::invalid_argument("F gadget takes one input");
            if (!(p.bound > Rational(0))) throw std::invalid_argument("F bound must be positive");
            return eventually_bounded_open(p.inputs[0], p.bound, p.output_var);
        case GadgetOp::EventuallyBoundedClosed:
            if (p.inputs.size() != 1) throw std::invalid_argument("F gadget takes one input");
            if (!(p.bound > Rational(0))) throw std::invalid_argument("F bound must be positive");
            return eventually_bounded_closed(p.inputs[0], p.bound, p.output_var);
        case GadgetOp::EventuallyUnbounded:
            if (p.inputs.size() != 1) throw std::invalid_argument("F gadget takes one input");
            return eventually_unbounded(p.inputs[0], p.output_var);
        case GadgetOp::ConstTrue:
            return const_true(p.output_var);
        case GadgetOp::Delay:
            if (p.inputs.size() != 1) throw std::invalid_argument("Delay gadget takes one input");
            return delay_gadget(p.inputs[0], p.bound, p.pending_slots, p.output_var,
                                p.min_input_dwell);
        case GadgetOp::PeriodicCheck:
            if (p.inputs.size() != 1) throw std::invalid_argument("PeriodicCheck takes one input");
            return periodic_check(p.inputs[0], p.start, p.bound, p.output_var);
    }
    throw std::invalid_argument("unsupported operator tag");
}

// ---------------------------------------------------------------------------
// Synchronous product and input-output composition
// ---------------------------------------------------------------------------

namespace {

struct ProductBuilder {
    const TimedSignalTransducer& t1;
    const TimedSignalTransducer& t2;
    bool compose;           // io composition (restrict + substitute the wire)
    int wire = -1;          // producer output variable when composing
    bool reachable_only;

    TimedSignalTransducer out;
    std::map<std::pair<int, int>, int> state_ids;
    // per product state/transition: the component elements, for lifting A.
    // first component: (is_transition, index); same for second.
    std::vector<std::pair<int, int>> state_comp;                      // (s1, s2)
    std::vector<std::pair<std::pair<bool, int>, std::pair<bool, int>>> trans_comp;

    // Wire value pinned by a producer output label; gamma labels of gadget
    // producers are always literals of the wire.
    bool wire_value(const BoolExpr& gamma) const {
        if (gamma.kind() == BoolExpr::Kind::Var && gamma.var_id() == wire) return true;
        if (gamma.kind() == BoolExpr::Kind::Not) {
            BoolExpr inner = gamma.lhs();
            if (inner.kind() == BoolExpr::Kind::Var && inner.var_id() == wire) return false;
        }
        throw std::logic_error("io_compose: producer output label does not pin the wire");
    }

    // Consumer-side label after substituting the pinned wire value; nullopt
    // when inconsistent (pair excluded).
    std::optional<BoolExpr> consumer_label(const BoolExpr& lambda2, const BoolExpr& gamma1) const {
        bool v = wire_value(gamma1);
        BoolExpr sub = lambda2.substitute(wire, v);
        if (sub.is_false()) return std::nullopt;
        return sub;
    }

    int state_id(int s1, int s2) {
        auto key = std::make_pair(s1, s2);
        auto it = state_ids.find(key);
        if (it != state_ids.end()) return it->second;
        const TstState& a = t1.states[static_cast<size_t>(s1)];
        const TstState& b = t2.states[static_cast<size_t>(s2)];
        TstState s;
        s.name = a.name + "*" + b.name;
        s.invariant = a.invariant.conjoin(b.invariant.shifted(t1.num_clocks));
        if (compose) {
            auto lbl = consumer_label(b.in_label, a.out_label);
            if (!lbl) return -1;
            s.in_label = BoolExpr::conj(a.in_label, *lbl);
            s.out_label = b.out_label;
        } else {
            s.in_label = BoolExpr::conj(a.in_label, b.in_label);
            s.out_label = BoolExpr::conj(a.out_label, b.out_label);
        }
        // runs must dwell positively after every step, so a state whose
        // label cannot hold is a dead end; drop it when building lazily
        if (reachable_only && !s.in_label.satisfiable()) {
            state_ids[key] = -1;
            return -1;
        }
        int id = static_cast<int>(out.states.size());
        out.states.push_back(std::move(s));
        state_comp.emplace_back(s1, s2);
        state_ids[key] = id;
        return id;
    }

    void add_transition(int src_id, int dst_id, const ClockConstraint& g, std::vector<int> resets,
                        const BoolExpr& in, const BoolExpr& outl, std::pair<bool, int> c1,
                        std::pair<bool, int> c2) {
        TstTransition tr;
        tr.src = src_id;
        tr.dst = dst_id;
        tr.guard = g;
        tr.resets = std::move(resets);
        tr.in_label = in;
        tr.out_label = outl;
        out.transitions.push_back(std::move(tr));
        trans_comp.push_back({c1, c2});
    }

    TimedSignalTransducer build() {
        out.num_clocks = t1.num_clocks + t2.num_clocks;
        // interface
        if (compose) {
            out.input_vars = t1.input_vars;
            for (int v : t2.input_vars)
                if (v != wire &&
                    std::find(out.input_vars.begin(), out.input_vars.end(), v) == out.input_vars.end())
                    out.input_vars.push_back(v);
            out.output_vars = t2.output_vars;
        } else {
            out.input_vars = t1.input_vars;
            for (int v : t2.input_vars)
                if (std::find(out.input_vars.begin(), out.input_vars.end(), v) == out.input_vars.end())
                    out.input_vars.push_back(v);
            out.output_vars = t1.output_vars;
            for (int v : t2.output_vars)
                if (std::find(out.output_vars.begin(), out.output_vars.end(), v) ==
                    out.output_vars.end())
                    out.output_vars.push_back(v);
        }
        std::sort(out.input_vars.begin(), out.input_vars.end());

        if (!reachable_only) {
            for (int s1 = 0; s1 < static_cast<int>(t1.states.size()); ++s1)
                for (int s2 = 0; s2 < static_cast<int>(t2.states.size()); ++s2) state_id(s1, s2);
        }

        // initial simultaneous transitions seed reachability
        std::vector<std::pair<int, int>> queue;
        std::set<std::pair<int, int>> seen;
        auto enqueue = [&](int s1, int s2) {
            if (seen.insert({s1, s2}).second) queue.emplace_back(s1, s2);
        };
        for (int i1 : t1.initial_transitions())
            for (int i2 : t2.initial_transitions()) {
                const auto& d1 = t1.transitions[static_cast<size_t>(i1)];
                const auto& d2 = t2.transitions[static_cast<size_t>(i2)];
                BoolExpr in, outl;
                if (compose) {
                    auto lbl = consumer_label(d2.in_label, d1.out_label);
                    if (!lbl) continue;
                    in = BoolExpr::conj(d1.in_label, *lbl);
                    outl = d2.out_label;
                } else {
                    in = BoolExpr::conj(d1.in_label, d2.in_label);
                    outl = BoolExpr::conj(d1.out_label, d2.out_label);
                }
                if (!keep_label(in)) continue;
                int dst = state_id(d1.dst, d2.dst);
                if (dst < 0) continue;
                std::vector<int> resets = d1.resets;
                for (int r : d2.resets) resets.push_back(r + t1.num_clocks);
                add_transition(TstTransition::kInitial, dst,
                               d1.guard.conjoin(d2.guard.shifted(t1.num_clocks)), std::move(resets),
                               in, outl, {true, i1}, {true, i2});
                enqueue(d1.dst, d2.dst);
            }

        auto from1 = t1.transitions_from();
        auto from2 = t2.transitions_from();

        auto expand = [&](int s1, int s2) {
            int src_id = state_id(s1, s2);
            if (src_id < 0) return;
            // simultaneous
            for (int i1 : from1[static_cast<size_t>(s1)])
                for (int i2 : from2[static_cast<size_t>(s2)]) {
                    const auto& d1 = t1.transitions[static_cast<size_t>(i1)];
                    const auto& d2 = t2.transitions[static_cast<size_t>(i2)];
                    BoolExpr in, outl;
                    if (compose) {
                        auto lbl = consumer_label(d2.in_label, d1.out_label);
                        if (!lbl) continue;
                        in = BoolExpr::conj(d1.in_label, *lbl);
                        outl = d2.out_label;
                    } else {
                        in = BoolExpr::conj(d1.in_label, d2.in_label);
                        outl = BoolExpr::conj(d1.out_label, d2.out_label);
                    }
                    if (!keep_label(in)) continue;
                    int dst = state_id(d1.dst, d2.dst);
                    if (dst < 0) continue;
                    std::vector<int> resets = d1.resets;
                    for (int r : d2.resets) resets.push_back(r + t1.num_clocks);
                    add_transition(src_id, dst, d1.guard.conjoin(d2.guard.shifted(t1.num_clocks)),
                                   std::move(resets), in, outl, {true, i1}, {true, i2});
                    enqueue(d1.dst, d2.dst);
                }
            // left-sided: t1 moves, t2 dwells through the point
            for (int i1 : from1[static_cast<size_t>(s1)]) {
                const auto& d1 = t1.transitions[static_cast<size_t>(i1)];
                const TstState& st2 = t2.states[static_cast<size_t>(s2)];
                BoolExpr in, outl;
                if (compose) {
                    auto lbl = consumer_label(st2.in_label, d1.out_label);
                    if (!lbl) continue;
                    in = BoolExpr::conj(d1.in_label, *lbl);
                    outl = st2.out_label;
                } else {
                    in = BoolExpr::conj(d1.in_label, st2.in_label);
                    outl = BoolExpr::conj(d1.out_label, st2.out_label);
                }
                if (!keep_label(in)) continue;
                int dst = state_id(d1.dst, s2);
                if (dst < 0) continue;
                add_transition(src_id, dst,
                               d1.guard.conjoin(st2.invariant.shifted(t1.num_clocks)), d1.resets, in,
                               outl, {true, i1}, {false, s2});
                enqueue(d1.dst, s2);
            }
            // right-sided: t2 moves, t1 dwells through the point
            for (int i2 : from2[static_cast<size_t>(s2)]) {
                const auto& d2 = t2.transitions[static_cast<size_t>(i2)];
                const TstState& st1 = t1.states[static_cast<size_t>(s1)];
                BoolExpr in, outl;
                if (compose) {
                    auto lbl = consumer_label(d2.in_label, st1.out_label);
                    if (!lbl) continue;
                    in = BoolExpr::conj(st1.in_label, *lbl);
                    outl = d2.out_label;
                } else {
                    in = BoolExpr::conj(st1.in_label, d2.in_label);
                    outl = BoolExpr::conj(st1.out_label, d2.out_label);
                }
                if (!keep_label(in)) continue;
                int dst = state_id(s1, d2.dst);
                if (dst < 0) continue;
                std::vector<int> resets;
                for (int r : d2.resets) resets.push_back(r + t1.num_clocks);
                add_transition(src_id, dst, st1.invariant.conjoin(d2.guard.shifted(t1.num_clocks)),
                               std::move(resets), in, outl, {false, s1}, {true, i2});
                enqueue(s1, d2.dst);
            }
        };

        if (reachable_only) {
            size_t qi = 0;
            while (qi < queue.size()) {
                auto [s1, s2] = queue[qi++];
                expand(s1, s2);
            }
        } else {
            for (int s1 = 0; s1 < static_cast<int>(t1.states.size()); ++s1)
                for (int s2 = 0; s2 < static_cast<int>(t2.states.size()); ++s2) expand(s1, s2);
        }

        lift_acceptance();
        if (reachable_only) merge_transitions();
        return std::move(out);
    }

    // In lazy mode, a transition whose conjoined point label can never hold
    // is dead weight; keep the definitional elements otherwise.
    bool keep_label(const BoolExpr& in) const {
        if (in.is_false()) return false;
        if (reachable_only && !in.satisfiable()) return false;
        return true;
    }

    // Transitions that differ only in their input label merge by disjunction.
    // Everything else (guard, resets, output, acceptance membership) is part
    // of the key, so the merge is language-preserving.
    void merge_transitions() {
        if (out.acceptance.size() > 63)
            throw std::logic_error("merge_transitions: too many acceptance members");
        std::vector<std::uint64_t> mask(out.transitions.size(), 0);
        for (size_t m = 0; m < out.acceptance.size(); ++m)
            for (int ti : out.acceptance[m].transitions)
                mask[static_cast<size_t>(ti)] |= 1ull << m;
        std::map<std::string, int> key_to_idx;
        std::vector<TstTransition> kept;
        std::vector<std::uint64_t> kept_mask;
        for (size_t i = 0; i < out.transitions.size(); ++i) {
            const TstTransition& tr = out.transitions[i];
            std::string key = std::to_string(tr.src) + "|" + std::to_string(tr.dst) + "|" +
                              tr.guard.str() + "|" + tr.out_label.str() + "|" +
                              std::to_string(mask[i]) + "|";
            for (int r : tr.resets) key += std::to_string(r) + ",";
            auto it = key_to_idx.find(key);
            if (it == key_to_idx.end()) {
                key_to_idx[key] = static_cast<int>(kept.size());
                kept.push_back(tr);
                kept_mask.push_back(mask[i]);
            } else {
                TstTransition& k = kept[static_cast<size_t>(it->second)];
                k.in_label = BoolExpr::disj(k.in_label, tr.in_label);
            }
        }
        out.transitions = std::move(kept);
        for (size_t m = 0; m < out.acceptance.size(); ++m) {
            out.acceptance[m].transitions.clear();
            for (size_t i = 0; i < kept_mask.size(); ++i)
                if (kept_mask[i] & (1ull << m))
                    out.acceptance[m].transitions.push_back(static_cast<int>(i));
        }
    }

    void lift_acceptance() {
        // member F of A1 -> elements whose first component lies in F; the
        // first component of a right-sided transition is the dwelt state.
        auto lift = [&](const AcceptanceSet& f, bool first) {
            AcceptanceSet m;
            for (size_t s = 0; s < out.states.size(); ++s) {
                int comp = first ? state_comp[s].first : state_comp[s].second;
                if (f.has_state(comp)) m.states.push_back(static_cast<int>(s));
            }
            for (size_t tr = 0; tr < out.transitions.size(); ++tr) {
                auto c = first ? trans_comp[tr].first : trans_comp[tr].second;
                bool in = c.first ? f.has_transition(c.second) : f.has_state(c.second);
                if (in) m.transitions.push_back(static_cast<int>(tr));
            }
            return m;
        };
        for (const auto& f : t1.acceptance) out.acceptance.push_back(lift(f, true));
        for (const auto& f : t2.acceptance) out.acceptance.push_back(lift(f, false));
    }
};

}  // namespace

TimedSignalTransducer synchronous_product(const TimedSignalTransducer& t1,
                                          const TimedSignalTransducer& t2, bool reachable_only) {
    ProductBuilder b{t1, t2, false, -1, reachable_only, {}, {}, {}, {}};
    return b.build();
}

TimedSignalTransducer io_compose(const TimedSignalTransducer& producer,
                                 const TimedSignalTransducer& consumer, bool reachable_only) {
    if (producer.output_vars.size() != 1)
        throw std::invalid_argument("io_compose: producer must have exactly one output");
    int wire = producer.output_vars[0];
    if (std::find(consumer.input_vars.begin(), consumer.input_vars.end(), wire) ==
        consumer.input_vars.end())
        throw std::invalid_argument("io_compose: consumer does not read the producer output");
    ProductBuilder b{producer, consumer, true, wire, reachable_only, {}, {}, {}, {}};
    return b.build();
}

}  // namespace risitl
