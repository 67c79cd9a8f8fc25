#include "risitl/accepts.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>
#include <cstdio>
#include <numeric>
#include <cstdlib>

namespace risitl {

namespace {

// Search-clock layout inside the DBM: 0 = absolute time, 1 = time since the
// last discrete step, then each part's clocks at its offset.
constexpr int kTau = 0;
constexpr int kRho = 1;
constexpr int kShift = 2;

struct SegmentedSignal {
    std::vector<Rational> start;
    std::vector<std::vector<bool>> values;
    int num_props = 0;

    int segments() const { return static_cast<int>(start.size()); }
};

SegmentedSignal segment(const BooleanSignal& sig) {
    SegmentedSignal out;
    out.num_props = sig.num_props;
    std::set<Rational> times{Rational(0)};
    for (const auto& bps : sig.breakpoints)
        for (const auto& [t, v] : bps) times.insert(t);
    out.start.assign(times.begin(), times.end());
    for (const auto& t : out.start) {
        std::vector<bool> vals(static_cast<size_t>(sig.num_props));
        for (int p = 0; p < sig.num_props; ++p) vals[static_cast<size_t>(p)] = sig.value_at(p, t);
        out.values.push_back(std::move(vals));
    }
    return out;
}

// Pinned value of a single-wire output literal.
bool pinned_output(const BoolExpr& gamma, int wire) {
    if (gamma.kind() == BoolExpr::Kind::Var && gamma.var_id() == wire) return true;
    if (gamma.kind() == BoolExpr::Kind::Not) {
        BoolExpr inner = gamma.lhs();
        if (inner.kind() == BoolExpr::Kind::Var && inner.var_id() == wire) return false;
    }
    throw std::logic_error("network: output label does not pin the wire");
}

struct SearchStats {
    std::size_t expanded = 0;
    std::size_t combos_emitted = 0;
    std::size_t zones_stored = 0;
};

struct Searcher {
    SearchStats* stats = nullptr;
    const TstNetwork& net;
    const SegmentedSignal seg;
    const AcceptOptions& opts;
    int nparts;
    int nclocks;                       // search clocks = kShift + sum of part clocks
    std::int64_t scale = 1;            // common denominator of all constants
    std::vector<std::int64_t> seg_start_i;  // scaled segment start times
    std::vector<std::int64_t> max_const;    // per search clock, scaled
    std::vector<int> offset;           // per part: search-clock offset
    std::vector<int> wire_of;          // per part: output variable
    std::vector<std::vector<std::vector<int>>> from;  // per part, per state: transitions
    std::vector<std::vector<int>> init_of;            // per part: initial transitions
    std::vector<std::vector<char>> stay_dup;          // per part: transition duplicates stay
    int var_space = 0;

    Searcher(const TstNetwork& n, const BooleanSignal& sig, const AcceptOptions& o)
        : net(n), seg(segment(sig)), opts(o) {
        static const bool want_stats = std::getenv("RISITL_ACCEPT_STATS") != nullptr;
        if (want_stats) { static SearchStats s; stats = &s; s = SearchStats{}; }
        nparts = static_cast<int>(net.parts.size());
        nclocks = kShift + net.total_clocks();
        offset.resize(static_cast<size_t>(nparts));
        wire_of.resize(static_cast<size_t>(nparts));
        var_space = net.num_props;
        // common denominator so the zone arithmetic runs on plain integers
        auto lcm_in = [&](const Rational& r) {
            std::int64_t d = r.den();
            std::int64_t g = std::gcd(scale, d);
            scale = scale / g * d;
            if (scale > (std::int64_t(1) << 40))
                throw std::runtime_error("accepts: constant denominators too fine");
        };
        for (const auto& t : seg.start) lcm_in(t);
        for (const auto& part : net.parts) {
            auto absorb_den = [&](const ClockConstraint& cc) {
                for (const auto& d : cc.disjuncts)
                    for (const auto& a : d) lcm_in(a.bound);
            };
            for (const auto& s : part.states) absorb_den(s.invariant);
            for (const auto& tr : part.transitions) absorb_den(tr.guard);
        }
        for (const auto& t : seg.start) seg_start_i.push_back(scaled(t));
        max_const.assign(static_cast<size_t>(nclocks), 0);
        max_const[kTau] = seg_start_i.back();
        for (int p = 0; p < nparts; ++p) {
            const auto& part = net.parts[static_cast<size_t>(p)];
            offset[static_cast<size_t>(p)] = kShift + net.clock_offset(p);
            wire_of[static_cast<size_t>(p)] = part.output_vars.at(0);
            var_space = std::max(var_space, part.output_vars[0] + 1);
            auto absorb = [&](const ClockConstraint& cc) {
                for (const auto& d : cc.disjuncts)
                    for (const auto& a : d) {
                        std::int64_t& m =
                            max_const[static_cast<size_t>(offset[static_cast<size_t>(p)] + a.clock)];
                        m = std::max(m, scaled(a.bound));
                    }
            };
            for (const auto& s : part.states) absorb(s.invariant);
            for (const auto& tr : part.transitions) absorb(tr.guard);
            from.push_back(part.transitions_from());
            init_of.push_back(part.initial_transitions());
            std::vector<char> dup(part.transitions.size(), 0);
            for (size_t ti = 0; ti < part.transitions.size(); ++ti) {
                const auto& tr = part.transitions[ti];
                if (tr.src < 0 || tr.dst != tr.src || !tr.resets.empty() || !tr.guard.is_true())
                    continue;
                const TstState& st = part.states[static_cast<size_t>(tr.src)];
                if (tr.in_label.str() == st.in_label.str() &&
                    tr.out_label.str() == st.out_label.str())
                    dup[ti] = 1;
            }
            stay_dup.push_back(std::move(dup));
        }
    }

    std::int64_t scaled(const Rational& r) const {
        return r.num() * (scale / r.den());
    }

    // --- label evaluation under segment + wire assignment ------------------

    struct Assignment {
        const std::vector<bool>* props;
        std::vector<char> wires;  // indexed by variable id; 0/1/unset(2)

        bool operator()(int v) const {
            if (v < static_cast<int>(props->size())) return (*props)[static_cast<size_t>(v)];
            char c = wires[static_cast<size_t>(v)];
            if (c == 2) throw std::logic_error("network: read of an unproduced wire");
            return c == 1;
        }
    };

    // One simultaneous step: per part either stay (-1) or a transition index.
    struct Combo {
        std::vector<int> choice;
        std::vector<int> dst;       // resulting state per part
        std::vector<const ClockConstraint*> guards;  // chosen transition guards
        std::vector<std::pair<int, int>> resets;     // (part, clock)
        bool top_true = false;      // top output pinned true at the point
    };

    // Enumerates consistent simultaneous steps at a point whose input values
    // come from segment j. `initial` forces every part to fire an initial
    // transition; otherwise parts may stay when their state label holds.
    template <typename F>
    void combos(const std::vector<int>& states, int j, bool initial, F&& emit,
                const std::vector<std::vector<int>>* viable = nullptr) const {
        Assignment asg{&seg.values[static_cast<size_t>(j)],
                       std::vector<char>(static_cast<size_t>(var_space), 2)};
        Combo combo;
        combo.choice.assign(static_cast<size_t>(nparts), -1);
        combo.dst.assign(static_cast<size_t>(nparts), -1);
        std::size_t emitted = 0;
        // options that differ only in point labels land in the same zone;
        // dedupe by effect (targets, guards, resets, top-output value)
        std::set<std::vector<std::int64_t>> seen_effects;
        std::vector<std::int64_t> key;
        auto dedup_emit = [&](const Combo& c) {
            key.clear();
            for (int d : c.dst) key.push_back(d);
            key.push_back(c.top_true ? 1 : 0);
            for (const auto* g : c.guards)
                key.push_back(static_cast<std::int64_t>(reinterpret_cast<std::uintptr_t>(g)));
            for (const auto& [p, r] : c.resets) key.push_back((std::int64_t)p * 64 + r);
            if (seen_effects.insert(key).second) {
                if (stats) ++stats->combos_emitted;
                emit(c);
            }
        };
        rec(0, states, initial, asg, combo, false, emitted, dedup_emit, viable);
    }

    template <typename F>
    void rec(int p, const std::vector<int>& states, bool initial, Assignment& asg, Combo& combo,
             bool any_move, std::size_t& emitted, F&& emit,
             const std::vector<std::vector<int>>* viable) const {
        if (p == nparts) {
            if (!initial && !any_move) return;
            if (++emitted > opts.combo_budget)
                throw std::runtime_error("accepts: simultaneous-option budget exceeded");
            combo.top_true = asg.wires[static_cast<size_t>(net.top_output)] == 1;
            emit(combo);
            return;
        }
        const auto& part = net.parts[static_cast<size_t>(p)];
        const int wire = wire_of[static_cast<size_t>(p)];
        auto try_option = [&](int choice, int dst, const BoolExpr& in, const BoolExpr& out,
                              const ClockConstraint* guard, const std::vector<int>* resets,
                              bool moves) {
            bool wv = pinned_output(out, wire);
            asg.wires[static_cast<size_t>(wire)] = wv ? 1 : 0;
            if (in.eval_with(asg)) {
                combo.choice[static_cast<size_t>(p)] = choice;
                combo.dst[static_cast<size_t>(p)] = dst;
                size_t gsz = combo.guards.size(), rsz = combo.resets.size();
                if (guard && !guard->is_true()) combo.guards.push_back(guard);
                if (resets)
                    for (int r : *resets)
                        combo.resets.emplace_back(p, r);
                rec(p + 1, states, initial, asg, combo, any_move || moves, emitted, emit, viable);
                combo.guards.resize(gsz);
                combo.resets.resize(rsz);
            }
            asg.wires[static_cast<size_t>(wire)] = 2;
        };

        if (initial) {
            for (int ti : init_of[static_cast<size_t>(p)]) {
                const auto& tr = part.transitions[static_cast<size_t>(ti)];
                try_option(ti, tr.dst, tr.in_label, tr.out_label, &tr.guard, &tr.resets, true);
            }
            return;
        }
        const int s = states[static_cast<size_t>(p)];
        const TstState& st = part.states[static_cast<size_t>(s)];
        // stay: the dwell continues through the point
        try_option(-1, s, st.in_label, st.out_label, nullptr, nullptr, false);
        const std::vector<int>& cand =
            viable ? (*viable)[static_cast<size_t>(p)] : from[static_cast<size_t>(p)][static_cast<size_t>(s)];
        for (int ti : cand) {
            if (stay_dup[static_cast<size_t>(p)][static_cast<size_t>(ti)]) continue;
            const auto& tr = part.transitions[static_cast<size_t>(ti)];
            try_option(ti, tr.dst, tr.in_label, tr.out_label, &tr.guard, &tr.resets, true);
        }
    }

    // --- zone plumbing ------------------------------------------------------

    // Cheap necessary condition for a conjunctive guard inside a zone:
    // every atom must overlap the clock's projection.
    bool guard_maybe(const Dbm& z, const ClockConstraint& g, int clock_offset) const {
        if (g.is_true()) return true;
        for (const auto& a : g.disjuncts[0]) {
            int idx = clock_offset + a.clock + 1;
            std::int64_t v = scaled(a.bound);
            const DbmBound& up = z.at(idx, 0);    // c <= up
            const DbmBound& lo = z.at(0, idx);    // -c <= lo, i.e. c >= -lo
            switch (a.rel) {
                case ClockAtom::Rel::LE:
                    if (!lo.inf && (-lo.value > v || (-lo.value == v && lo.strict))) return false;
                    break;
                case ClockAtom::Rel::LT:
                    if (!lo.inf && -lo.value >= v) return false;
                    break;
                case ClockAtom::Rel::GE:
                    if (!up.inf && (up.value < v || (up.value == v && up.strict))) return false;
                    break;
                case ClockAtom::Rel::GT:
                    if (!up.inf && up.value <= v) return false;
                    break;
            }
        }
        return true;
    }

    bool constrain_conj(Dbm& z, const std::vector<ClockAtom>& conj, int clock_offset) const {
        for (const auto& a : conj) {
            int c = clock_offset + a.clock + 1;
            std::int64_t v = scaled(a.bound);
            bool ok = true;
            switch (a.rel) {
                case ClockAtom::Rel::LE: ok = z.constrain(c, 0, DbmBound::le(v)); break;
                case ClockAtom::Rel::LT: ok = z.constrain(c, 0, DbmBound::lt(v)); break;
                case ClockAtom::Rel::GE: ok = z.constrain(0, c, DbmBound::le(-v)); break;
                case ClockAtom::Rel::GT: ok = z.constrain(0, c, DbmBound::lt(-v)); break;
            }
            if (!ok) return false;
        }
        return true;
    }

    bool apply_invariants(Dbm& z, const std::vector<int>& states) const {
        for (int p = 0; p < nparts; ++p) {
            const auto& inv =
                net.parts[static_cast<size_t>(p)].states[(size_t)states[(size_t)p]].invariant;
            if (!constrain_conj(z, inv.disjuncts[0], offset[static_cast<size_t>(p)])) return false;
        }
        return true;
    }

    bool dwell_consistent(const std::vector<int>& states, int j) const {
        wire_scratch.assign(static_cast<size_t>(var_space), 2);
        Assignment asg{&seg.values[static_cast<size_t>(j)], std::move(wire_scratch)};
        for (int p = 0; p < nparts; ++p) {
            const TstState& st =
                net.parts[static_cast<size_t>(p)].states[(size_t)states[(size_t)p]];
            asg.wires[static_cast<size_t>(wire_of[static_cast<size_t>(p)])] =
                pinned_output(st.out_label, wire_of[static_cast<size_t>(p)]) ? 1 : 0;
        }
        bool ok = true;
        for (int p = 0; p < nparts && ok; ++p) {
            const TstState& st =
                net.parts[static_cast<size_t>(p)].states[(size_t)states[(size_t)p]];
            if (!st.in_label.eval_with(asg)) ok = false;
        }
        wire_scratch = std::move(asg.wires);
        return ok;
    }

    bool stable_accepting(const std::vector<int>& states, int j) const {
        if (j != seg.segments() - 1) return false;
        if (!dwell_consistent(states, j)) return false;
        for (int p = 0; p < nparts; ++p) {
            const auto& part = net.parts[static_cast<size_t>(p)];
            int s = states[static_cast<size_t>(p)];
            if (!part.states[static_cast<size_t>(s)].invariant.upper_unbounded()) return false;
            if (!part.in_all_acceptance_sets(s)) return false;
        }
        return true;
    }

    std::vector<std::int64_t> effective_max(int j) const {
        std::vector<std::int64_t> m = max_const;
        if (j + 1 >= seg.segments()) m[kTau] = 0;
        return m;
    }

    // --- main search ---------------------------------------------------------

    struct Config {
        std::vector<int> states;
        int j;
        Dbm zone;
    };

    mutable std::vector<char> wire_scratch;
    mutable Dbm dbm_scratch;

    bool run() {
        std::deque<Config> queue;
        std::map<std::pair<std::vector<int>, int>, std::vector<Dbm>> visited;
        std::size_t expanded = 0;
        bool found = false;

        auto push = [&](std::vector<int> states, int j, Dbm z) {
            if (found || z.clocks() == 0 || z.empty()) return;
            z.extrapolate(effective_max(j));
            if (z.empty()) return;
            auto& zones = visited[{states, j}];
            for (const auto& old : zones)
                if (old.includes(z)) return;
            zones.erase(std::remove_if(zones.begin(), zones.end(),
                                       [&](const Dbm& old) { return z.includes(old); }),
                        zones.end());
            zones.push_back(z);
            if (stats) ++stats->zones_stored;
            if (stable_accepting(states, j)) {
                found = true;
                return;
            }
            queue.push_back({std::move(states), j, std::move(z)});
        };

        // simultaneous initial steps at time 0
        std::vector<int> no_states;
        combos(no_states, 0, true, [&](const Combo& c) {
            if (opts.require_output_true && !c.top_true) return;
            if (!dwell_consistent(c.dst, 0)) return;  // every step is followed by a dwell
            Dbm z = Dbm::zero(nclocks);
            if (!land_guarded(z, c)) return;
            push(c.dst, 0, std::move(z));
        });
        if (found) return true;

        while (!queue.empty()) {
            if (found) return true;
            Config cfg = std::move(queue.front());
            queue.pop_front();
            if (++expanded > opts.node_budget)
                throw std::runtime_error("accepts: node budget exceeded (Zeno gadget or blow-up)");
            if (stats) ++stats->expanded;

            const bool last = cfg.j + 1 >= seg.segments();
            const std::int64_t* seg_end =
                last ? nullptr : &seg_start_i[static_cast<size_t>(cfg.j + 1)];
            bool can_elapse = dwell_consistent(cfg.states, cfg.j);
            Dbm zr = cfg.zone;
            if (can_elapse) {
                zr.up();
                if (!apply_invariants(zr, cfg.states)) continue;
                if (seg_end && !zr.constrain(kTau + 1, 0, DbmBound::le(*seg_end))) continue;
            }

            // cross into the next segment without a discrete step
            if (!last && can_elapse && dwell_consistent(cfg.states, cfg.j + 1)) {
                Dbm zc = zr;
                if (zc.constrain(kTau + 1, 0, DbmBound::le(*seg_end)) &&
                    zc.constrain(0, kTau + 1, DbmBound::le(-*seg_end)))
                    push(cfg.states, cfg.j + 1, std::move(zc));
            }

            // shared base zones and per-part viable transitions
            Dbm z_in = zr;
            bool in_ok = z_in.constrain(0, kRho + 1, DbmBound::lt(0));  // rho > 0
            if (in_ok && seg_end) in_ok = z_in.constrain(kTau + 1, 0, DbmBound::lt(*seg_end));
            if (in_ok) {
                std::vector<std::vector<int>> viable(static_cast<size_t>(nparts));
                for (int p = 0; p < nparts; ++p)
                    for (int ti :
                         from[static_cast<size_t>(p)][(size_t)cfg.states[static_cast<size_t>(p)]]) {
                        const auto& tr = net.parts[(size_t)p].transitions[static_cast<size_t>(ti)];
                        if (guard_maybe(z_in, tr.guard, offset[static_cast<size_t>(p)]))
                            viable[static_cast<size_t>(p)].push_back(ti);
                    }
                // discrete steps strictly inside the segment
                combos(
                    cfg.states, cfg.j, false,
                    [&](const Combo& c) {
                        if (!dwell_consistent(c.dst, cfg.j)) return;
                        dbm_scratch = z_in;
                        if (!land_guarded(dbm_scratch, c)) return;
                        push(c.dst, cfg.j, dbm_scratch);
                    },
                    &viable);
            }
            // discrete steps exactly at the boundary read the next segment
            if (!last) {
                Dbm z_b = zr;
                bool b_ok = z_b.constrain(0, kRho + 1, DbmBound::lt(0)) &&
                            z_b.constrain(kTau + 1, 0, DbmBound::le(*seg_end)) &&
                            z_b.constrain(0, kTau + 1, DbmBound::le(-*seg_end));
                if (b_ok) {
                    std::vector<std::vector<int>> viable(static_cast<size_t>(nparts));
                    for (int p = 0; p < nparts; ++p)
                        for (int ti :
                             from[static_cast<size_t>(p)][(size_t)cfg.states[static_cast<size_t>(p)]]) {
                            const auto& tr =
                                net.parts[(size_t)p].transitions[static_cast<size_t>(ti)];
                            if (guard_maybe(z_b, tr.guard, offset[static_cast<size_t>(p)]))
                                viable[static_cast<size_t>(p)].push_back(ti);
                        }
                    combos(
                        cfg.states, cfg.j + 1, false,
                        [&](const Combo& c) {
                            if (!dwell_consistent(c.dst, cfg.j + 1)) return;
                            dbm_scratch = z_b;
                            if (!land_guarded(dbm_scratch, c)) return;
                            push(c.dst, cfg.j + 1, dbm_scratch);
                        },
                        &viable);
                }
            }
            if (found) return true;
        }
        return found;
    }

    // Applies guards (DNF: gadget guards are conjunctive), resets, and the
    // destination invariants. Returns false when the zone dies.
    bool land_guarded(Dbm& z, const Combo& c) const {
        for (int p = 0, gi = 0; p < nparts; ++p) {
            int ti = c.choice[static_cast<size_t>(p)];
            if (ti < 0) continue;
            const auto& tr = net.parts[static_cast<size_t>(p)].transitions[static_cast<size_t>(ti)];
            (void)gi;
            if (!tr.guard.is_true()) {
                if (!tr.guard.is_conjunctive())
                    throw std::logic_error("network guards must be conjunctive");
                if (!constrain_conj(z, tr.guard.disjuncts[0], offset[static_cast<size_t>(p)]))
                    return false;
            }
        }
        return land(z, c);
    }

    bool land(Dbm& z, const Combo& c) const {
        z.reset(kRho);
        for (const auto& [p, r] : c.resets) z.reset(offset[static_cast<size_t>(p)] + r);
        if (!apply_invariants(z, c.dst)) return false;
        return !z.empty();
    }
};

}  // namespace

bool network_accepts(const TstNetwork& net, const BooleanSignal& sig, const AcceptOptions& opts) {
    net.check_well_formed();
    if (net.num_props > sig.num_props)
        throw std::invalid_argument("accepts: signal does not cover the network propositions");
    Searcher s(net, sig, opts);
    bool r = s.run();
    if (s.stats)
        std::fprintf(stderr, "[accept-stats] expanded=%zu combos=%zu zones=%zu\n",
                     s.stats->expanded, s.stats->combos_emitted, s.stats->zones_stored);
    return r;
}

bool tst_accepts(const TimedSignalTransducer& tst, const BooleanSignal& sig,
                 const AcceptOptions& opts) {
    TstNetwork net;
    net.parts = {tst};
    net.num_props = sig.num_props;
    if (tst.output_vars.empty()) throw std::invalid_argument("tst_accepts: machine has no output");
    net.top_output = tst.output_vars[0];
    Searcher s(net, sig, opts);
    return s.run();
}

}  // namespace risitl
