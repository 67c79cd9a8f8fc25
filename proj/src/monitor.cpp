#include "risitl/monitor.hpp"

#include <cmath>
#include <stdexcept>

#include "risitl/risk.hpp"

namespace risitl {

BooleanSignal BooleanSignal::constant(int num_props, const std::vector<bool>& values,
                                      const Rational& horizon) {
    BooleanSignal s;
    s.num_props = num_props;
    s.horizon = horizon;
    s.breakpoints.resize(static_cast<size_t>(num_props));
    for (int p = 0; p < num_props; ++p)
        s.breakpoints[static_cast<size_t>(p)] = {{Rational(0), values.at(static_cast<size_t>(p))}};
    return s;
}

void BooleanSignal::set_segments(int prop, std::vector<std::pair<Rational, bool>> bps) {
    if (bps.empty() || !bps.front().first.is_zero())
        throw std::invalid_argument("signal breakpoints must start at time 0");
    for (size_t i = 1; i < bps.size(); ++i)
        if (!(bps[i - 1].first < bps[i].first))
            throw std::invalid_argument("signal breakpoints must be strictly increasing");
    if (static_cast<int>(breakpoints.size()) <= prop) breakpoints.resize(static_cast<size_t>(prop) + 1);
    breakpoints[static_cast<size_t>(prop)] = std::move(bps);
    if (static_cast<int>(breakpoints.size()) > num_props) num_props = static_cast<int>(breakpoints.size());
}

bool BooleanSignal::value_at(int prop, const Rational& t) const {
    const auto& bps = breakpoints.at(static_cast<size_t>(prop));
    bool v = bps.front().second;
    for (const auto& [time, val] : bps) {
        if (time <= t) v = val;
        else break;
    }
    return v;
}

IntervalSet BooleanSignal::atom_sat(int prop) const {
    const auto& bps = breakpoints.at(static_cast<size_t>(prop));
    IntervalSet out;
    for (size_t i = 0; i < bps.size(); ++i) {
        if (!bps[i].second) continue;
        TimeInterval iv;
        iv.lo = bps[i].first;
        iv.lo_closed = true;
        if (i + 1 < bps.size()) {
            iv.hi = bps[i + 1].first;
            iv.hi_closed = false;
        } else {
            iv.hi_inf = true;  // last value held forever
        }
        out.add(iv);
    }
    return out;
}

namespace {

IntervalSet until_sat(const IntervalSet& s1, const IntervalSet& s2, const FormulaInterval& I) {
    IntervalSet out;
    // t'' = t allowed only when 0 is in I; then t itself must satisfy phi2
    // (the open interval (t,t) is vacuous).
    if (I.contains_zero()) out = s2;
    std::optional<Rational> i_hi;
    if (!I.unbounded) i_hi = I.hi;
    for (const auto& k : s1.parts()) {
        // Witness t'' may sit anywhere in sat(phi2) with t'' <= k.hi; the
        // endpoint itself qualifies regardless of k's own flag because
        // (t, t'') is open. t >= k.lo for the same reason.
        IntervalSet clipped;
        for (const auto& j : s2.parts()) {
            TimeInterval z = j;
            if (!k.hi_inf) {
                if (z.lo > k.hi) continue;
                if (z.hi_inf || z.hi > k.hi) {
                    z.hi = k.hi;
                    z.hi_closed = true;
                    z.hi_inf = false;
                }
            }
            if (!z.empty()) clipped.add(z);
        }
        IntervalSet shifted = clipped.back_shift(I.lo, I.lo_closed, i_hi, I.hi_closed);
        for (const auto& part : shifted.parts()) {
            TimeInterval z = part;
            if (!z.hi_inf && z.hi < k.lo) continue;
            if (z.lo < k.lo) {
                z.lo = k.lo;
                z.lo_closed = true;
            }
            if (!z.empty()) out.add(z);
        }
    }
    return out;
}

}  // namespace

IntervalSet mitl_sat_set(const BooleanSignal& sig, const Formula::Ptr& f) {
    switch (f->kind) {
        case FormulaKind::True:
            return IntervalSet::full();
        case FormulaKind::Atom:
            return sig.atom_sat(f->atom);
        case FormulaKind::Not:
            return set_complement(mitl_sat_set(sig, f->lhs));
        case FormulaKind::And:
            return set_intersect(mitl_sat_set(sig, f->lhs), mitl_sat_set(sig, f->rhs));
        case FormulaKind::Or:
            return set_union(mitl_sat_set(sig, f->lhs), mitl_sat_set(sig, f->rhs));
        case FormulaKind::Until:
            return until_sat(mitl_sat_set(sig, f->lhs), mitl_sat_set(sig, f->rhs), f->interval);
        case FormulaKind::Eventually: {
            std::optional<Rational> hi;
            if (!f->interval.unbounded) hi = f->interval.hi;
            return mitl_sat_set(sig, f->lhs)
                .back_shift(f->interval.lo, f->interval.lo_closed, hi, f->interval.hi_closed);
        }
        case FormulaKind::Always: {
            std::optional<Rational> hi;
            if (!f->interval.unbounded) hi = f->interval.hi;
            auto bad = set_complement(mitl_sat_set(sig, f->lhs));
            return set_complement(
                bad.back_shift(f->interval.lo, f->interval.lo_closed, hi, f->interval.hi_closed));
        }
        case FormulaKind::Periodic: {
            if (!f->repetitions)
                throw std::invalid_argument("monitor: periodic node needs a finite repetition count");
            IntervalSet body = mitl_sat_set(sig, f->lhs);
            IntervalSet out = IntervalSet::full();
            for (long k = 0; k < *f->repetitions; ++k) {
                Rational d = f->period_start + f->period * Rational(k);
                // exact shift: {t : t + d in body}
                out = set_intersect(out, body.back_shift(d, true, d, true));
            }
            return out;
        }
    }
    return IntervalSet::empty_set();
}

bool mitl_satisfies(const BooleanSignal& sig, const Formula::Ptr& f, const Rational& t) {
    auto h = horizon(f);
    if (h && sig.horizon < *h + t)
        throw std::invalid_argument("monitor: signal horizon " + sig.horizon.str() +
                                    " too short for formula horizon " + (*h + t).str());
    return mitl_sat_set(sig, f).contains(t);
}

BooleanSignal booleanize(const BeliefPath& path, const PredicateTable& table) {
    if (path.samples.empty()) throw std::invalid_argument("booleanize: empty trajectory");
    BooleanSignal sig;
    sig.num_props = table.size();
    sig.breakpoints.resize(static_cast<size_t>(table.size()));
    sig.horizon = path.step * Rational(static_cast<std::int64_t>(path.samples.size()) - 1);
    for (int p = 0; p < table.size(); ++p) {
        const Predicate& pred = table.at(p);
        std::vector<std::pair<Rational, bool>> bps;
        for (size_t i = 0; i < path.samples.size(); ++i) {
            const auto& s = path.samples[i];
            bool v = tightened_holds(pred.a, pred.b, pred.eta, s.mean, s.cov);
            if (bps.empty() || bps.back().second != v)
                bps.emplace_back(path.step * Rational(static_cast<std::int64_t>(i)), v);
        }
        sig.breakpoints[static_cast<size_t>(p)] = std::move(bps);
    }
    return sig;
}

bool risitl_satisfies(const BeliefPath& path, const Formula::Ptr& f, const PredicateTable& table,
                      const Rational& t) {
    BooleanSignal sig = booleanize(path, table);
    return mitl_satisfies(sig, f, t);
}

}  // namespace risitl
