#include "risitl/interval_set.hpp"

#include <algorithm>

namespace risitl {

std::string TimeInterval::str() const {
    std::string s = lo_closed ? "[" : "(";
    s += lo.str();
    s += ",";
    s += hi_inf ? "inf)" : hi.str() + (hi_closed ? "]" : ")");
    return s;
}

namespace {

// a touches-or-overlaps b, assuming a.lo <= b.lo. Adjacent intervals like
// [0,1) [1,2] merge; (0,1) (1,2) do not (the point 1 is missing).
bool mergeable(const TimeInterval& a, const TimeInterval& b) {
    if (a.hi_inf) return true;
    if (b.lo < a.hi) return true;
    if (b.lo == a.hi) return a.hi_closed || b.lo_closed;
    return false;
}

}  // namespace

void IntervalSet::add(const TimeInterval& iv_in) {
    TimeInterval iv = iv_in;
    // Clip to [0, inf).
    if (!iv.hi_inf && iv.hi < Rational(0)) return;
    if (iv.lo < Rational(0)) { iv.lo = Rational(0); iv.lo_closed = true; }
    if (iv.empty()) return;

    std::vector<TimeInterval> all = parts_;
    all.push_back(iv);
    std::sort(all.begin(), all.end(), [](const TimeInterval& a, const TimeInterval& b) {
        if (a.lo != b.lo) return a.lo < b.lo;
        return a.lo_closed && !b.lo_closed;
    });
    parts_.clear();
    for (const auto& p : all) {
        if (p.empty()) continue;
        if (!parts_.empty() && mergeable(parts_.back(), p)) {
            TimeInterval& m = parts_.back();
            if (m.hi_inf || p.hi_inf) {
                m.hi_inf = true;
            } else if (!m.hi_inf && (p.hi > m.hi || (p.hi == m.hi && p.hi_closed))) {
                m.hi = p.hi;
                m.hi_closed = p.hi_closed;
            }
        } else {
            parts_.push_back(p);
        }
    }
}

bool IntervalSet::contains(const Rational& t) const {
    for (const auto& p : parts_) {
        if (p.contains(t)) return true;
        if (!p.hi_inf && p.hi < t) continue;
        if (p.lo > t) break;
    }
    return false;
}

IntervalSet set_union(const IntervalSet& a, const IntervalSet& b) {
    IntervalSet r = a;
    for (const auto& p : b.parts_) r.add(p);
    return r;
}

IntervalSet set_intersect(const IntervalSet& a, const IntervalSet& b) {
    IntervalSet r;
    for (const auto& x : a.parts_) {
        for (const auto& y : b.parts_) {
            TimeInterval z;
            if (x.lo > y.lo || (x.lo == y.lo && !x.lo_closed)) {
                z.lo = x.lo; z.lo_closed = x.lo_closed;
                if (x.lo == y.lo) z.lo_closed = x.lo_closed && y.lo_closed;
            } else {
                z.lo = y.lo; z.lo_closed = y.lo_closed;
                if (x.lo == y.lo) z.lo_closed = x.lo_closed && y.lo_closed;
            }
            if (x.hi_inf && y.hi_inf) {
                z.hi_inf = true;
            } else if (x.hi_inf) {
                z.hi = y.hi; z.hi_closed = y.hi_closed;
            } else if (y.hi_inf) {
                z.hi = x.hi; z.hi_closed = x.hi_closed;
            } else if (x.hi < y.hi) {
                z.hi = x.hi; z.hi_closed = x.hi_closed;
            } else if (y.hi < x.hi) {
                z.hi = y.hi; z.hi_closed = y.hi_closed;
            } else {
                z.hi = x.hi; z.hi_closed = x.hi_closed && y.hi_closed;
            }
            if (!z.empty()) r.add(z);
        }
    }
    return r;
}

IntervalSet set_complement(const IntervalSet& a) {
    IntervalSet r;
    Rational cur(0);
    bool cur_closed = true;  // next gap starts at cur, closed unless excluded
    for (const auto& p : a.parts_) {
        // gap [cur, p.lo) or variants
        TimeInterval gap;
        gap.lo = cur;
        gap.lo_closed = cur_closed;
        gap.hi = p.lo;
        gap.hi_closed = !p.lo_closed;
        gap.hi_inf = false;
        if (!gap.empty()) r.add(gap);
        if (p.hi_inf) return r;
        cur = p.hi;
        cur_closed = !p.hi_closed;
    }
    TimeInterval tail;
    tail.lo = cur;
    tail.lo_closed = cur_closed;
    tail.hi_inf = true;
    r.add(tail);
    return r;
}

IntervalSet IntervalSet::back_shift(const Rational& i_lo, bool i_lo_closed,
                                    const std::optional<Rational>& i_hi, bool i_hi_closed) const {
    IntervalSet r;
    for (const auto& p : parts_) {
        TimeInterval z;
        // lower bound: p.lo - i_hi  (or -inf when I unbounded -> clips to 0)
        if (!i_hi.has_value()) {
            z.lo = Rational(0);
            z.lo_closed = true;
        } else {
            z.lo = p.lo - *i_hi;
            z.lo_closed = p.lo_closed && i_hi_closed;
        }
        // upper bound: p.hi - i_lo
        if (p.hi_inf) {
            z.hi_inf = true;
        } else {
            z.hi = p.hi - i_lo;
            z.hi_closed = p.hi_closed && i_lo_closed;
            z.hi_inf = false;
        }
        if (z.lo < Rational(0)) { z.lo = Rational(0); z.lo_closed = true; }
        if (!z.empty()) r.add(z);
    }
    return r;
}

bool IntervalSet::operator==(const IntervalSet& o) const {
    if (parts_.size() != o.parts_.size()) return false;
    for (size_t i = 0; i < parts_.size(); ++i) {
        const auto& a = parts_[i];
        const auto& b = o.parts_[i];
        if (a.lo != b.lo || a.lo_closed != b.lo_closed || a.hi_inf != b.hi_inf) return false;
        if (!a.hi_inf && (a.hi != b.hi || a.hi_closed != b.hi_closed)) return false;
    }
    return true;
}

std::string IntervalSet::str() const {
    if (parts_.empty()) return "{}";
    std::string s;
    for (size_t i = 0; i < parts_.size(); ++i) {
        if (i) s += " u ";
        s += parts_[i].str();
    }
    return s;
}

}  // namespace risitl
