#ifndef RISITL_INTERVAL_SET_HPP
#define RISITL_INTERVAL_SET_HPP

#include <optional>
#include <string>
#include <vector>

#include "risitl/rational.hpp"

namespace risitl {

/// One interval of R>=0 with endpoint flags. The upper endpoint may be +inf
/// (hi_inf set, hi ignored). Degenerate single points [a,a] are allowed.
struct TimeInterval {
    Rational lo;
    Rational hi;
    bool lo_closed = true;
    bool hi_closed = true;
    bool hi_inf = false;

    static TimeInterval point(const Rational& t) { return {t, t, true, true, false}; }
    static TimeInterval closed(const Rational& a, const Rational& b) { return {a, b, true, true, false}; }
    static TimeInterval ray(const Rational& a, bool closed = true) { return {a, Rational(0), closed, false, true}; }

    bool empty() const {
        if (hi_inf) return false;
        if (lo < hi) return false;
        if (lo > hi) return true;
        return !(lo_closed && hi_closed);
    }
    bool contains(const Rational& t) const {
        if (t < lo || (t == lo && !lo_closed)) return false;
        if (hi_inf) return true;
        if (t > hi || (t == hi && !hi_closed)) return false;
        return true;
    }
    std::string str() const;
};

/// Canonical finite union of disjoint, non-adjacent intervals, sorted by
/// lower endpoint. This is the satisfaction-set representation used by the
/// interval-based MITL semantics.
class IntervalSet {
public:
    IntervalSet() = default;
    explicit IntervalSet(std::vector<TimeInterval> parts) { for (auto& p : parts) add(p); }

    static IntervalSet empty_set() { return IntervalSet(); }
    static IntervalSet full() { IntervalSet s; s.add(TimeInterval::ray(Rational(0))); return s; }
    static IntervalSet single(const TimeInterval& iv) { IntervalSet s; s.add(iv); return s; }

    void add(const TimeInterval& iv);

    bool empty() const { return parts_.empty(); }
    bool contains(const Rational& t) const;
    const std::vector<TimeInterval>& parts() const { return parts_; }
    std::size_t size() const { return parts_.size(); }

    friend IntervalSet set_union(const IntervalSet& a, const IntervalSet& b);
    friend IntervalSet set_intersect(const IntervalSet& a, const IntervalSet& b);
    /// Complement with respect to [0, +inf).
    friend IntervalSet set_complement(const IntervalSet& a);

    /// Minkowski back-shift { t'' - s : t'' in this, s in I } intersected
    /// with [0, inf). I is given by its endpoints/flags; ub_inf makes I
    /// unbounded above. Endpoint openness follows interval arithmetic:
    /// a bound of the result is closed only when both contributing bounds
    /// are closed.
    IntervalSet back_shift(const Rational& i_lo, bool i_lo_closed,
                           const std::optional<Rational>& i_hi, bool i_hi_closed) const;

    bool operator==(const IntervalSet& o) const;
    std::string str() const;

private:
    std::vector<TimeInterval> parts_;
};

}  // namespace risitl

#endif
