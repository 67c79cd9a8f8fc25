#ifndef RISITL_DBM_HPP
#define RISITL_DBM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "risitl/rational.hpp"
#include "risitl/tst.hpp"

namespace risitl {

/// Difference bound c_i - c_j <= value (strict turns <= into <), or +inf.
/// Values are integers; callers with rational constants pre-scale by the
/// common denominator so all zone arithmetic is exact int64.
struct DbmBound {
    std::int64_t value = 0;
    bool strict = false;
    bool inf = false;

    static DbmBound infinite() { return {0, false, true}; }
    static DbmBound le(std::int64_t v) { return {v, false, false}; }
    static DbmBound lt(std::int64_t v) { return {v, true, false}; }

    friend DbmBound operator+(const DbmBound& a, const DbmBound& b) {
        if (a.inf || b.inf) return infinite();
        return {a.value + b.value, a.strict || b.strict, false};
    }
    friend bool operator<(const DbmBound& a, const DbmBound& b) {
        if (a.inf) return false;
        if (b.inf) return true;
        if (a.value != b.value) return a.value < b.value;
        return a.strict && !b.strict;
    }
    friend bool operator==(const DbmBound& a, const DbmBound& b) {
        if (a.inf && b.inf) return true;
        if (a.inf != b.inf) return false;
        return a.value == b.value && a.strict == b.strict;
    }
    std::string str() const;
};

/// Canonical difference-bound matrix over clocks 1..m with reference clock 0.
/// Operations keep the matrix closed.
class Dbm {
public:
    Dbm() = default;
    explicit Dbm(int clocks);

    static Dbm zero(int clocks);           // all clocks exactly 0
    static Dbm unconstrained(int clocks);  // clocks >= 0 only

    int clocks() const { return n_ - 1; }
    const DbmBound& at(int i, int j) const { return m_[static_cast<size_t>(i * n_ + j)]; }

    bool empty() const;
    void close();
    /// Conjoins c_i - c_j (<=/<) v with incremental re-closure.
    bool constrain(int i, int j, const DbmBound& b);
    void up();                    // future closure (time elapse)
    void reset(int clock);        // clock := 0
    void free_clock(int clock);   // drop all constraints on it
    bool includes(const Dbm& other) const;
    bool operator==(const Dbm& o) const;
    /// Classic max-constant extrapolation (one constant per clock).
    void extrapolate(const std::vector<std::int64_t>& max_const);
    bool unbounded_in(int clock) const { return at(clock, 0).inf; }

    std::string str() const;

private:
    DbmBound& ref(int i, int j) { return m_[static_cast<size_t>(i * n_ + j)]; }
    int n_ = 0;
    std::vector<DbmBound> m_;
};

}  // namespace risitl

#endif
