#ifndef RISITL_RATIONAL_HPP
#define RISITL_RATIONAL_HPP

#include <cstdint>
#include <compare>
#include <numeric>
#include <stdexcept>
#include <string>

namespace risitl {

/// Exact rational number with machine-integer numerator/denominator.
///
/// Used for everything temporal: formula intervals, signal breakpoints,
/// clock guards and difference-bound matrices. Keeping these exact makes
/// guard comparisons sound; doubles are only used on the numeric side.
class Rational {
public:
    constexpr Rational() : num_(0), den_(1) {}
    Rational(std::int64_t n) : num_(n), den_(1) {}
    Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) { normalize(); }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    bool is_zero() const { return num_ == 0; }
    bool is_negative() const { return num_ < 0; }
    int sign() const { return num_ < 0 ? -1 : (num_ > 0 ? 1 : 0); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        __int128 n = (__int128)a.num_ * b.den_ + (__int128)b.num_ * a.den_;
        __int128 d = (__int128)a.den_ * b.den_;
        return make(n, d);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        __int128 n = (__int128)a.num_ * b.den_ - (__int128)b.num_ * a.den_;
        __int128 d = (__int128)a.den_ * b.den_;
        return make(n, d);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return make((__int128)a.num_ * b.num_, (__int128)a.den_ * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
        return make((__int128)a.num_ * b.den_, (__int128)a.den_ * b.num_);
    }
    Rational operator-() const { return Rational(-num_, den_); }

    Rational& operator+=(const Rational& o) { *this = *this + o; return *this; }
    Rational& operator-=(const Rational& o) { *this = *this - o; return *this; }
    Rational& operator*=(const Rational& o) { *this = *this * o; return *this; }
    Rational& operator/=(const Rational& o) { *this = *this / o; return *this; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        __int128 lhs = (__int128)a.num_ * b.den_;
        __int128 rhs = (__int128)b.num_ * a.den_;
        if (lhs < rhs) return std::strong_ordering::less;
        if (lhs > rhs) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    static Rational min(const Rational& a, const Rational& b) { return a < b ? a : b; }
    static Rational max(const Rational& a, const Rational& b) { return a > b ? a : b; }

    /// Parses "n", "n/d" or a decimal like "3.25" exactly.
    static Rational parse(const std::string& text);

    /// Floor of a/b as an integer (exact).
    std::int64_t floor() const {
        std::int64_t q = num_ / den_;
        if (num_ % den_ != 0 && num_ < 0) --q;
        return q;
    }

private:
    static Rational make(__int128 n, __int128 d) {
        if (d == 0) throw std::domain_error("Rational: zero denominator");
        if (d < 0) { n = -n; d = -d; }
        __int128 an = n < 0 ? -n : n;
        __int128 g = gcd128(an, d);
        if (g > 1) { n /= g; d /= g; }
        if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
            throw std::overflow_error("Rational: overflow");
        Rational r;
        r.num_ = (std::int64_t)n;
        r.den_ = (std::int64_t)d;
        return r;
    }
    static __int128 gcd128(__int128 a, __int128 b) {
        while (b != 0) { __int128 t = a % b; a = b; b = t; }
        return a < 0 ? -a : a;
    }
    void normalize() {
        if (den_ == 0) throw std::domain_error("Rational: zero denominator");
        if (den_ < 0) { num_ = -num_; den_ = -den_; }
        std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) { num_ /= g; den_ /= g; }
    }

    std::int64_t num_;
    std::int64_t den_;
};

}  // namespace risitl

#endif
