#include "risitl/rational.hpp"

#include <cctype>
#include <cstdlib>

namespace risitl {

Rational Rational::parse(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("Rational::parse: empty string");
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        std::int64_t n = std::stoll(text.substr(0, slash));
        std::int64_t d = std::stoll(text.substr(slash + 1));
        return Rational(n, d);
    }
    auto dot = text.find('.');
    if (dot == std::string::npos) {
        return Rational(std::stoll(text));
    }
    std::string whole = text.substr(0, dot);
    std::string frac = text.substr(dot + 1);
    for (char c : frac)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw std::invalid_argument("Rational::parse: bad decimal '" + text + "'");
    bool neg = !whole.empty() && whole[0] == '-';
    std::int64_t w = whole.empty() || whole == "-" || whole == "+" ? 0 : std::stoll(whole);
    if (w < 0) w = -w;
    std::int64_t den = 1;
    for (size_t i = 0; i < frac.size(); ++i) {
        if (den > INT64_MAX / 10) throw std::overflow_error("Rational::parse: too many digits");
        den *= 10;
    }
    std::int64_t num = w * den + (frac.empty() ? 0 : std::stoll(frac));
    if (neg) num = -num;
    return Rational(num, den);
}

}  // namespace risitl
