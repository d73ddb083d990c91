#include "packbench/rational.hpp"

#include <charconv>

namespace packbench {

namespace {

std::int64_t parse_int(std::string_view text, std::string_view whole) {
    std::int64_t value = 0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || text.empty()) {
        throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
    }
    return value;
}

std::int64_t narrow(__int128 v) {
    if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("Rational overflow");
    return static_cast<std::int64_t>(v);
}

}  // namespace

Rational Rational::parse(std::string_view text) {
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(parse_int(text, text));
    return Rational(parse_int(text.substr(0, slash), text), parse_int(text.substr(slash + 1), text));
}

Rational operator+(const Rational& a, const Rational& b) {
    const std::int64_t g = std::gcd(a.den_, b.den_);
    const __int128 num = static_cast<__int128>(a.num_) * (b.den_ / g) +
                         static_cast<__int128>(b.num_) * (a.den_ / g);
    const __int128 den = static_cast<__int128>(a.den_ / g) * b.den_;
    // Reduce in 128 bits first so intermediate sums of many terms stay representable.
    __int128 n = num < 0 ? -num : num;
    __int128 d = den;
    while (d != 0) {
        const __int128 t = n % d;
        n = d;
        d = t;
    }
    const __int128 common = n == 0 ? 1 : n;
    return Rational(narrow(num / common), narrow(den / common));
}

Rational operator-(const Rational& a, const Rational& b) {
    return a + Rational(-b.num_, b.den_);
}

Rational operator*(const Rational& a, const Rational& b) {
    const std::int64_t g1 = std::gcd(a.num_ < 0 ? -a.num_ : a.num_, b.den_);
    const std::int64_t g2 = std::gcd(b.num_ < 0 ? -b.num_ : b.num_, a.den_);
    const __int128 num = static_cast<__int128>(a.num_ / g1) * (b.num_ / g2);
    const __int128 den = static_cast<__int128>(a.den_ / g2) * (b.den_ / g1);
    return Rational(narrow(num), narrow(den));
}

}  // namespace packbench
