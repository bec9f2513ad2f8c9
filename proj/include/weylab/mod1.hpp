#pragma once

#include <weylab/error.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <type_traits>

namespace weylab {

using u128 = unsigned __int128;
using i128 = __int128;

namespace detail {

using big_int = boost::multiprecision::cpp_int;

template <class Word>
big_int to_big(Word w)
{
    if constexpr (sizeof(Word) <= 8) {
        return big_int(static_cast<std::uint64_t>(w));
    } else {
        big_int hi(static_cast<std::uint64_t>(w >> 64));
        big_int lo(static_cast<std::uint64_t>(w));
        return (hi << 64) | lo;
    }
}

template <class Word>
Word from_big(const big_int& v)
{
    if constexpr (sizeof(Word) <= 8) {
        return static_cast<Word>(static_cast<std::uint64_t>(v & big_int(~std::uint64_t{0})));
    } else {
        const big_int mask(~std::uint64_t{0});
        auto lo = static_cast<std::uint64_t>(v & mask);
        auto hi = static_cast<std::uint64_t>((v >> 64) & mask);
        return (static_cast<Word>(hi) << 64) | lo;
    }
}

inline big_int pow10(unsigned n)
{
    big_int r = 1;
    for (unsigned i = 0; i < n; ++i) r *= 10;
    return r;
}

// Parses "[-]digits[.digits][e[+-]digits]" or "[-]p/q" into an exact fraction.
inline void parse_exact(std::string_view text, big_int& num, big_int& den)
{
    auto fail = [&] { throw config_error("cannot parse coefficient '" + std::string(text) + "'"); };
    if (text.empty()) fail();

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        big_int p, q, one;
        parse_exact(text.substr(0, slash), p, one);
        if (one != 1) fail();
        parse_exact(text.substr(slash + 1), q, one);
        if (one != 1 || q == 0) fail();
        if (q < 0) {
            p = -p;
            q = -q;
        }
        num = p;
        den = q;
        return;
    }

    std::size_t i = 0;
    bool negative = false;
    if (text[i] == '+' || text[i] == '-') {
        negative = text[i] == '-';
        ++i;
    }
    big_int digits = 0;
    long scale = 0;
    bool any = false;
    bool seen_point = false;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c >= '0' && c <= '9') {
            digits = digits * 10 + (c - '0');
            if (seen_point) --scale;
            any = true;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!any) fail();
    if (i < text.size()) {
        if (text[i] != 'e' && text[i] != 'E') fail();
        ++i;
        bool exp_negative = false;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
            exp_negative = text[i] == '-';
            ++i;
        }
        if (i == text.size()) fail();
        long exponent = 0;
        for (; i < text.size(); ++i) {
            char c = text[i];
            if (c < '0' || c > '9' || exponent > 100000) fail();
            exponent = exponent * 10 + (c - '0');
        }
        scale += exp_negative ? -exponent : exponent;
    }
    if (negative) digits = -digits;
    if (scale >= 0) {
        num = digits * pow10(static_cast<unsigned>(scale));
        den = 1;
    } else {
        num = digits;
        den = pow10(static_cast<unsigned>(-scale));
    }
}

} // namespace detail

/// A point of the circle R/Z stored as an unsigned W-bit fraction frac/2^W.
/// Addition, subtraction and multiplication by integers wrap modulo 2^W,
/// which is exactly arithmetic modulo 1 on the 2^-W grid.
template <class Word = u128>
class basic_mod1 {
    static_assert(std::is_unsigned_v<Word> || std::is_same_v<Word, u128>);

public:
    using word_type = Word;
    static constexpr unsigned width = sizeof(Word) * 8;

    enum class rounding { nearest, down };

    constexpr basic_mod1() = default;
    constexpr explicit basic_mod1(Word frac) : frac_(frac) {}

    static constexpr basic_mod1 from_bits(Word frac) { return basic_mod1(frac); }

    /// Rounds num/den mod 1 to the nearest grid point (ties to even).
    static basic_mod1 from_fraction(const detail::big_int& num, const detail::big_int& den)
    {
        if (den <= 0) throw domain_error("fraction with non-positive denominator");
        detail::big_int n = num % den;
        if (n < 0) n += den;
        detail::big_int scaled = n << width;
        detail::big_int q = scaled / den;
        detail::big_int r = scaled % den;
        detail::big_int twice = r * 2;
        if (twice > den || (twice == den && (q & 1) != 0)) q += 1;
        return basic_mod1(detail::from_big<Word>(q));
    }

    /// Accepts decimal strings ("0.1357", "-2.5e-3") and rationals ("3/7").
    static basic_mod1 parse(std::string_view text)
    {
        detail::big_int num, den;
        detail::parse_exact(text, num, den);
        return from_fraction(num, den);
    }

    /// Exact conversion of a double reduced mod 1; only the final step onto
    /// the 2^-W grid rounds.
    static basic_mod1 from_double(double v, rounding mode = rounding::nearest)
    {
        if (!std::isfinite(v)) throw domain_error("non-finite value cannot be reduced mod 1");
        if (v == 0.0) return {};
        bool negative = v < 0;
        int exponent = 0;
        double mantissa = std::frexp(std::fabs(v), &exponent);
        // |v| = m * 2^(exponent - 53) with m a 53-bit integer
        auto m = static_cast<std::uint64_t>(std::ldexp(mantissa, 53));
        int shift = exponent - 53 + static_cast<int>(width);
        Word bits = 0;
        if (shift >= static_cast<int>(width)) {
            bits = 0;
        } else if (shift >= 0) {
            bits = static_cast<Word>(m) << shift;
        } else if (shift > -64) {
            std::uint64_t q = m >> (-shift);
            std::uint64_t rem = m & ((std::uint64_t{1} << (-shift)) - 1);
            std::uint64_t half = std::uint64_t{1} << (-shift - 1);
            bool round_up = mode == rounding::nearest && (rem > half || (rem == half && (q & 1)));
            if (negative && mode == rounding::down && rem != 0) round_up = true;
            bits = static_cast<Word>(q + (round_up ? 1 : 0));
        } else if (negative && mode == rounding::down) {
            bits = 1;
        }
        basic_mod1 r(bits);
        return negative ? -r : r;
    }

    constexpr Word bits() const noexcept { return frac_; }
    constexpr bool is_zero() const noexcept { return frac_ == 0; }

    /// Nearest double in [0,1]; values within 2^-54 of 1 round to 1.0.
    double to_double() const { return std::ldexp(static_cast<double>(frac_), -static_cast<int>(width)); }

    /// Representative in [-1/2, 1/2).
    double to_centered() const
    {
        using signed_word = std::conditional_t<std::is_same_v<Word, u128>, i128, std::make_signed_t<Word>>;
        return std::ldexp(static_cast<double>(static_cast<signed_word>(frac_)), -static_cast<int>(width));
    }

    /// Distance to the nearest integer, ||theta||.
    double distance_to_integer() const
    {
        Word neg = static_cast<Word>(Word{0} - frac_);
        return std::ldexp(static_cast<double>(frac_ < neg ? frac_ : neg), -static_cast<int>(width));
    }

    /// Decimal expansion with the given number of fractional digits, rounded
    /// to nearest. 40 digits are enough to reparse a 128-bit value exactly.
    std::string to_decimal(unsigned digits = 40) const
    {
        detail::big_int scaled = detail::to_big(frac_) * detail::pow10(digits);
        detail::big_int q = scaled >> width;
        detail::big_int r = scaled - (q << width);
        if (r * 2 >= (detail::big_int(1) << width)) q += 1;
        std::string body = q.str();
        if (q == detail::pow10(digits)) return "1." + std::string(digits, '0');
        if (body.size() < digits) body.insert(0, digits - body.size(), '0');
        return "0." + body;
    }

    std::string to_hex() const
    {
        static constexpr char digits[] = "0123456789abcdef";
        std::string out = "0x";
        for (int shift = static_cast<int>(width) - 4; shift >= 0; shift -= 4)
            out.push_back(digits[static_cast<unsigned>((frac_ >> shift) & 0xF)]);
        return out;
    }

    constexpr basic_mod1& operator+=(basic_mod1 o) noexcept
    {
        frac_ = static_cast<Word>(frac_ + o.frac_);
        return *this;
    }
    constexpr basic_mod1& operator-=(basic_mod1 o) noexcept
    {
        frac_ = static_cast<Word>(frac_ - o.frac_);
        return *this;
    }
    constexpr basic_mod1& operator*=(Word n) noexcept
    {
        frac_ = static_cast<Word>(frac_ * n);
        return *this;
    }

    friend constexpr basic_mod1 operator+(basic_mod1 a, basic_mod1 b) noexcept { return a += b; }
    friend constexpr basic_mod1 operator-(basic_mod1 a, basic_mod1 b) noexcept { return a -= b; }
    friend constexpr basic_mod1 operator-(basic_mod1 a) noexcept { return basic_mod1(static_cast<Word>(Word{0} - a.frac_)); }
    friend constexpr basic_mod1 operator*(basic_mod1 a, Word n) noexcept { return a *= n; }
    friend constexpr basic_mod1 operator*(Word n, basic_mod1 a) noexcept { return a *= n; }

    friend constexpr bool operator==(basic_mod1 a, basic_mod1 b) noexcept { return a.frac_ == b.frac_; }
    friend constexpr bool operator<(basic_mod1 a, basic_mod1 b) noexcept { return a.frac_ < b.frac_; }
    friend constexpr bool operator>(basic_mod1 a, basic_mod1 b) noexcept { return b < a; }
    friend constexpr bool operator<=(basic_mod1 a, basic_mod1 b) noexcept { return !(b < a); }
    friend constexpr bool operator>=(basic_mod1 a, basic_mod1 b) noexcept { return !(a < b); }

private:
    Word frac_ = 0;
};

using Mod1Fixed = basic_mod1<u128>;
using Mod1Fixed64 = basic_mod1<std::uint64_t>;

} // namespace weylab
