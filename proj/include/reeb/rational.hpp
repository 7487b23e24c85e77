#pragma once

#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace reeb {

/// Exact rational number with 64-bit numerator/denominator storage and
/// 128-bit intermediates.  Function values, smoothing offsets, interval
/// endpoints and search probes are all rationals, so every comparison the
/// library makes is exact; doubles appear only at the presentation layer
/// (CSV/JSON output and back).
///
/// Always stored normalized: den > 0, gcd(|num|, den) = 1.
class Rat {
public:
    Rat() : num_(0), den_(1) {}
    Rat(int64_t n) : num_(n), den_(1) {}
    Rat(int64_t n, int64_t d) { init(n, d); }

    int64_t num() const { return num_; }
    int64_t den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_negative() const { return num_ < 0; }
    bool is_integer() const { return den_ == 1; }

    friend Rat operator-(const Rat& a) { return Rat(-a.num_, a.den_); }

    friend Rat operator+(const Rat& a, const Rat& b) {
        __int128 n = (__int128)a.num_ * b.den_ + (__int128)b.num_ * a.den_;
        __int128 d = (__int128)a.den_ * b.den_;
        return from128(n, d);
    }
    friend Rat operator-(const Rat& a, const Rat& b) { return a + (-b); }
    friend Rat operator*(const Rat& a, const Rat& b) {
        return from128((__int128)a.num_ * b.num_, (__int128)a.den_ * b.den_);
    }
    friend Rat operator/(const Rat& a, const Rat& b) {
        if (b.num_ == 0) throw std::domain_error("rational division by zero");
        return from128((__int128)a.num_ * b.den_, (__int128)a.den_ * b.num_);
    }

    Rat& operator+=(const Rat& o) { return *this = *this + o; }
    Rat& operator-=(const Rat& o) { return *this = *this - o; }
    Rat& operator*=(const Rat& o) { return *this = *this * o; }
    Rat& operator/=(const Rat& o) { return *this = *this / o; }

    friend bool operator==(const Rat& a, const Rat& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
    friend bool operator<(const Rat& a, const Rat& b) {
        return (__int128)a.num_ * b.den_ < (__int128)b.num_ * a.den_;
    }
    friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
    friend bool operator<=(const Rat& a, const Rat& b) { return !(b < a); }
    friend bool operator>=(const Rat& a, const Rat& b) { return !(a < b); }

    Rat abs() const { return num_ < 0 ? -*this : *this; }

    /// Largest integer <= the value.
    int64_t floor_int() const {
        int64_t q = num_ / den_;
        if (num_ % den_ != 0 && num_ < 0) --q;
        return q;
    }

    double to_double() const { return (double)num_ / (double)den_; }

    /// Parses a decimal literal: [-]digits[.digits][e[-]digits].
    /// Exact; throws std::invalid_argument on malformed or oversized input.
    static Rat from_decimal(std::string_view s);

    /// Exact decimal expansion when the denominator is of the form 2^a 5^b;
    /// otherwise rounds (half-even) to `max_digits` fractional digits.
    /// Deterministic, used for all report output.
    std::string to_decimal_string(int max_digits = 12) const;

    /// "num/den" form, always exact; used in certificate files.
    std::string to_fraction_string() const;
    static Rat from_fraction_string(std::string_view s);

private:
    int64_t num_, den_;

    void init(int64_t n, int64_t d) {
        if (d == 0) throw std::domain_error("rational with zero denominator");
        if (d < 0) { n = -n; d = -d; }
        int64_t g = std::gcd(n < 0 ? -n : n, d);
        if (g > 1) { n /= g; d /= g; }
        num_ = n;
        den_ = d;
    }

    static Rat from128(__int128 n, __int128 d) {
        if (d < 0) { n = -n; d = -d; }
        __int128 an = n < 0 ? -n : n;
        __int128 g = gcd128(an, d);
        if (g > 1) { n /= g; d /= g; }
        if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
            throw std::overflow_error("rational overflow");
        Rat r;
        r.num_ = (int64_t)n;
        r.den_ = (int64_t)d;
        return r;
    }

    static __int128 gcd128(__int128 a, __int128 b) {
        while (b != 0) {
            __int128 t = a % b;
            a = b;
            b = t;
        }
        return a;
    }
};

inline Rat rat_min(const Rat& a, const Rat& b) { return a < b ? a : b; }
inline Rat rat_max(const Rat& a, const Rat& b) { return a < b ? b : a; }

} // namespace reeb
