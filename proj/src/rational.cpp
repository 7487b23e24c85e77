#include "reeb/rational.hpp"

namespace reeb {

namespace {

int64_t pow10_i64(int e) {
    int64_t p = 1;
    for (int i = 0; i < e; ++i) p *= 10;
    return p;
}

} // namespace

Rat Rat::from_decimal(std::string_view s) {
    size_t i = 0;
    auto fail = [&](const char* why) {
        throw std::invalid_argument("bad decimal literal '" + std::string(s) + "': " + why);
    };
    if (s.empty()) fail("empty");
    bool neg = false;
    if (s[i] == '+' || s[i] == '-') {
        neg = s[i] == '-';
        ++i;
    }
    __int128 mant = 0;
    int digits = 0, frac_digits = 0;
    bool seen_digit = false, in_frac = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c >= '0' && c <= '9') {
            if (digits >= 18 && !(mant == 0 && c == '0')) fail("too many digits");
            mant = mant * 10 + (c - '0');
            if (mant != 0 || c != '0' || in_frac) ++digits;
            if (in_frac) ++frac_digits;
            seen_digit = true;
        } else if (c == '.') {
            if (in_frac) fail("repeated '.'");
            in_frac = true;
        } else if (c == 'e' || c == 'E') {
            break;
        } else {
            fail("unexpected character");
        }
    }
    if (!seen_digit) fail("no digits");
    int exp = 0;
    if (i < s.size()) {
        ++i; // past 'e'
        bool eneg = false;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
            eneg = s[i] == '-';
            ++i;
        }
        if (i == s.size()) fail("empty exponent");
        for (; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9') fail("bad exponent");
            exp = exp * 10 + (s[i] - '0');
            if (exp > 30) fail("exponent out of range");
        }
        if (eneg) exp = -exp;
    }
    int denom_pow = frac_digits - exp;
    if (neg) mant = -mant;
    if (denom_pow > 27 || denom_pow < -27) fail("exponent out of range");
    if (denom_pow >= 0) {
        if (denom_pow > 18) {
            // split to keep the 128-bit product in range
            Rat r((int64_t)mant, pow10_i64(18));
            return r / Rat(pow10_i64(denom_pow - 18));
        }
        return Rat((int64_t)mant, pow10_i64(denom_pow));
    }
    Rat r((int64_t)mant);
    int up = -denom_pow;
    while (up > 18) {
        r *= Rat(pow10_i64(18));
        up -= 18;
    }
    return r * Rat(pow10_i64(up));
}

std::string Rat::to_decimal_string(int max_digits) const {
    // Strip the 2^a 5^b part of the denominator.
    int64_t d = den_;
    int twos = 0, fives = 0;
    while (d % 2 == 0) { d /= 2; ++twos; }
    while (d % 5 == 0) { d /= 5; ++fives; }

    if (d != 1 || std::max(twos, fives) > max_digits) {
        // Non-terminating (or too long): round half-even at max_digits.
        __int128 scale = 1;
        for (int i = 0; i < max_digits; ++i) scale *= 10;
        __int128 num = (__int128)num_ * scale;
        __int128 q = num / den_;
        __int128 r = num % den_;
        if (r < 0) { r = -r; }
        __int128 twice = 2 * r;
        if (twice > den_ || (twice == den_ && (q % 2 != 0)))
            q += (num_ >= 0 ? 1 : -1);
        // Re-render q / scale exactly below.
        bool neg = q < 0;
        if (neg) q = -q;
        std::string digits;
        if (q == 0) digits = "0";
        while (q > 0) {
            digits.insert(digits.begin(), char('0' + (int)(q % 10)));
            q /= 10;
        }
        while ((int)digits.size() <= max_digits) digits.insert(digits.begin(), '0');
        std::string out = (neg ? "-" : "") + digits.substr(0, digits.size() - max_digits) +
                          "." + digits.substr(digits.size() - max_digits);
        // trim trailing zeros but keep at least one fractional digit
        size_t last = out.find_last_not_of('0');
        if (out[last] == '.') ++last;
        out.erase(last + 1);
        return out;
    }

    // Terminating: multiply up to an integer over 10^k.
    int k = std::max(twos, fives);
    __int128 scaled = num_;
    for (int i = 0; i < k; ++i) scaled *= 10;
    scaled /= den_;
    bool neg = scaled < 0;
    if (neg) scaled = -scaled;
    std::string digits;
    if (scaled == 0) digits = "0";
    while (scaled > 0) {
        digits.insert(digits.begin(), char('0' + (int)(scaled % 10)));
        scaled /= 10;
    }
    while ((int)digits.size() <= k) digits.insert(digits.begin(), '0');
    std::string out = neg ? "-" : "";
    if (k == 0) {
        out += digits;
    } else {
        out += digits.substr(0, digits.size() - k) + "." + digits.substr(digits.size() - k);
        size_t last = out.find_last_not_of('0');
        if (out[last] == '.') --last;
        out.erase(last + 1);
    }
    return out;
}

std::string Rat::to_fraction_string() const {
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Rat Rat::from_fraction_string(std::string_view s) {
    size_t slash = s.find('/');
    if (slash == std::string_view::npos)
        return Rat(std::stoll(std::string(s)));
    int64_t n = std::stoll(std::string(s.substr(0, slash)));
    int64_t d = std::stoll(std::string(s.substr(slash + 1)));
    return Rat(n, d);
}

} // namespace reeb
