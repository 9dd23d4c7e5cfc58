#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "cjlab/errors.hpp"

namespace cjlab {

inline constexpr int kDefaultPrecision = 64;

/// Digits of agreement given up when two independently rounded p-adic values are compared.
inline constexpr int kPrecisionSlack = 8;

inline bool is_prime(std::int64_t n) {
    if (n < 2) return false;
    for (std::int64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

namespace detail {

// Decimal string of p^e for e >= 0, base-1e9 limbs.
inline std::string power_decimal(std::uint64_t p, int e) {
    std::vector<std::uint64_t> limbs{1};
    constexpr std::uint64_t base = 1000000000ULL;
    for (int i = 0; i < e; ++i) {
        std::uint64_t carry = 0;
        for (auto& l : limbs) {
            std::uint64_t v = l * p + carry;
            l = v % base;
            carry = v / base;
        }
        while (carry) {
            limbs.push_back(carry % base);
            carry /= base;
        }
    }
    std::string out = std::to_string(limbs.back());
    for (auto it = limbs.rbegin() + 1; it != limbs.rend(); ++it) {
        std::string chunk = std::to_string(*it);
        out += std::string(9 - chunk.size(), '0') + chunk;
    }
    return out;
}

inline std::int64_t mod_inverse(std::int64_t a, std::int64_t p) {
    std::int64_t old_r = a % p, r = p, old_s = 1, s = 0;
    if (old_r < 0) old_r += p;
    while (r != 0) {
        std::int64_t q = old_r / r;
        std::int64_t t = old_r - q * r;
        old_r = r;
        r = t;
        t = old_s - q * s;
        old_s = s;
        s = t;
    }
    if (old_r != 1) throw DomainError("digit is not invertible modulo p");
    old_s %= p;
    return old_s < 0 ? old_s + p : old_s;
}

// floor-divide carries so every limb lands in [0, p).
inline void normalize_carries(std::vector<std::int64_t>& a, std::int64_t p, std::size_t from = 0) {
    std::int64_t carry = 0;
    for (std::size_t i = from; i < a.size(); ++i) {
        std::int64_t v = a[i] + carry;
        std::int64_t q = v / p;
        std::int64_t r = v % p;
        if (r < 0) {
            r += p;
            --q;
        }
        a[i] = r;
        carry = q;
    }
}

}  // namespace detail

/// The exact value p^exponent, or zero. This is what a p-adic norm returns:
/// a rational whose numerator and denominator are powers of p.
class PNorm {
public:
    PNorm() = default;

    static PNorm zero(int prime) { return PNorm(prime, 0, true); }
    static PNorm power(int prime, int exponent) { return PNorm(prime, exponent, false); }

    bool is_zero() const { return zero_; }
    int prime() const { return prime_; }
    int exponent() const { return exponent_; }

    long double to_long_double() const {
        if (zero_) return 0.0L;
        return std::pow(static_cast<long double>(prime_), static_cast<long double>(exponent_));
    }

    /// "0", "1", "8", "1/4".
    std::string to_string() const {
        if (zero_) return "0";
        if (exponent_ >= 0) return detail::power_decimal(static_cast<std::uint64_t>(prime_), exponent_);
        return "1/" + detail::power_decimal(static_cast<std::uint64_t>(prime_), -exponent_);
    }

    friend PNorm operator*(const PNorm& a, const PNorm& b) {
        if (a.zero_ || b.zero_) return zero(a.prime_);
        return power(a.prime_, a.exponent_ + b.exponent_);
    }

    friend bool operator==(const PNorm& a, const PNorm& b) {
        if (a.zero_ || b.zero_) return a.zero_ == b.zero_;
        return a.exponent_ == b.exponent_ && a.prime_ == b.prime_;
    }

    friend std::strong_ordering operator<=>(const PNorm& a, const PNorm& b) {
        if (a.zero_ && b.zero_) return std::strong_ordering::equal;
        if (a.zero_) return std::strong_ordering::less;
        if (b.zero_) return std::strong_ordering::greater;
        return a.exponent_ <=> b.exponent_;
    }

private:
    PNorm(int prime, int exponent, bool zero) : prime_(prime), exponent_(exponent), zero_(zero) {}

    int prime_ = 2;
    int exponent_ = 0;
    bool zero_ = true;
};

/// A truncated element of Q_p: p^valuation * (d0 + d1 p + d2 p^2 + ...), with
/// d0 != 0 and `precision()` significant digits known. Zero is exact and
/// canonical (no digits). Immutable; all arithmetic is value-returning.
class PAdicNumber {
public:
    using Digit = std::uint32_t;

    PAdicNumber() = default;

    static PAdicNumber zero(int prime) {
        check_prime(prime);
        PAdicNumber z;
        z.prime_ = prime;
        return z;
    }

    static PAdicNumber from_integer(std::int64_t n, int prime, int precision = kDefaultPrecision) {
        return from_rational(n, 1, prime, precision);
    }

    static PAdicNumber from_rational(std::int64_t num, std::int64_t den, int prime,
                                     int precision = kDefaultPrecision) {
        check_prime(prime);
        check_precision(precision);
        if (den == 0) throw DomainError("from_rational: zero denominator");
        if (num == 0) return zero(prime);
        int v = 0;
        while (num % prime == 0) {
            num /= prime;
            ++v;
        }
        while (den % prime == 0) {
            den /= prime;
            --v;
        }
        auto a = unit_digits(num, prime, precision);
        auto b = unit_digits(den, prime, precision);
        return make(prime, v, divide_units(a, b, prime));
    }

    /// p^exponent to `precision` digits.
    static PAdicNumber power_of_prime(int prime, int exponent, int precision = kDefaultPrecision) {
        check_prime(prime);
        check_precision(precision);
        std::vector<std::int64_t> d(static_cast<std::size_t>(precision), 0);
        d[0] = 1;
        return make(prime, exponent, std::move(d));
    }

    /// Builds from explicit digits; leading zero digits shift into the valuation.
    static PAdicNumber from_digits(int prime, int valuation, const std::vector<Digit>& digits) {
        check_prime(prime);
        std::vector<std::int64_t> d;
        d.reserve(digits.size());
        for (Digit x : digits) {
            if (x >= static_cast<Digit>(prime))
                throw ConfigError("digit " + std::to_string(x) + " out of range for p=" + std::to_string(prime));
            d.push_back(static_cast<std::int64_t>(x));
        }
        return make(prime, valuation, std::move(d));
    }

    int prime() const { return prime_; }
    int valuation() const { return valuation_; }
    /// Significant digits carried; 0 for the exact zero.
    int precision() const { return static_cast<int>(digits_.size()); }
    /// valuation + precision: the power of p below which digits are known.
    int absolute_precision() const {
        return is_zero() ? std::numeric_limits<int>::max() : valuation_ + precision();
    }
    const std::vector<Digit>& digits() const { return digits_; }
    bool is_zero() const { return digits_.empty(); }

    PNorm norm() const { return is_zero() ? PNorm::zero(prime_) : PNorm::power(prime_, -valuation_); }

    /// `Qp(p; v; d0,d1,...)`.
    std::string to_literal() const {
        std::string out = "Qp(" + std::to_string(prime_) + "; " + std::to_string(valuation_) + "; ";
        for (std::size_t i = 0; i < digits_.size(); ++i) {
            if (i) out += ',';
            out += std::to_string(digits_[i]);
        }
        return out + ")";
    }

    /// `p^v * [d0,d1,...]`, or `0`.
    std::string to_string() const {
        if (is_zero()) return "0";
        std::string out = std::to_string(prime_) + "^" + std::to_string(valuation_) + " * [";
        for (std::size_t i = 0; i < digits_.size(); ++i) {
            if (i) out += ',';
            out += std::to_string(digits_[i]);
        }
        return out + "]";
    }

    /// Accepts `Qp(p; v; d0,...)` or `rat(a/b)`; the latter uses the given prime and precision.
    static PAdicNumber parse(std::string_view text, int prime = 2, int precision = kDefaultPrecision) {
        std::string s;
        for (char c : text)
            if (!std::isspace(static_cast<unsigned char>(c))) s += c;
        auto fail = [&]() -> PAdicNumber { throw ConfigError("malformed p-adic literal: " + std::string(text)); };
        if (s.rfind("Qp(", 0) == 0 && s.back() == ')') {
            std::string body = s.substr(3, s.size() - 4);
            auto first = body.find(';');
            if (first == std::string::npos) return fail();
            auto second = body.find(';', first + 1);
            if (second == std::string::npos) return fail();
            try {
                int p = std::stoi(body.substr(0, first));
                int v = std::stoi(body.substr(first + 1, second - first - 1));
                std::vector<Digit> digits;
                std::string rest = body.substr(second + 1);
                std::size_t pos = 0;
                while (pos < rest.size()) {
                    auto comma = rest.find(',', pos);
                    if (comma == std::string::npos) comma = rest.size();
                    std::string tok = rest.substr(pos, comma - pos);
                    if (tok.empty()) return fail();
                    long long d = std::stoll(tok);
                    if (d < 0) return fail();
                    digits.push_back(static_cast<Digit>(d));
                    pos = comma + 1;
                }
                if (!digits.empty() && digits.front() == 0)
                    throw ConfigError("p-adic literal must start with a nonzero digit: " + std::string(text));
                if (digits.empty()) return zero(p);
                return from_digits(p, v, digits);
            } catch (const ConfigError&) {
                throw;
            } catch (const std::logic_error&) {
                return fail();
            }
        }
        if (s.rfind("rat(", 0) == 0 && s.back() == ')') {
            std::string body = s.substr(4, s.size() - 5);
            auto slash = body.find('/');
            try {
                std::int64_t a = std::stoll(body.substr(0, slash));
                std::int64_t b = slash == std::string::npos ? 1 : std::stoll(body.substr(slash + 1));
                return from_rational(a, b, prime, precision);
            } catch (const std::invalid_argument&) {
                return fail();
            } catch (const std::out_of_range&) {
                return fail();
            }
        }
        return fail();
    }

    friend bool operator==(const PAdicNumber& a, const PAdicNumber& b) {
        return a.prime_ == b.prime_ && a.valuation_ == b.valuation_ && a.digits_ == b.digits_;
    }

    friend PAdicNumber operator-(const PAdicNumber& a) {
        if (a.is_zero()) return a;
        return make(a.prime_, a.valuation_, negate_units(a.wide(), a.prime_));
    }

    /// Result known to min(absolute precisions); cancellation shows up as fewer digits.
    friend PAdicNumber operator+(const PAdicNumber& a, const PAdicNumber& b) {
        check_same_prime(a, b);
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        const int v = std::min(a.valuation_, b.valuation_);
        const int abs_prec = std::min(a.absolute_precision(), b.absolute_precision());
        const int len = abs_prec - v;
        std::vector<std::int64_t> sum(static_cast<std::size_t>(len), 0);
        auto place = [&](const PAdicNumber& x) {
            const int shift = x.valuation_ - v;
            for (std::size_t i = 0; i < x.digits_.size(); ++i) {
                const int pos = shift + static_cast<int>(i);
                if (pos >= len) break;
                sum[static_cast<std::size_t>(pos)] += x.digits_[i];
            }
        };
        place(a);
        place(b);
        detail::normalize_carries(sum, a.prime_);
        return make(a.prime_, v, std::move(sum));
    }

    friend PAdicNumber operator-(const PAdicNumber& a, const PAdicNumber& b) { return a + (-b); }

    friend PAdicNumber operator*(const PAdicNumber& a, const PAdicNumber& b) {
        check_same_prime(a, b);
        if (a.is_zero() || b.is_zero()) return zero(a.prime_);
        const std::size_t n = static_cast<std::size_t>(std::min(a.precision(), b.precision()));
        std::vector<std::int64_t> prod(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::int64_t ai = a.digits_[i];
            if (ai == 0) continue;
            for (std::size_t j = 0; i + j < n; ++j) prod[i + j] += ai * static_cast<std::int64_t>(b.digits_[j]);
            // keep limbs bounded for large primes
            if ((i & 15U) == 15U) detail::normalize_carries(prod, a.prime_);
        }
        detail::normalize_carries(prod, a.prime_);
        return make(a.prime_, a.valuation_ + b.valuation_, std::move(prod));
    }

    friend PAdicNumber operator/(const PAdicNumber& a, const PAdicNumber& b) {
        check_same_prime(a, b);
        if (b.is_zero()) throw DomainError("p-adic division by zero");
        if (a.is_zero()) return zero(a.prime_);
        const std::size_t n = static_cast<std::size_t>(std::min(a.precision(), b.precision()));
        auto num = a.wide();
        auto den = b.wide();
        num.resize(n);
        den.resize(n);
        return make(a.prime_, a.valuation_ - b.valuation_, divide_units(num, den, a.prime_));
    }

private:
    static void check_prime(int p) {
        if (!is_prime(p) || p > 65521) throw ConfigError("modulus is not a supported prime: " + std::to_string(p));
    }
    static void check_precision(int n) {
        if (n < 1) throw ConfigError("precision must be >= 1");
    }
    static void check_same_prime(const PAdicNumber& a, const PAdicNumber& b) {
        if (a.prime_ != b.prime_)
            throw DomainError("mismatched primes " + std::to_string(a.prime_) + " and " + std::to_string(b.prime_));
    }

    std::vector<std::int64_t> wide() const { return {digits_.begin(), digits_.end()}; }

    // Strips low-order zero digits into the valuation; all-zero becomes canonical zero.
    static PAdicNumber make(int prime, int valuation, std::vector<std::int64_t> d) {
        PAdicNumber out;
        out.prime_ = prime;
        std::size_t lead = 0;
        while (lead < d.size() && d[lead] == 0) ++lead;
        if (lead == d.size()) return out;
        out.valuation_ = valuation + static_cast<int>(lead);
        out.digits_.reserve(d.size() - lead);
        for (std::size_t i = lead; i < d.size(); ++i) out.digits_.push_back(static_cast<Digit>(d[i]));
        return out;
    }

    // |n| with factors of p removed, as `precision` base-p digits; negative n is complemented.
    static std::vector<std::int64_t> unit_digits(std::int64_t n, int p, int precision) {
        const bool negative = n < 0;
        // magnitude in unsigned to survive INT64_MIN
        std::uint64_t m = negative ? static_cast<std::uint64_t>(-(n + 1)) + 1 : static_cast<std::uint64_t>(n);
        std::vector<std::int64_t> d(static_cast<std::size_t>(precision), 0);
        for (auto& x : d) {
            if (m == 0) break;
            x = static_cast<std::int64_t>(m % static_cast<std::uint64_t>(p));
            m /= static_cast<std::uint64_t>(p);
        }
        return negative ? negate_units(d, p) : d;
    }

    static std::vector<std::int64_t> negate_units(std::vector<std::int64_t> d, std::int64_t p) {
        std::size_t i = 0;
        while (i < d.size() && d[i] == 0) ++i;
        if (i == d.size()) return d;
        d[i] = p - d[i];
        for (++i; i < d.size(); ++i) d[i] = p - 1 - d[i];
        return d;
    }

    // num / den modulo p^n, den a unit (den[0] != 0). Digit-by-digit Hensel division.
    static std::vector<std::int64_t> divide_units(std::vector<std::int64_t> num, const std::vector<std::int64_t>& den,
                                                  std::int64_t p) {
        const std::size_t n = num.size();
        const std::int64_t inv0 = detail::mod_inverse(den[0], p);
        std::vector<std::int64_t> q(n, 0);
        for (std::size_t k = 0; k < n; ++k) {
            const std::int64_t qk = (num[k] % p) * inv0 % p;
            q[k] = qk;
            if (qk == 0) continue;
            for (std::size_t j = 0; k + j < n; ++j) num[k + j] -= qk * den[j];
            detail::normalize_carries(num, p, k);
        }
        return q;
    }

    int prime_ = 2;
    int valuation_ = 0;
    std::vector<Digit> digits_;
};

inline PAdicNumber add(const PAdicNumber& a, const PAdicNumber& b) { return a + b; }
inline PAdicNumber sub(const PAdicNumber& a, const PAdicNumber& b) { return a - b; }
inline PAdicNumber mul(const PAdicNumber& a, const PAdicNumber& b) { return a * b; }
inline PAdicNumber div(const PAdicNumber& a, const PAdicNumber& b) { return a / b; }
inline PNorm norm(const PAdicNumber& a) { return a.norm(); }

/// a * 2, precision preserved.
inline PAdicNumber twice(const PAdicNumber& a) {
    if (a.is_zero()) return a;
    if (a.prime() == 2) return PAdicNumber::from_digits(2, a.valuation() + 1, a.digits());
    return a * PAdicNumber::from_integer(2, a.prime(), a.precision());
}

/// a / 2; for p = 2 only the valuation moves, for odd p the norm is unchanged.
inline PAdicNumber halve(const PAdicNumber& a) {
    if (a.is_zero()) return a;
    if (a.prime() == 2) return PAdicNumber::from_digits(2, a.valuation() - 1, a.digits());
    return a / PAdicNumber::from_integer(2, a.prime(), a.precision());
}

/// |2|_p as a long double: 1/2 in Q_2, 1 otherwise.
inline long double two_norm(int prime) { return prime == 2 ? 0.5L : 1.0L; }

/// True when a - b vanishes to within `floor` (absolute power of p); exact zero always agrees.
inline bool agrees_to(const PAdicNumber& a, const PAdicNumber& b, int floor) {
    const PAdicNumber d = a - b;
    return d.is_zero() || d.valuation() >= floor;
}

/// The comparison floor for a and b: their common absolute precision minus the slack.
inline int precision_floor(const PAdicNumber& a, const PAdicNumber& b) {
    const int abs = std::min(a.absolute_precision(), b.absolute_precision());
    if (abs == std::numeric_limits<int>::max()) return abs;
    return abs - kPrecisionSlack;
}

}  // namespace cjlab
