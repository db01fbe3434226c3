#pragma once

#include <cstdint>
#include <cstring>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace fastzip {

using Bytes = std::vector<uint8_t>;

// ---------- result type ----------

template <class T, class E>
class Expected {
public:
    Expected(T v) : v_(std::move(v)) {}
    Expected(E e) : v_(std::move(e)) {}
    bool ok() const { return std::holds_alternative<T>(v_); }
    explicit operator bool() const { return ok(); }
    const T& value() const {
        if (!ok()) throw std::runtime_error("Expected: no value");
        return std::get<T>(v_);
    }
    T& value() {
        if (!ok()) throw std::runtime_error("Expected: no value");
        return std::get<T>(v_);
    }
    const E& error() const { return std::get<E>(v_); }

private:
    std::variant<T, E> v_;
};

// ---------- exact rationals ----------

// Similarity thresholds and window fractions must never go through doubles:
// with doubles, ceil((2*0.55-1)*20) evaluates to 3; the true value is 2.
struct Ratio {
    long long num = 0;
    long long den = 1;

    Ratio() = default;
    Ratio(long long n, long long d) : num(n), den(d) {
        if (den == 0) throw std::invalid_argument("Ratio: zero denominator");
        if (den < 0) { num = -num; den = -den; }
        long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }
    static Ratio of_int(long long v) { return Ratio(v, 1); }

    // "0.729" -> 729/1000 ; "0.9" -> 9/10 ; "1" -> 1/1
    static std::optional<Ratio> parse_decimal(const std::string& s) {
        if (s.empty()) return std::nullopt;
        size_t i = 0;
        bool neg = false;
        if (s[i] == '+' || s[i] == '-') { neg = s[i] == '-'; i++; }
        long long ip = 0, fp = 0, scale = 1;
        bool any = false;
        while (i < s.size() && s[i] >= '0' && s[i] <= '9') {
            ip = ip * 10 + (s[i] - '0');
            i++; any = true;
        }
        if (i < s.size() && s[i] == '.') {
            i++;
            while (i < s.size() && s[i] >= '0' && s[i] <= '9') {
                if (scale > 1000000000000000LL) return std::nullopt;
                fp = fp * 10 + (s[i] - '0');
                scale *= 10;
                i++; any = true;
            }
        }
        if (!any || i != s.size()) return std::nullopt;
        long long n = ip * scale + fp;
        return Ratio(neg ? -n : n, scale);
    }

    double to_double() const { return double(num) / double(den); }

    friend bool operator==(const Ratio& a, const Ratio& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator!=(const Ratio& a, const Ratio& b) { return !(a == b); }
    friend bool operator<(const Ratio& a, const Ratio& b) {
        return (__int128)a.num * b.den < (__int128)b.num * a.den;
    }
    friend bool operator<=(const Ratio& a, const Ratio& b) {
        return (__int128)a.num * b.den <= (__int128)b.num * a.den;
    }
    friend bool operator>(const Ratio& a, const Ratio& b) { return b < a; }
    friend bool operator>=(const Ratio& a, const Ratio& b) { return b <= a; }

    Ratio operator+(const Ratio& o) const {
        __int128 n = (__int128)num * o.den + (__int128)o.num * den;
        __int128 d = (__int128)den * o.den;
        return norm128(n, d);
    }
    Ratio operator-(const Ratio& o) const {
        __int128 n = (__int128)num * o.den - (__int128)o.num * den;
        __int128 d = (__int128)den * o.den;
        return norm128(n, d);
    }
    Ratio operator*(const Ratio& o) const {
        return norm128((__int128)num * o.num, (__int128)den * o.den);
    }

    // ceil(this * k), exact
    long long ceil_mul(long long k) const {
        __int128 n = (__int128)num * k;
        __int128 d = den;
        __int128 q = n / d, r = n % d;
        if (r != 0 && ((n > 0) == (d > 0))) q++;
        return (long long)q;
    }
    long long floor_mul(long long k) const {
        __int128 n = (__int128)num * k;
        __int128 d = den;
        __int128 q = n / d, r = n % d;
        if (r != 0 && ((n > 0) != (d > 0))) q--;
        return (long long)q;
    }

private:
    static Ratio norm128(__int128 n, __int128 d) {
        if (d < 0) { n = -n; d = -d; }
        __int128 a = n < 0 ? -n : n, b = d;
        while (b) { __int128 t = a % b; a = b; b = t; }
        if (a > 1) { n /= a; d /= a; }
        if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
            throw std::overflow_error("Ratio overflow");
        Ratio r;
        r.num = (long long)n;
        r.den = (long long)d;
        return r;
    }
};

inline long long ceil_div_ll(long long a, long long b) {
    long long q = a / b, r = a % b;
    return q + ((r != 0 && ((a > 0) == (b > 0))) ? 1 : 0);
}

// ---------- byte helpers ----------

inline void put_u16_be(Bytes& b, uint16_t v) {
    b.push_back(uint8_t(v >> 8));
    b.push_back(uint8_t(v));
}
inline void put_u32_be(Bytes& b, uint32_t v) {
    b.push_back(uint8_t(v >> 24));
    b.push_back(uint8_t(v >> 16));
    b.push_back(uint8_t(v >> 8));
    b.push_back(uint8_t(v));
}
inline uint16_t get_u16_be(const uint8_t* p) { return uint16_t(p[0]) << 8 | p[1]; }
inline uint32_t get_u32_be(const uint8_t* p) {
    return uint32_t(p[0]) << 24 | uint32_t(p[1]) << 16 | uint32_t(p[2]) << 8 | p[3];
}

inline std::string to_hex(const Bytes& b) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(b.size() * 2);
    for (uint8_t c : b) {
        s.push_back(digits[c >> 4]);
        s.push_back(digits[c & 15]);
    }
    return s;
}

inline std::optional<Bytes> from_hex(const std::string& s) {
    if (s.size() % 2) return std::nullopt;
    Bytes out;
    out.reserve(s.size() / 2);
    auto nib = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    for (size_t i = 0; i < s.size(); i += 2) {
        int hi = nib(s[i]), lo = nib(s[i + 1]);
        if (hi < 0 || lo < 0) return std::nullopt;
        out.push_back(uint8_t(hi << 4 | lo));
    }
    return out;
}

// Overwrite sensitive buffers in a way the optimizer must keep.
inline void secure_wipe(void* p, size_t n) {
    volatile uint8_t* q = static_cast<volatile uint8_t*>(p);
    while (n--) *q++ = 0;
}

// ---------- deterministic RNG ----------

// xoshiro256++ seeded through splitmix64. Fixed algorithm so that seeded runs
// reproduce bit-identically on any platform, unlike std:: distributions.
class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t x = seed;
        for (auto& si : s_) si = splitmix(x);
    }

    uint64_t u64() {
        uint64_t r = rotl(s_[0] + s_[3], 23) + s_[0];
        uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return r;
    }

    // unbiased integer in [0, bound)
    uint64_t below(uint64_t bound) {
        if (bound < 2) return 0;
        uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        uint64_t v;
        do { v = u64(); } while (v >= limit);
        return v % bound;
    }

    // uniform in [0, 1)
    double real() { return double(u64() >> 11) * 0x1.0p-53; }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1, u2;
        do { u1 = real(); } while (u1 <= 0.0);
        u2 = real();
        double m = std::sqrt(-2.0 * std::log(u1));
        spare_ = m * std::sin(2.0 * M_PI * u2);
        have_spare_ = true;
        return m * std::cos(2.0 * M_PI * u2);
    }

    // independent child stream identified by a label
    Rng fork(uint64_t label) const {
        uint64_t x = s_[0] ^ rotl(s_[1], 13) ^ label * 0x9E3779B97F4A7C15ULL;
        return Rng(splitmix(x) ^ splitmix(x));
    }

    Bytes bytes(size_t n) {
        Bytes out(n);
        for (size_t i = 0; i < n; i++) {
            if (i % 8 == 0) cur_ = u64();
            out[i] = uint8_t(cur_ >> (8 * (i % 8)));
        }
        return out;
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    static uint64_t splitmix(uint64_t& x) {
        uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    uint64_t s_[4];
    uint64_t cur_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace fastzip
