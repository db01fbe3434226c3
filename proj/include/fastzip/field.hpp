#pragma once

#include <array>
#include <cstdint>

#include "util.hpp"

namespace fastzip {

// Prime field F_p with p = 2^130 - 5.
// Large enough to embed a 128-bit secret per element, small enough that
// schoolbook 3-limb multiplication plus a shift-and-add-times-5 fold is fast.
// Elements are 3 little-endian 64-bit limbs, always fully reduced.
struct Fp130 {
    struct Elem {
        uint64_t w[3] = {0, 0, 0};
        friend bool operator==(const Elem& a, const Elem& b) {
            return a.w[0] == b.w[0] && a.w[1] == b.w[1] && a.w[2] == b.w[2];
        }
        friend bool operator!=(const Elem& a, const Elem& b) { return !(a == b); }
    };

    static constexpr uint64_t P0 = 0xFFFFFFFFFFFFFFFBULL;
    static constexpr uint64_t P1 = 0xFFFFFFFFFFFFFFFFULL;
    static constexpr uint64_t P2 = 0x3ULL;
    static constexpr size_t ENCODED_SIZE = 17;  // big-endian bytes

    Elem zero() const { return Elem{}; }
    Elem one() const { return from_u64(1); }

    Elem from_u64(uint64_t v) const {
        Elem e;
        e.w[0] = v;
        return e;
    }

    static bool geq_p(const Elem& a) {
        if (a.w[2] != P2) return a.w[2] > P2;
        if (a.w[1] != P1) return a.w[1] > P1;
        return a.w[0] >= P0;
    }

    Elem add(const Elem& a, const Elem& b) const {
        Elem r;
        unsigned __int128 t = (unsigned __int128)a.w[0] + b.w[0];
        r.w[0] = (uint64_t)t;
        t = (unsigned __int128)a.w[1] + b.w[1] + (uint64_t)(t >> 64);
        r.w[1] = (uint64_t)t;
        r.w[2] = a.w[2] + b.w[2] + (uint64_t)(t >> 64);
        if (geq_p(r)) subp_inplace(r);
        return r;
    }

    Elem sub(const Elem& a, const Elem& b) const {
        Elem r;
        uint64_t borrow = 0;
        sub3(a, b, r, borrow);
        if (borrow) {
            // add p back
            unsigned __int128 t = (unsigned __int128)r.w[0] + P0;
            r.w[0] = (uint64_t)t;
            t = (unsigned __int128)r.w[1] + P1 + (uint64_t)(t >> 64);
            r.w[1] = (uint64_t)t;
            r.w[2] = r.w[2] + P2 + (uint64_t)(t >> 64);
        }
        return r;
    }

    Elem neg(const Elem& a) const { return sub(zero(), a); }

    Elem mul(const Elem& a, const Elem& b) const {
        uint64_t r[5] = {0, 0, 0, 0, 0};
        for (int i = 0; i < 3; i++) {
            uint64_t carry = 0;
            for (int j = 0; j < 3; j++) {
                unsigned __int128 cur =
                    (unsigned __int128)a.w[i] * b.w[j] + r[i + j] + carry;
                r[i + j] = (uint64_t)cur;
                carry = (uint64_t)(cur >> 64);
            }
            if (i + 3 < 5) r[i + 3] += carry;
        }
        // fold t = hi*2^130 + lo  ->  lo + 5*hi
        Elem lo;
        lo.w[0] = r[0];
        lo.w[1] = r[1];
        lo.w[2] = r[2] & 0x3;
        uint64_t h0 = (r[2] >> 2) | (r[3] << 62);
        uint64_t h1 = (r[3] >> 2) | (r[4] << 62);
        uint64_t h2 = r[4] >> 2;  // < 2^2 because product < 2^260
        Elem m = mul5(h0, h1, h2);
        Elem s = add_raw(lo, m);
        // second fold: s < 2^134
        uint64_t h = s.w[2] >> 2;
        s.w[2] &= 0x3;
        unsigned __int128 t = (unsigned __int128)s.w[0] + 5 * (unsigned __int128)h;
        s.w[0] = (uint64_t)t;
        t = (unsigned __int128)s.w[1] + (uint64_t)(t >> 64);
        s.w[1] = (uint64_t)t;
        s.w[2] += (uint64_t)(t >> 64);
        if (geq_p(s)) subp_inplace(s);
        return s;
    }

    Elem pow(Elem base, uint64_t e0, uint64_t e1, uint64_t e2) const {
        Elem acc = one();
        uint64_t e[3] = {e0, e1, e2};
        bool started = false;
        for (int limb = 2; limb >= 0; limb--) {
            for (int bit = 63; bit >= 0; bit--) {
                if (started) acc = mul(acc, acc);
                if ((e[limb] >> bit) & 1) {
                    if (started)
                        acc = mul(acc, base);
                    else {
                        acc = base;
                        started = true;
                    }
                }
            }
        }
        return started ? acc : one();
    }

    Elem inv(const Elem& a) const {
        // Fermat: a^(p-2), p-2 = 2^130 - 7
        return pow(a, 0xFFFFFFFFFFFFFFF9ULL, 0xFFFFFFFFFFFFFFFFULL, 0x3ULL);
    }

    bool is_zero(const Elem& a) const {
        return a.w[0] == 0 && a.w[1] == 0 && a.w[2] == 0;
    }

    std::array<uint8_t, 17> to_bytes(const Elem& a) const {
        std::array<uint8_t, 17> out{};
        out[0] = uint8_t(a.w[2]);
        for (int i = 0; i < 8; i++) out[1 + i] = uint8_t(a.w[1] >> (56 - 8 * i));
        for (int i = 0; i < 8; i++) out[9 + i] = uint8_t(a.w[0] >> (56 - 8 * i));
        return out;
    }

    // strict decode: rejects values >= p and a top byte with stray bits
    std::optional<Elem> from_bytes(const uint8_t* p, size_t n) const {
        if (n != 17) return std::nullopt;
        if (p[0] > 0x3) return std::nullopt;
        Elem e;
        e.w[2] = p[0];
        for (int i = 0; i < 8; i++) e.w[1] = e.w[1] << 8 | p[1 + i];
        for (int i = 0; i < 8; i++) e.w[0] = e.w[0] << 8 | p[9 + i];
        if (geq_p(e)) return std::nullopt;
        return e;
    }

    // arbitrary big-endian string reduced mod p (for KDF outputs)
    Elem from_bytes_mod(const uint8_t* p, size_t n) const {
        Elem acc = zero();
        Elem c256 = from_u64(256);
        for (size_t i = 0; i < n; i++) {
            acc = mul(acc, c256);
            acc = add(acc, from_u64(p[i]));
        }
        return acc;
    }

    // uniform element via rejection sampling on 130-bit candidates
    template <class R>
    Elem random(R& rng) const {
        for (;;) {
            Elem e;
            e.w[0] = rng.u64();
            e.w[1] = rng.u64();
            e.w[2] = rng.u64() & 0x3;
            if (!geq_p(e)) return e;
        }
    }

private:
    static void subp_inplace(Elem& a) {
        uint64_t borrow = 0;
        unsigned __int128 t = (unsigned __int128)a.w[0] - P0;
        a.w[0] = (uint64_t)t;
        borrow = (t >> 64) ? 1 : 0;
        t = (unsigned __int128)a.w[1] - P1 - borrow;
        a.w[1] = (uint64_t)t;
        borrow = (t >> 64) ? 1 : 0;
        a.w[2] = a.w[2] - P2 - borrow;
    }

    static void sub3(const Elem& a, const Elem& b, Elem& r, uint64_t& borrow_out) {
        unsigned __int128 t = (unsigned __int128)a.w[0] - b.w[0];
        r.w[0] = (uint64_t)t;
        uint64_t borrow = (t >> 64) ? 1 : 0;
        t = (unsigned __int128)a.w[1] - b.w[1] - borrow;
        r.w[1] = (uint64_t)t;
        borrow = (t >> 64) ? 1 : 0;
        t = (unsigned __int128)a.w[2] - b.w[2] - borrow;
        r.w[2] = (uint64_t)t;
        borrow_out = (t >> 64) ? 1 : 0;
    }

    // 5*h for h < 2^130 given as 3 limbs; result < 2^133 fits 3 limbs
    static Elem mul5(uint64_t h0, uint64_t h1, uint64_t h2) {
        Elem r;
        unsigned __int128 t = 5 * (unsigned __int128)h0;
        r.w[0] = (uint64_t)t;
        t = 5 * (unsigned __int128)h1 + (uint64_t)(t >> 64);
        r.w[1] = (uint64_t)t;
        r.w[2] = 5 * h2 + (uint64_t)(t >> 64);
        return r;
    }

    // plain 3-limb add, no reduction (caller knows result fits)
    static Elem add_raw(const Elem& a, const Elem& b) {
        Elem r;
        unsigned __int128 t = (unsigned __int128)a.w[0] + b.w[0];
        r.w[0] = (uint64_t)t;
        t = (unsigned __int128)a.w[1] + b.w[1] + (uint64_t)(t >> 64);
        r.w[1] = (uint64_t)t;
        r.w[2] = a.w[2] + b.w[2] + (uint64_t)(t >> 64);
        return r;
    }
};

// Runtime-modulus prime field over uint64 (modulus < 2^63). Used by tests to
// cross-check the Reed-Solomon decoder against a brute-force oracle at toy sizes.
struct PrimeField64 {
    using Elem = uint64_t;
    uint64_t p;

    explicit PrimeField64(uint64_t prime) : p(prime) {}

    Elem zero() const { return 0; }
    Elem one() const { return 1 % p; }
    Elem from_u64(uint64_t v) const { return v % p; }
    Elem add(Elem a, Elem b) const {
        uint64_t s = a + b;
        return s >= p || s < a ? s - p : s;
    }
    Elem sub(Elem a, Elem b) const { return a >= b ? a - b : a + p - b; }
    Elem neg(Elem a) const { return a ? p - a : 0; }
    Elem mul(Elem a, Elem b) const {
        return (uint64_t)((unsigned __int128)a * b % p);
    }
    Elem pow(Elem b, uint64_t e) const {
        Elem acc = one();
        while (e) {
            if (e & 1) acc = mul(acc, b);
            b = mul(b, b);
            e >>= 1;
        }
        return acc;
    }
    Elem inv(Elem a) const { return pow(a, p - 2); }
    bool is_zero(Elem a) const { return a == 0; }
    template <class R>
    Elem random(R& rng) const {
        return rng.below(p);
    }
};

}  // namespace fastzip
