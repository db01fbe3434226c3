#pragma once

#include <gmpxx.h>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "quantizer.hpp"
#include "util.hpp"

namespace fastzip {

enum class SecCalcError { ThresholdTooLow, NoFiniteSize, AttackImpossible };

inline const char* seccalc_error_name(SecCalcError e) {
    switch (e) {
        case SecCalcError::ThresholdTooLow: return "ThresholdTooLow";
        case SecCalcError::NoFiniteSize: return "NoFiniteSize";
        case SecCalcError::AttackImpossible: return "AttackImpossible";
    }
    return "?";
}

enum class TailConvention { Inclusive, Exclusive };

// Parts an attacker must hit for the error-corrected secret to reconstruct:
// d = ceil((2 thr - 1) n). Also the polynomial degree bound d used throughout.
inline long long decode_parts(long long n, const Ratio& thr) {
    return (thr * Ratio(2, 1) - Ratio(1, 1)).ceil_mul(n);
}

// Exact tail of Binomial(n, 1/2): numerator over 2^n.
struct BinomialTail {
    mpz_class numer;
    long long n = 0;

    double log2_p() const {
        if (numer == 0) return -HUGE_VAL;
        long exp2;
        double mant = mpz_get_d_2exp(&exp2, numer.get_mpz_t());
        return std::log2(mant) + double(exp2) - double(n);
    }
    // exact comparison against 2^target (target typically negative)
    bool below_pow2(long long target) const {
        long long shift = n + target;
        if (shift < 0) return numer == 0;
        mpz_class bound = 1;
        mpz_mul_2exp(bound.get_mpz_t(), bound.get_mpz_t(), (mp_bitcnt_t)shift);
        return numer < bound;
    }
};

namespace detail {
// sum_{k=m}^{n} C(n,k), exact, via the ratio recurrence from C(n,m)
inline mpz_class binomial_tail_sum(long long n, long long m) {
    if (m > n) return 0;
    if (m < 0) m = 0;
    mpz_class term;
    mpz_bin_uiui(term.get_mpz_t(), (unsigned long)n, (unsigned long)m);
    mpz_class sum = term;
    for (long long k = m; k < n; k++) {
        term *= (unsigned long)(n - k);
        mpz_divexact_ui(term.get_mpz_t(), term.get_mpz_t(), (unsigned long)(k + 1));
        sum += term;
    }
    return sum;
}
}  // namespace detail

// Chance that a uniformly random n-bit string agrees with a fixed fingerprint
// on enough positions to defeat the error-corrected exchange.
inline Expected<BinomialTail, SecCalcError> offline_guess_probability(
    long long n, const Ratio& thr, TailConvention conv = TailConvention::Exclusive) {
    if (!(Ratio(1, 2) < thr)) return SecCalcError::ThresholdTooLow;
    long long m = decode_parts(n, thr);
    if (conv == TailConvention::Exclusive) m += 1;
    BinomialTail t;
    t.n = n;
    t.numer = detail::binomial_tail_sum(n, m);
    return t;
}

// Smallest fingerprint size (at the given bit granularity) whose guess
// probability drops below 2^target_log2_p. Diverges as thr approaches 3/4
// from above, hence the threshold floor.
inline Expected<long long, SecCalcError> min_fingerprint_bits(
    const Ratio& thr, long long target_log2_p = -20, long long granularity = 1,
    TailConvention conv = TailConvention::Exclusive) {
    if (!(Ratio(3, 4) < thr)) return SecCalcError::NoFiniteSize;
    for (long long n = granularity;; n += granularity) {
        auto p = offline_guess_probability(n, thr, conv);
        if (!p.ok()) continue;
        // At small n the strict-excess event can be outright impossible
        // (decode needs all n parts, thr < 1), making the exclusive tail a
        // vacuous zero. Such sizes offer no real protection, so the decision
        // falls back to the inclusive tail there.
        if (p.value().numer == 0 && thr < Ratio(1, 1))
            p = offline_guess_probability(n, thr, TailConvention::Inclusive);
        if (p.value().below_pow2(target_log2_p)) return n;
    }
}

// log2 of the expected number of decode attempts for an attacker who knows
// i_correct of the n encoding parts are genuine and must pick d that all are:
// log2( n falling d / i falling d ), falling factorials exact.
inline Expected<double, SecCalcError> brute_force_complexity(long long n, const Ratio& thr,
                                                             long long i_correct) {
    long long d = decode_parts(n, thr);
    if (i_correct < d) return SecCalcError::AttackImpossible;
    if (i_correct > n) return SecCalcError::AttackImpossible;
    mpz_class num = 1, den = 1;
    for (long long j = 0; j < d; j++) {
        num *= (unsigned long)(n - j);
        den *= (unsigned long)(i_correct - j);
    }
    long en, ed;
    double mn = mpz_get_d_2exp(&en, num.get_mpz_t());
    double md = mpz_get_d_2exp(&ed, den.get_mpz_t());
    return (std::log2(mn) + double(en)) - (std::log2(md) + double(ed));
}

struct BruteForceFloor {
    long long best_i;
    double log2_attempts;
};

// Minimum attack cost over the ambiguity interval i in [d, ceil(thr n)): the
// attacker cannot tell how many parts beyond the decode minimum are genuine,
// so the floor takes the cheapest case. An empty interval degenerates to i=d.
inline Expected<BruteForceFloor, SecCalcError> brute_force_floor(long long n, const Ratio& thr) {
    long long d = decode_parts(n, thr);
    if (d < 1) return SecCalcError::ThresholdTooLow;
    long long hi = thr.ceil_mul(n);
    BruteForceFloor best{-1, HUGE_VAL};
    for (long long i = d; i < (hi > d ? hi : d + 1); i++) {
        auto c = brute_force_complexity(n, thr, i);
        if (c.ok() && c.value() < best.log2_attempts) best = {i, c.value()};
    }
    if (best.best_i < 0) return SecCalcError::AttackImpossible;
    return best;
}

// Closed-form cost at i = n - d; only defined when that many parts can
// actually be correct alongside d decode parts (n - d >= d).
inline std::optional<double> brute_force_literal(long long n, const Ratio& thr) {
    long long d = decode_parts(n, thr);
    if (n - d < d) return std::nullopt;
    auto c = brute_force_complexity(n, thr, n - d);
    if (!c.ok()) return std::nullopt;
    return c.value();
}

// Fingerprint size a fuzzy-commitment construction needs so the committed
// secret keeps `target` bits after entropy loss: ceil(target + 2 (1-thr) target).
inline long long fuzzy_commitment_bits(const Ratio& thr, long long target = 128) {
    return (Ratio(3, 1) - thr * Ratio(2, 1)).ceil_mul(target);
}

// Whole windows needed to accumulate required_bits, times the window length.
inline long long pairing_time_seconds(long long required_bits, long long bits_per_window,
                                      long long window_seconds) {
    return ceil_div_ll(required_bits, bits_per_window) * window_seconds;
}

// round(1000 x) with halves toward zero; the display precision used for
// similarity floors everywhere below.
inline long long per_mille_half_down(const Ratio& r) {
    long long num = 1000 * r.num, den = r.den;
    long long q = num / den, rem = num % den;
    if (2 * rem > den) q += 1;
    return q;
}

inline Ratio fused_floor(const std::vector<Modality>& mods) {
    long long weighted_num = 0, common_den = 1, total = 0;
    for (Modality m : mods) {
        Ratio t = modality_threshold(m);
        long long bits = modality_bits(m);
        weighted_num = weighted_num * t.den + bits * t.num * common_den;
        common_den *= t.den;
        total += bits;
    }
    return Ratio(weighted_num, common_den * total);
}

// Secret sizes for the error-tolerant exchange: a linear fit through the
// shipped per-modality operating points, snapped up to the next ten bits.
// Flatter floors (harder to match by luck) need fewer secret bits.
inline long long required_exchange_bits(long long thr_milli) {
    return 10 * ceil_div_ll(4200 - 4 * thr_milli, 100);
}

struct SecurityProfile {
    int thr_percent;
    Ratio thr;
    long long n;
    long long d;
    double log2_inclusive;
    double log2_exclusive;
    long long floor_i;
    double floor_log2;
    std::optional<double> literal_log2;
};

inline std::vector<SecurityProfile> table1() {
    static const int percents[6] = {95, 90, 85, 80, 75, 70};
    static const long long sizes[6] = {40, 60, 80, 100, 120, 140};
    std::vector<SecurityProfile> rows;
    for (int r = 0; r < 6; r++) {
        SecurityProfile row;
        row.thr_percent = percents[r];
        row.thr = Ratio(percents[r], 100);
        row.n = sizes[r];
        row.d = decode_parts(row.n, row.thr);
        row.log2_inclusive =
            offline_guess_probability(row.n, row.thr, TailConvention::Inclusive).value().log2_p();
        row.log2_exclusive =
            offline_guess_probability(row.n, row.thr, TailConvention::Exclusive).value().log2_p();
        auto fl = brute_force_floor(row.n, row.thr);
        row.floor_i = fl.value().best_i;
        row.floor_log2 = fl.value().log2_attempts;
        row.literal_log2 = brute_force_literal(row.n, row.thr);
        rows.push_back(row);
    }
    return rows;
}

struct PairingProfile {
    std::string name;
    std::vector<Modality> mods;
    Ratio thr;
    long long thr_milli;
    long long exchange_bits;
    long long commitment_bits;
    long long bits_per_window;
    long long window_seconds;
    long long exchange_seconds;
    long long commitment_seconds;
};

inline PairingProfile pairing_profile(const std::vector<Modality>& mods) {
    PairingProfile p;
    p.mods = mods;
    for (size_t i = 0; i < mods.size(); i++) {
        if (i) p.name.push_back('+');
        p.name.push_back(modality_letter(mods[i]));
    }
    p.thr = fused_floor(mods);
    p.thr_milli = per_mille_half_down(p.thr);
    p.exchange_bits = required_exchange_bits(p.thr_milli);
    p.commitment_bits = fuzzy_commitment_bits(Ratio(p.thr_milli, 1000));
    p.bits_per_window = 0;
    p.window_seconds = 0;
    for (Modality m : mods) {
        p.bits_per_window += modality_bits(m);
        long long w = modality_window_seconds(m);
        if (w > p.window_seconds) p.window_seconds = w;
    }
    p.exchange_seconds = pairing_time_seconds(p.exchange_bits, p.bits_per_window, p.window_seconds);
    p.commitment_seconds =
        pairing_time_seconds(p.commitment_bits, p.bits_per_window, p.window_seconds);
    return p;
}

// Every non-empty sensor combination: singles, pairs, triples, all four, each
// group in lexicographic order of the canonical modality sequence.
inline std::vector<PairingProfile> table2() {
    std::vector<PairingProfile> rows;
    std::vector<Modality> mods;
    auto emit = [&](auto&& self, int count, int from) -> void {
        if (int(mods.size()) == count) {
            rows.push_back(pairing_profile(mods));
            return;
        }
        for (int b = from; b < 4; b++) {
            mods.push_back(Modality(b));
            self(self, count, b + 1);
            mods.pop_back();
        }
    };
    for (int count = 1; count <= 4; count++) emit(emit, count, 0);
    return rows;
}

}  // namespace fastzip
