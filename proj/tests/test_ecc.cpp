#include <catch2/catch_amalgamated.hpp>

#include "fastzip/ecc.hpp"
#include "fastzip/field.hpp"

using namespace fastzip;

// Brute-force reference decoder: try every d-subset of share positions,
// interpolate, keep the polynomial agreeing with the most shares. Succeeds iff
// some polynomial of degree < d agrees with >= n - e shares (that polynomial is
// unique: two codewords both within e of the received word would have to agree
// with each other on >= n - 2e >= d positions).
template <class F>
static Expected<std::vector<typename F::Elem>, EccError> oracle_decode(
    const F& f, const std::vector<typename F::Elem>& received, int d) {
    using Elem = typename F::Elem;
    const int n = int(received.size());
    const int e = (n - d) / 2;
    std::vector<int> idx(d);
    for (int i = 0; i < d; i++) idx[i] = i;
    int best_agree = -1;
    std::vector<Elem> best;
    for (;;) {
        // Lagrange interpolation through the subset
        std::vector<Elem> poly(d, f.zero());
        for (int a = 0; a < d; a++) {
            Elem xa = f.from_u64(uint64_t(idx[a]) + 1);
            std::vector<Elem> basis = {f.one()};
            Elem denom = f.one();
            for (int b = 0; b < d; b++) {
                if (b == a) continue;
                Elem xb = f.from_u64(uint64_t(idx[b]) + 1);
                std::vector<Elem> next(basis.size() + 1, f.zero());
                for (size_t k = 0; k < basis.size(); k++) {
                    next[k + 1] = f.add(next[k + 1], basis[k]);
                    next[k] = f.sub(next[k], f.mul(basis[k], xb));
                }
                basis = next;
                denom = f.mul(denom, f.sub(xa, xb));
            }
            Elem c = f.mul(received[idx[a]], f.inv(denom));
            for (size_t k = 0; k < basis.size(); k++)
                poly[k] = f.add(poly[k], f.mul(basis[k], c));
        }
        auto vals = poly_eval_points(f, poly, n);
        int agree = 0;
        for (int i = 0; i < n; i++)
            if (vals[i] == received[i]) agree++;
        if (agree > best_agree) {
            best_agree = agree;
            best = poly;
        }
        // next combination
        int i = d - 1;
        while (i >= 0 && idx[i] == n - d + i) i--;
        if (i < 0) break;
        idx[i]++;
        for (int j = i + 1; j < d; j++) idx[j] = idx[j - 1] + 1;
    }
    if (best_agree >= n - e) return best;
    return EccError::DecodeFailure;
}

TEST_CASE("round trip with no errors over the session field") {
    Fp130 f;
    Rng rng(1);
    for (int n : {4, 16, 48, 100}) {
        for (int d : {1, 2, n / 2, n}) {
            if (d < 1) continue;
            Fp130::Elem secret = f.random(rng);
            auto shares = ecc_encode(f, secret, n, d, rng).value();
            auto dec = ecc_decode(f, shares, d);
            REQUIRE(dec.ok());
            CHECK(dec.value()[0] == secret);
        }
    }
}

TEST_CASE("encode rejects impossible code shapes") {
    Fp130 f;
    Rng rng(0x77);
    auto secret = f.from_u64(5);
    auto bad = ecc_encode(f, secret, 4, 5, rng);
    REQUIRE_FALSE(bad.ok());
    CHECK(bad.error() == EccError::InvalidCode);
    CHECK_FALSE(ecc_encode(f, secret, 4, 0, rng).ok());
    CHECK(ecc_encode(f, secret, 4, 4, rng).ok());
}

TEST_CASE("corrects up to e errors, fails beyond unambiguous radius") {
    Fp130 f;
    Rng rng(2);
    const int n = 48, d = 22, e = (n - d) / 2;
    for (int trial = 0; trial < 30; trial++) {
        Fp130::Elem secret = f.random(rng);
        auto shares = ecc_encode(f, secret, n, d, rng).value();
        int t = int(rng.below(e + 1));
        auto corrupted = shares;
        std::vector<int> pos(n);
        for (int i = 0; i < n; i++) pos[i] = i;
        for (int i = 0; i < t; i++) {
            int j = i + int(rng.below(n - i));
            std::swap(pos[i], pos[j]);
            corrupted[pos[i]] = f.add(corrupted[pos[i]], f.one());
        }
        auto dec = ecc_decode(f, corrupted, d);
        REQUIRE(dec.ok());
        CHECK(dec.value()[0] == secret);
    }
    // distance far beyond e: decode must not return the original
    for (int trial = 0; trial < 10; trial++) {
        Fp130::Elem secret = f.random(rng);
        auto shares = ecc_encode(f, secret, n, d, rng).value();
        for (int i = 0; i < n - d + 1; i++) shares[i] = f.random(rng);
        auto dec = ecc_decode(f, shares, d);
        if (dec.ok()) CHECK_FALSE(dec.value()[0] == secret);
    }
}

TEST_CASE("decoder agrees with subset-interpolation oracle at toy sizes") {
    PrimeField64 f(257);
    Rng rng(3);
    int checked = 0;
    for (int n = 2; n <= 10; n++) {
        for (int d = 1; d <= n; d++) {
            int e = (n - d) / 2;
            for (int trial = 0; trial < 60; trial++) {
                uint64_t secret = f.random(rng);
                auto shares = ecc_encode(f, secret, n, d, rng).value();
                // error count drawn to straddle the correction radius
                int t = int(rng.below(uint64_t(std::min(n, e + 2)) + 1));
                std::vector<int> pos(n);
                for (int i = 0; i < n; i++) pos[i] = i;
                for (int i = 0; i < t; i++) {
                    int j = i + int(rng.below(n - i));
                    std::swap(pos[i], pos[j]);
                    shares[pos[i]] = f.add(shares[pos[i]], 1 + rng.below(f.p - 1));
                }
                auto fast = ecc_decode(f, shares, d);
                auto slow = oracle_decode(f, shares, d);
                REQUIRE(fast.ok() == slow.ok());
                if (fast.ok()) REQUIRE(fast.value() == slow.value());
                checked++;
            }
        }
    }
    CHECK(checked > 3000);
}
