#pragma once

#include <gmpxx.h>

#include <cstddef>

#include "util.hpp"

namespace fastzip {

namespace detail {

inline Bytes mpz_to_bytes_be(const mpz_class& v, size_t len) {
    Bytes out(len, 0);
    size_t count = 0;
    if (v != 0) {
        mpz_export(out.data(), &count, 1, 1, 1, 0, v.get_mpz_t());
        // mpz_export writes the minimal big-endian form at the front
        if (count < len) {
            std::copy_backward(out.begin(), out.begin() + count, out.begin() + len);
            std::fill(out.begin(), out.begin() + (len - count), 0);
        }
    }
    return out;
}

inline mpz_class mpz_from_bytes_be(const uint8_t* data, size_t len) {
    mpz_class v;
    mpz_import(v.get_mpz_t(), len, 1, 1, 1, 0, data);
    return v;
}

}  // namespace detail

// 2048-bit safe-prime Diffie-Hellman group (the classic MODP group with
// generator 2). Exponentiation is not constant time; prototype grade.
class DhGroup {
  public:
    static constexpr size_t ELEMENT_SIZE = 256;
    static constexpr size_t EXPONENT_BYTES = 32;

    DhGroup() : g_(2) {
        static const char* kPrimeHex =
            "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74"
            "020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437"
            "4FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
            "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3DC2007CB8A163BF05"
            "98DA48361C55D39A69163FA8FD24CF5F83655D23DCA3AD961C62F356208552BB"
            "9ED529077096966D670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B"
            "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9DE2BCBF695581718"
            "3995497CEA956AE515D2261898FA051015728E5A8AACAA68FFFFFFFFFFFFFFFF";
        p_.set_str(kPrimeHex, 16);
    }

    const mpz_class& p() const { return p_; }
    const mpz_class& g() const { return g_; }

    mpz_class random_exponent(Rng& rng) const {
        for (;;) {
            Bytes raw = rng.bytes(EXPONENT_BYTES);
            mpz_class e = detail::mpz_from_bytes_be(raw.data(), raw.size());
            secure_wipe(raw.data(), raw.size());
            if (e != 0) return e;
        }
    }

    mpz_class power(const mpz_class& base, const mpz_class& exp) const {
        mpz_class r;
        mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), p_.get_mpz_t());
        return r;
    }

    Bytes encode(const mpz_class& v) const { return detail::mpz_to_bytes_be(v, ELEMENT_SIZE); }

    // Any 256 bytes map to a usable element: reduce mod p, then bump the
    // degenerate values 0 and 1 (fixed points of exponentiation) to 2. Never
    // fails, so a wrong-password decryption is indistinguishable from a
    // well-formed one.
    mpz_class coerce(const Bytes& b) const {
        mpz_class v = detail::mpz_from_bytes_be(b.data(), b.size());
        v %= p_;
        if (v < 2) v = 2;
        return v;
    }

    bool probably_prime() const {
        return mpz_probab_prime_p(p_.get_mpz_t(), 25) >= 1;
    }
    bool safe_prime() const {
        mpz_class q = (p_ - 1) / 2;
        return probably_prime() && mpz_probab_prime_p(q.get_mpz_t(), 25) >= 1;
    }

  private:
    mpz_class p_;
    mpz_class g_;
};

}  // namespace fastzip
