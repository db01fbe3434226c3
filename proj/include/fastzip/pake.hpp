#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "field.hpp"
#include "group.hpp"
#include "hashing.hpp"
#include "util.hpp"

namespace fastzip {

enum class Role : uint8_t { Initiator = 0, Responder = 1 };

inline const char* role_name(Role r) { return r == Role::Initiator ? "initiator" : "responder"; }

// One batched password-authenticated round per session: each side emits a
// payload covering all fingerprint bits, then turns the peer's payload into a
// per-bit field-element key vector. Matching bits at an index yield matching
// keys; mismatched bits yield independent-looking ones.
class PakeBackend {
  public:
    virtual ~PakeBackend() = default;
    virtual size_t element_size() const = 0;
    virtual Bytes round_payload(Role self, const Bytes& session_nonce,
                                const std::vector<uint8_t>& bits, Rng& rng) = 0;
    // nullopt on a malformed payload length (the caller treats it as a
    // protocol violation)
    virtual std::optional<std::vector<Fp130::Elem>> derive_keys(
        Role self, const Bytes& session_nonce, const std::vector<uint8_t>& bits,
        const Bytes& peer_payload) = 0;
    virtual void scrub() = 0;
};

namespace detail {

inline Bytes nonce_index_bit(const Bytes& nonce, uint32_t index, uint8_t bit) {
    Bytes b = nonce;
    put_u32_be(b, index);
    b.push_back(bit);
    return b;
}

}  // namespace detail

// Password-encrypted key exchange over the fixed 2048-bit group: the
// "password" for index i is the fingerprint bit, stretched with the session
// nonce so transcripts never replay across sessions. Element encodings are
// XOR-masked with a bit-keyed stream; decryption under the wrong bit produces
// bytes that coerce to some valid element, so nothing leaks which bit the
// peer holds.
class EkeBackend : public PakeBackend {
  public:
    size_t element_size() const override { return DhGroup::ELEMENT_SIZE; }

    Bytes round_payload(Role self, const Bytes& session_nonce,
                        const std::vector<uint8_t>& bits, Rng& rng) override {
        exponents_.clear();
        exponents_.reserve(bits.size());
        Bytes out;
        out.reserve(bits.size() * DhGroup::ELEMENT_SIZE);
        for (uint32_t i = 0; i < bits.size(); i++) {
            mpz_class x = group_.random_exponent(rng);
            Bytes enc = group_.encode(group_.power(group_.g(), x));
            Bytes mask = bit_mask(self, session_nonce, i, bits[i]);
            for (size_t j = 0; j < enc.size(); j++) enc[j] ^= mask[j];
            out.insert(out.end(), enc.begin(), enc.end());
            exponents_.push_back(std::move(x));
        }
        return out;
    }

    std::optional<std::vector<Fp130::Elem>> derive_keys(Role self, const Bytes& session_nonce,
                                                        const std::vector<uint8_t>& bits,
                                                        const Bytes& peer_payload) override {
        if (peer_payload.size() != bits.size() * DhGroup::ELEMENT_SIZE) return std::nullopt;
        if (exponents_.size() != bits.size()) return std::nullopt;
        Role peer = self == Role::Initiator ? Role::Responder : Role::Initiator;
        Fp130 field;
        std::vector<Fp130::Elem> keys(bits.size());
        for (uint32_t i = 0; i < bits.size(); i++) {
            Bytes enc(peer_payload.begin() + i * DhGroup::ELEMENT_SIZE,
                      peer_payload.begin() + (i + 1) * DhGroup::ELEMENT_SIZE);
            Bytes mask = bit_mask(peer, session_nonce, i, bits[i]);
            for (size_t j = 0; j < enc.size(); j++) enc[j] ^= mask[j];
            mpz_class peer_elt = group_.coerce(enc);
            Bytes shared = group_.encode(group_.power(peer_elt, exponents_[i]));
            Bytes info = session_nonce;
            put_u32_be(info, i);
            Bytes raw = hkdf("fastzip-pake-key", shared, info, 32);
            keys[i] = field.from_bytes_mod(raw.data(), raw.size());
            secure_wipe(shared.data(), shared.size());
            secure_wipe(raw.data(), raw.size());
        }
        scrub();
        return keys;
    }

    void scrub() override {
        for (auto& x : exponents_) x = 0;
        exponents_.clear();
    }

  private:
    Bytes bit_mask(Role sender, const Bytes& nonce, uint32_t index, uint8_t bit) const {
        Bytes ikm = detail::nonce_index_bit(nonce, index, bit);
        Bytes prk_bytes = hkdf("fastzip-pake-pw", ikm, Bytes{}, 32);
        Digest prk;
        std::copy(prk_bytes.begin(), prk_bytes.end(), prk.begin());
        const char* label = sender == Role::Initiator ? "mask-A" : "mask-B";
        Bytes info(label, label + 6);
        return hkdf_expand(prk, info, DhGroup::ELEMENT_SIZE);
    }

    DhGroup group_;
    std::vector<mpz_class> exponents_;
};

// Test-scale stand-in with the same interface and agreement semantics but no
// public-key work: both sides derive the key for an index straight from
// (nonce, index, bit). Used to drive the session state machine through
// thousands of runs cheaply; never for real pairing.
class SimulatedBackend : public PakeBackend {
  public:
    size_t element_size() const override { return 0; }

    Bytes round_payload(Role, const Bytes&, const std::vector<uint8_t>&, Rng&) override {
        return {};
    }

    std::optional<std::vector<Fp130::Elem>> derive_keys(Role, const Bytes& session_nonce,
                                                        const std::vector<uint8_t>& bits,
                                                        const Bytes& peer_payload) override {
        if (!peer_payload.empty()) return std::nullopt;
        Fp130 field;
        std::vector<Fp130::Elem> keys(bits.size());
        for (uint32_t i = 0; i < bits.size(); i++) {
            Bytes ikm = detail::nonce_index_bit(session_nonce, i, bits[i]);
            Bytes raw = hkdf("fastzip-sim-key", ikm, Bytes{}, 32);
            keys[i] = field.from_bytes_mod(raw.data(), raw.size());
        }
        return keys;
    }

    void scrub() override {}
};

}  // namespace fastzip
