#pragma once

#include <cassert>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "ecc.hpp"
#include "field.hpp"
#include "group.hpp"
#include "hashing.hpp"
#include "pake.hpp"
#include "transport.hpp"
#include "util.hpp"

namespace fastzip {

enum class Phase { Init, Amplifying, Committing, Confirming, Done, Aborted };

inline const char* phase_name(Phase p) {
    switch (p) {
        case Phase::Init: return "Init";
        case Phase::Amplifying: return "Amplifying";
        case Phase::Committing: return "Committing";
        case Phase::Confirming: return "Confirming";
        case Phase::Done: return "Done";
        case Phase::Aborted: return "Aborted";
    }
    return "?";
}

namespace detail {

// Per-codeword commitment pad, derived from the amplified key share so the
// two codewords of a long secret never reuse a pad.
inline Fp130::Elem share_mask(const Fp130& field, const Fp130::Elem& key, uint32_t codeword) {
    auto raw = field.to_bytes(key);
    Bytes ikm(raw.begin(), raw.end());
    Bytes info;
    put_u32_be(info, codeword);
    Bytes out = hkdf("fastzip-share-mask", ikm, info, 32);
    Fp130::Elem m = field.from_bytes_mod(out.data(), out.size());
    secure_wipe(out.data(), out.size());
    secure_wipe(ikm.data(), ikm.size());
    secure_wipe(raw.data(), raw.size());
    return m;
}

// Split a secret into per-codeword field blocks of at most 122 bits, low
// block first; join_blocks is the inverse on decoded blocks.
inline std::vector<Fp130::Elem> secret_blocks(const Fp130& field, const Bytes& s_bytes,
                                              int codewords) {
    std::vector<Fp130::Elem> blocks;
    if (codewords == 1) {
        blocks.push_back(field.from_bytes_mod(s_bytes.data(), s_bytes.size()));
        return blocks;
    }
    mpz_class s = mpz_from_bytes_be(s_bytes.data(), s_bytes.size());
    mpz_class lo = s & ((mpz_class(1) << 122) - 1);
    mpz_class hi = s >> 122;
    for (const mpz_class& part : {lo, hi}) {
        Bytes be = mpz_to_bytes_be(part, 16);
        blocks.push_back(field.from_bytes_mod(be.data(), be.size()));
    }
    return blocks;
}

inline Bytes join_blocks(const Fp130& field, const std::vector<Fp130::Elem>& blocks,
                         size_t secret_bytes) {
    if (blocks.size() == 1) {
        auto raw = field.to_bytes(blocks[0]);
        mpz_class v = mpz_from_bytes_be(raw.data(), raw.size());
        return mpz_to_bytes_be(v, secret_bytes);
    }
    auto lo_raw = field.to_bytes(blocks[0]);
    auto hi_raw = field.to_bytes(blocks[1]);
    mpz_class lo = mpz_from_bytes_be(lo_raw.data(), lo_raw.size());
    mpz_class hi = mpz_from_bytes_be(hi_raw.data(), hi_raw.size());
    mpz_class s = (hi << 122) + lo;
    return mpz_to_bytes_be(s, secret_bytes);
}

inline Digest confirm_hash(const Bytes& s_bytes, uint8_t domain) {
    Bytes msg = s_bytes;
    msg.push_back(domain);
    Digest d = sha256(msg);
    secure_wipe(msg.data(), msg.size());
    return d;
}

}  // namespace detail

// One endpoint of the key agreement. Frame driven: feed it peer frames and
// clock ticks, send whatever it returns. Every failure path aborts the
// session and wipes key material; only a Done session exposes a key.
class FpakeSession {
  public:
    FpakeSession(ProtocolConfig cfg, std::vector<uint8_t> bits, Role role, PakeBackend* backend,
                 uint64_t seed)
        : cfg_(std::move(cfg)),
          bits_(std::move(bits)),
          role_(role),
          backend_(backend),
          rng_(seed) {
        assert(bits_.size() == cfg_.n);
    }

    Phase phase() const { return phase_; }
    AbortReason abort_reason() const { return reason_; }
    Role role() const { return role_; }
    const ProtocolConfig& config() const { return cfg_; }
    const Bytes& session_key() const { return session_key_; }

    // True while fingerprint bits, amplified key shares, or the raw secret
    // are still resident. Terminal states keep nothing but the session key.
    bool holds_secret_material() const {
        return !bits_.empty() || !keys_.empty() || !s_bytes_.empty();
    }

    std::vector<Frame> start(double now) {
        assert(phase_ == Phase::Init && !hello_sent_);
        hello_sent_ = true;
        Bytes nb = rng_.bytes(local_hello_.nonce.size());
        std::copy(nb.begin(), nb.end(), local_hello_.nonce.begin());
        local_hello_.n = cfg_.n;
        local_hello_.thr_num = uint16_t(cfg_.thr.num);
        local_hello_.thr_den = uint16_t(cfg_.thr.den);
        local_hello_.secret_bits = cfg_.secret_bits;
        local_hello_.sensors = cfg_.sensors;
        arm_deadline(now);
        return {Frame{MsgType::Hello, encode_hello(local_hello_)}};
    }

    std::vector<Frame> on_frame(const Frame& f, double now) {
        if (terminal()) return {};
        if (f.type == MsgType::Abort) {
            reason_ = f.payload.size() == 1 && f.payload[0] >= 1 && f.payload[0] <= 6
                          ? AbortReason(f.payload[0])
                          : AbortReason::ProtocolViolation;
            enter_abort_silent();
            return {};
        }
        if (!hello_sent_) return violation();
        switch (phase_) {
            case Phase::Init:
                if (f.type != MsgType::Hello) return violation();
                return handle_hello(f, now);
            case Phase::Amplifying:
                if (role_ == Role::Initiator) {
                    if (f.type != MsgType::PakeB) return violation();
                    return handle_pake_reply(f, now);
                }
                if (f.type != MsgType::PakeA) return violation();
                return handle_pake_first(f, now);
            case Phase::Committing:
                if (f.type != MsgType::Commit) return violation();
                return handle_commit(f, now);
            case Phase::Confirming:
                if (role_ == Role::Initiator) {
                    if (f.type != MsgType::ConfirmB) return violation();
                    return handle_confirm_reply(f, now);
                }
                if (f.type != MsgType::ConfirmA) return violation();
                return handle_confirm_first(f, now);
            default:
                return {};
        }
    }

    std::vector<Frame> on_tick(double now) {
        if (terminal() || now <= deadline_) return {};
        reason_ = AbortReason::Timeout;
        std::vector<Frame> out = {abort_frame(reason_)};
        enter_abort_silent();
        return out;
    }

  private:
    bool terminal() const { return phase_ == Phase::Done || phase_ == Phase::Aborted; }

    void arm_deadline(double now) { deadline_ = now + cfg_.confirm_timeout; }

    Frame abort_frame(AbortReason r) { return Frame{MsgType::Abort, Bytes{uint8_t(r)}}; }

    std::vector<Frame> abort_with(AbortReason r) {
        reason_ = r;
        std::vector<Frame> out = {abort_frame(r)};
        enter_abort_silent();
        return out;
    }

    std::vector<Frame> violation() { return abort_with(AbortReason::ProtocolViolation); }

    void enter_abort_silent() {
        phase_ = Phase::Aborted;
        scrub_all();
    }

    void scrub_all() {
        if (!bits_.empty()) secure_wipe(bits_.data(), bits_.size());
        bits_.clear();
        if (!keys_.empty()) secure_wipe(keys_.data(), keys_.size() * sizeof(Fp130::Elem));
        keys_.clear();
        if (!s_bytes_.empty()) secure_wipe(s_bytes_.data(), s_bytes_.size());
        s_bytes_.clear();
        secure_wipe(expect_confirm_.data(), expect_confirm_.size());
        if (backend_) backend_->scrub();
    }

    std::vector<Frame> handle_hello(const Frame& f, double now) {
        auto remote = parse_hello(f.payload);
        if (!remote) return violation();
        auto neg = negotiate(local_hello_, *remote, role_);
        if (!neg.ok()) return abort_with(neg.error());
        ProtocolConfig merged = neg.value();
        merged.confirm_timeout = cfg_.confirm_timeout;
        cfg_ = merged;
        phase_ = Phase::Amplifying;
        arm_deadline(now);
        if (role_ == Role::Initiator)
            return {Frame{MsgType::PakeA,
                          backend_->round_payload(role_, cfg_.session_nonce, bits_, rng_)}};
        return {};
    }

    // Responder: the peer's amplification round arrives; answer with ours and
    // derive the key shares right away.
    std::vector<Frame> handle_pake_first(const Frame& f, double now) {
        Frame reply{MsgType::PakeB,
                    backend_->round_payload(role_, cfg_.session_nonce, bits_, rng_)};
        auto keys = backend_->derive_keys(role_, cfg_.session_nonce, bits_, f.payload);
        if (!keys) return violation();
        keys_ = std::move(*keys);
        phase_ = Phase::Committing;
        arm_deadline(now);
        return {reply};
    }

    // Initiator: the peer answered, so derive shares, commit to a fresh
    // secret, and send the confirmation hash in the same flight.
    std::vector<Frame> handle_pake_reply(const Frame& f, double now) {
        auto keys = backend_->derive_keys(role_, cfg_.session_nonce, bits_, f.payload);
        if (!keys) return violation();
        keys_ = std::move(*keys);

        s_bytes_ = rng_.bytes(cfg_.secret_bytes());
        if (cfg_.secret_bits == 244) s_bytes_[0] &= 0x0F;

        Fp130 field;
        std::vector<Fp130::Elem> blocks =
            detail::secret_blocks(field, s_bytes_, cfg_.codewords());
        Bytes payload;
        payload.reserve(size_t(cfg_.n) * Fp130::ENCODED_SIZE * blocks.size());
        int d = int(cfg_.decode_degree());
        for (uint32_t j = 0; j < blocks.size(); ++j) {
            auto code = ecc_encode(field, blocks[j], cfg_.n, d, rng_);
            if (!code.ok()) return violation();
            for (uint16_t i = 0; i < cfg_.n; ++i) {
                Fp130::Elem mask = cfg_.codewords() == 1
                                       ? keys_[i]
                                       : detail::share_mask(field, keys_[i], j);
                auto raw = field.to_bytes(field.add(code.value()[i], mask));
                payload.insert(payload.end(), raw.begin(), raw.end());
            }
            secure_wipe(code.value().data(), code.value().size() * sizeof(Fp130::Elem));
        }
        secure_wipe(blocks.data(), blocks.size() * sizeof(Fp130::Elem));
        secure_wipe(keys_.data(), keys_.size() * sizeof(Fp130::Elem));
        keys_.clear();

        Digest h = detail::confirm_hash(s_bytes_, 0x00);
        expect_confirm_ = detail::confirm_hash(s_bytes_, 0x01);
        phase_ = Phase::Confirming;
        arm_deadline(now);  // the confirm timeout runs from this send
        return {Frame{MsgType::Commit, std::move(payload)},
                Frame{MsgType::ConfirmA, Bytes(h.begin(), h.end())}};
    }

    // Responder: unmask the commitment with our shares and decode. Wire-level
    // garbage is a violation; a clean decode failure means the fingerprints
    // disagreed in too many positions.
    std::vector<Frame> handle_commit(const Frame& f, double now) {
        size_t per_cw = size_t(cfg_.n) * Fp130::ENCODED_SIZE;
        if (f.payload.size() != per_cw * size_t(cfg_.codewords())) return violation();
        Fp130 field;
        int d = int(cfg_.decode_degree());
        std::vector<Fp130::Elem> blocks;
        for (int j = 0; j < cfg_.codewords(); ++j) {
            std::vector<Fp130::Elem> received(cfg_.n);
            for (uint16_t i = 0; i < cfg_.n; ++i) {
                auto elem = field.from_bytes(
                    f.payload.data() + per_cw * size_t(j) + size_t(i) * Fp130::ENCODED_SIZE,
                    Fp130::ENCODED_SIZE);
                if (!elem) return violation();
                Fp130::Elem mask = cfg_.codewords() == 1
                                       ? keys_[i]
                                       : detail::share_mask(field, keys_[i], uint32_t(j));
                received[i] = field.sub(*elem, mask);
            }
            auto decoded = ecc_decode(field, received, d);
            secure_wipe(received.data(), received.size() * sizeof(Fp130::Elem));
            if (!decoded.ok()) return abort_with(AbortReason::DecodeFailure);
            blocks.push_back(decoded.value()[0]);
            secure_wipe(decoded.value().data(), decoded.value().size() * sizeof(Fp130::Elem));
        }
        secure_wipe(keys_.data(), keys_.size() * sizeof(Fp130::Elem));
        keys_.clear();
        s_bytes_ = detail::join_blocks(field, blocks, cfg_.secret_bytes());
        secure_wipe(blocks.data(), blocks.size() * sizeof(Fp130::Elem));
        phase_ = Phase::Confirming;
        arm_deadline(now);
        return {};
    }

    // Responder: check the peer's hash against the recovered secret before
    // revealing anything derived from our own view.
    std::vector<Frame> handle_confirm_first(const Frame& f, double) {
        Digest expect = detail::confirm_hash(s_bytes_, 0x00);
        if (f.payload.size() != expect.size() ||
            !std::equal(expect.begin(), expect.end(), f.payload.begin()))
            return abort_with(AbortReason::HashMismatch);
        Digest reply = detail::confirm_hash(s_bytes_, 0x01);
        finish();
        return {Frame{MsgType::ConfirmB, Bytes(reply.begin(), reply.end())}};
    }

    // Initiator: the reply must land before the deadline and match.
    std::vector<Frame> handle_confirm_reply(const Frame& f, double now) {
        if (now > deadline_) return abort_with(AbortReason::Timeout);
        if (f.payload.size() != expect_confirm_.size() ||
            !std::equal(expect_confirm_.begin(), expect_confirm_.end(), f.payload.begin()))
            return abort_with(AbortReason::HashMismatch);
        finish();
        return {};
    }

    void finish() {
        session_key_ = hkdf("fastzip-session-key", s_bytes_, cfg_.session_nonce, 32);
        phase_ = Phase::Done;
        scrub_all();
    }

    ProtocolConfig cfg_;
    std::vector<uint8_t> bits_;
    Role role_;
    PakeBackend* backend_;
    Rng rng_;
    Hello local_hello_;
    bool hello_sent_ = false;
    Phase phase_ = Phase::Init;
    AbortReason reason_ = AbortReason::None;
    double deadline_ = 0;
    std::vector<Fp130::Elem> keys_;
    Bytes s_bytes_;
    Digest expect_confirm_{};
    Bytes session_key_;
};

struct LoopbackReport {
    Phase phase_a = Phase::Init;
    Phase phase_b = Phase::Init;
    AbortReason reason_a = AbortReason::None;
    AbortReason reason_b = AbortReason::None;
    Bytes key_a, key_b;
    double t_amplify = 0, t_commit = 0, t_confirm = 0, t_total = 0;

    bool both_done() const { return phase_a == Phase::Done && phase_b == Phase::Done; }
    bool keys_match() const { return both_done() && !key_a.empty() && key_a == key_b; }
};

// Optional fault injection for loopback runs: return false to drop the frame,
// or mutate it in place before delivery.
using FrameFilter = std::function<bool(Frame&, Role to)>;

// Runs both endpoints over an in-process ordered channel, attributing time to
// the three stages via checkpoints so the stage times sum to the total.
inline LoopbackReport loopback_pair(const ProtocolConfig& cfg, const std::vector<uint8_t>& bits_a,
                                    const std::vector<uint8_t>& bits_b, PakeBackend& backend_a,
                                    PakeBackend& backend_b, uint64_t seed, Clock* clock = nullptr,
                                    FrameFilter filter = {}) {
    SystemClock default_clock;
    Clock& ck = clock ? *clock : default_clock;
    FpakeSession a(cfg, bits_a, Role::Initiator, &backend_a, seed * 2 + 1);
    FpakeSession b(cfg, bits_b, Role::Responder, &backend_b, seed * 2 + 2);

    std::deque<Frame> to_b, to_a;
    double t0 = ck.now();
    for (auto& f : a.start(ck.now())) to_b.push_back(std::move(f));
    for (auto& f : b.start(ck.now())) to_a.push_back(std::move(f));

    double t_keys = -1, t_decode = -1;
    auto note_checkpoints = [&]() {
        double now = ck.now();
        if (t_keys < 0 && a.phase() >= Phase::Confirming) t_keys = now;
        if (t_decode < 0 && t_keys >= 0 && b.phase() >= Phase::Confirming) t_decode = now;
    };

    int idle_rounds = 0;
    auto terminal = [](const FpakeSession& s) {
        return s.phase() == Phase::Done || s.phase() == Phase::Aborted;
    };
    while (!(terminal(a) && terminal(b))) {
        bool progressed = false;
        if (!to_b.empty()) {
            Frame f = std::move(to_b.front());
            to_b.pop_front();
            if (!filter || filter(f, Role::Responder))
                for (auto& r : b.on_frame(f, ck.now())) to_a.push_back(std::move(r));
            progressed = true;
        }
        if (!to_a.empty()) {
            Frame f = std::move(to_a.front());
            to_a.pop_front();
            if (!filter || filter(f, Role::Initiator))
                for (auto& r : a.on_frame(f, ck.now())) to_b.push_back(std::move(r));
            progressed = true;
        }
        note_checkpoints();
        if (!progressed) {
            for (auto& r : a.on_tick(ck.now())) to_b.push_back(std::move(r));
            for (auto& r : b.on_tick(ck.now())) to_a.push_back(std::move(r));
            if (to_a.empty() && to_b.empty()) {
                if (auto* fc = dynamic_cast<FakeClock*>(&ck)) {
                    fc->advance(cfg.confirm_timeout / 4 + 0.01);
                } else if (++idle_rounds > 64) {
                    break;  // defensive: a live-clock run should never stall
                }
            }
        }
    }

    double t3 = ck.now();
    if (t_keys < 0) t_keys = t3;
    if (t_decode < 0) t_decode = t3;
    LoopbackReport rep;
    rep.phase_a = a.phase();
    rep.phase_b = b.phase();
    rep.reason_a = a.abort_reason();
    rep.reason_b = b.abort_reason();
    rep.key_a = a.session_key();
    rep.key_b = b.session_key();
    rep.t_amplify = t_keys - t0;
    rep.t_commit = t_decode - t_keys;
    rep.t_confirm = t3 - t_decode;
    rep.t_total = t3 - t0;
    return rep;
}

// Drives one endpoint over a real channel until it reaches a terminal state.
inline Expected<Bytes, AbortReason> run_session(FpakeSession& s, FrameChannel& ch, Clock& ck) {
    auto flush = [&](std::vector<Frame> frames) {
        for (const Frame& f : frames) ch.send(f);
    };
    flush(s.start(ck.now()));
    while (s.phase() != Phase::Done && s.phase() != Phase::Aborted) {
        auto f = ch.receive(0.1);
        if (f) {
            flush(s.on_frame(*f, ck.now()));
        } else {
            flush(s.on_tick(ck.now()));
        }
    }
    if (s.phase() == Phase::Done) return s.session_key();
    return s.abort_reason();
}

}  // namespace fastzip
