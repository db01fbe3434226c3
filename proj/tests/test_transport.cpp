#include <catch2/catch_amalgamated.hpp>

#include <sys/socket.h>

#include <cstring>
#include <thread>

#include "fastzip/protocol.hpp"
#include "fastzip/transport.hpp"

using namespace fastzip;

static ProtocolConfig test_config(uint16_t n, Ratio thr, uint16_t secret_bits = 128) {
    ProtocolConfig cfg;
    cfg.n = n;
    cfg.thr = thr;
    cfg.secret_bits = secret_bits;
    cfg.sensors = 0x0F;
    return cfg;
}

static std::vector<uint8_t> random_bits(Rng& rng, size_t n) {
    std::vector<uint8_t> v(n);
    for (auto& b : v) b = uint8_t(rng.below(2));
    return v;
}

TEST_CASE("frame codec round trips") {
    Frame f{MsgType::Commit, Bytes{1, 2, 3, 4, 5}};
    Bytes wire = encode_frame(f);
    REQUIRE(wire.size() == 4 + 1 + 5);
    auto dec = decode_frame(wire);
    REQUIRE(dec.ok());
    CHECK(dec.value().first.type == MsgType::Commit);
    CHECK(dec.value().first.payload == f.payload);
    CHECK(dec.value().second == wire.size());

    // trailing bytes belong to the next frame and must be left alone
    Bytes two = wire;
    Bytes second = encode_frame(Frame{MsgType::ConfirmA, Bytes(32, 0xAB)});
    two.insert(two.end(), second.begin(), second.end());
    auto first = decode_frame(two);
    REQUIRE(first.ok());
    CHECK(first.value().second == wire.size());
    auto rest = decode_frame(two.data() + first.value().second,
                             two.size() - first.value().second);
    REQUIRE(rest.ok());
    CHECK(rest.value().first.type == MsgType::ConfirmA);
}

TEST_CASE("abort frame has the documented wire form") {
    Bytes wire = encode_frame(Frame{MsgType::Abort, Bytes{0x01}});
    CHECK(wire == Bytes{0x00, 0x00, 0x00, 0x02, 0x0F, 0x01});
    auto dec = decode_frame(wire);
    REQUIRE(dec.ok());
    CHECK(dec.value().first.type == MsgType::Abort);
    REQUIRE(dec.value().first.payload.size() == 1);
    CHECK(dec.value().first.payload[0] == 0x01);
}

TEST_CASE("frame length cap") {
    // exactly at the cap: length field = 1 MiB, payload one byte less
    Frame big{MsgType::Commit, Bytes((1u << 20) - 1, 0x7)};
    Bytes wire = encode_frame(big);
    auto dec = decode_frame(wire);
    REQUIRE(dec.ok());
    CHECK(dec.value().first.payload.size() == (1u << 20) - 1);

    // a declared 2 MiB frame is rejected before any payload is read
    Bytes hdr = {0x00, 0x20, 0x00, 0x00, 0x04};
    auto over = decode_frame(hdr);
    REQUIRE(!over.ok());
    CHECK(over.error() == FrameError::FrameTooLarge);

    Bytes just_over;
    put_u32_be(just_over, (1u << 20) + 1);
    just_over.push_back(0x04);
    auto jo = decode_frame(just_over);
    REQUIRE(!jo.ok());
    CHECK(jo.error() == FrameError::FrameTooLarge);
}

TEST_CASE("truncated and unknown frames") {
    CHECK(decode_frame(Bytes{}).error() == FrameError::Truncated);
    CHECK(decode_frame(Bytes{0x00, 0x00, 0x00}).error() == FrameError::Truncated);
    // zero length leaves no room for the type byte
    CHECK(decode_frame(Bytes{0x00, 0x00, 0x00, 0x00}).error() == FrameError::Truncated);
    // header promises more than the buffer holds
    CHECK(decode_frame(Bytes{0x00, 0x00, 0x00, 0x05, 0x04, 0x01}).error() ==
          FrameError::Truncated);
    for (uint8_t t : {0x00, 0x07, 0x0E, 0x10, 0xFF}) {
        Bytes b{0x00, 0x00, 0x00, 0x01, t};
        auto dec = decode_frame(b);
        REQUIRE(!dec.ok());
        CHECK(dec.error() == FrameError::UnknownType);
    }
}

TEST_CASE("hello layout") {
    Hello h;
    h.version = PROTOCOL_VERSION;
    for (size_t i = 0; i < h.nonce.size(); i++) h.nonce[i] = uint8_t(i + 1);
    h.n = 48;
    h.thr_num = 35;
    h.thr_den = 48;
    h.secret_bits = 128;
    h.sensors = 0x0F;
    Bytes b = encode_hello(h);
    REQUIRE(b.size() == HELLO_SIZE);
    CHECK(b[0] == PROTOCOL_VERSION);
    CHECK(b[1] == 1);
    CHECK(b[16] == 16);
    CHECK(get_u16_be(b.data() + 17) == 48);
    CHECK(get_u16_be(b.data() + 19) == 35);
    CHECK(get_u16_be(b.data() + 21) == 48);
    CHECK(get_u16_be(b.data() + 23) == 128);
    CHECK(b[25] == 0x0F);

    auto back = parse_hello(b);
    REQUIRE(back.has_value());
    CHECK(back->nonce == h.nonce);
    CHECK(back->thr_num == 35);

    CHECK(!parse_hello(Bytes(25, 0)).has_value());
    CHECK(!parse_hello(Bytes(27, 0)).has_value());
    Bytes zero_den = b;
    zero_den[21] = zero_den[22] = 0;
    CHECK(!parse_hello(zero_den).has_value());
}

TEST_CASE("negotiation agrees on a session nonce neither side chose") {
    Rng rng(1234);
    Hello a, b;
    Bytes na = rng.bytes(16), nb = rng.bytes(16);
    std::copy(na.begin(), na.end(), a.nonce.begin());
    std::copy(nb.begin(), nb.end(), b.nonce.begin());
    a.n = b.n = 48;
    a.thr_num = b.thr_num = 35;
    a.thr_den = b.thr_den = 48;
    a.secret_bits = b.secret_bits = 128;
    a.sensors = b.sensors = 0x0F;

    auto from_a = negotiate(a, b, Role::Initiator);
    auto from_b = negotiate(b, a, Role::Responder);
    REQUIRE(from_a.ok());
    REQUIRE(from_b.ok());
    CHECK(from_a.value().session_nonce == from_b.value().session_nonce);
    CHECK(from_a.value().session_nonce.size() == 16);

    // the nonce is the truncated hash of initiator nonce then responder nonce
    Bytes cat = na;
    cat.insert(cat.end(), nb.begin(), nb.end());
    Digest d = sha256(cat);
    CHECK(Bytes(d.begin(), d.begin() + 16) == from_a.value().session_nonce);

    // swapping who initiates changes the transcript and therefore the nonce
    auto swapped = negotiate(a, b, Role::Responder);
    REQUIRE(swapped.ok());
    CHECK(swapped.value().session_nonce != from_a.value().session_nonce);

    SECTION("version mismatch wins over other differences") {
        Hello c = b;
        c.version = 2;
        c.n = 99;
        auto r = negotiate(a, c, Role::Initiator);
        REQUIRE(!r.ok());
        CHECK(r.error() == AbortReason::VersionMismatch);
    }
    SECTION("parameter mismatches") {
        Hello c = b;
        c.n = 64;
        CHECK(negotiate(a, c, Role::Initiator).error() == AbortReason::ParamMismatch);
        c = b;
        c.thr_num = 36;
        CHECK(negotiate(a, c, Role::Initiator).error() == AbortReason::ParamMismatch);
        c = b;
        c.secret_bits = 244;
        CHECK(negotiate(a, c, Role::Initiator).error() == AbortReason::ParamMismatch);
        c = b;
        c.sensors = 0x07;
        CHECK(negotiate(a, c, Role::Initiator).error() == AbortReason::ParamMismatch);
    }
    SECTION("threshold compared as a fraction, not as raw fields") {
        Hello c = b;
        c.thr_num = 70;
        c.thr_den = 96;
        auto r = negotiate(a, c, Role::Initiator);
        CHECK(r.ok());
    }
}

TEST_CASE("in-memory channel is ordered and non-blocking") {
    auto [a, b] = make_channel_pair();
    CHECK(!a->receive(0).has_value());
    a->send(Frame{MsgType::Hello, Bytes{1}});
    a->send(Frame{MsgType::PakeA, Bytes{2}});
    auto f1 = b->receive(0);
    auto f2 = b->receive(0);
    REQUIRE(f1.has_value());
    REQUIRE(f2.has_value());
    CHECK(f1->type == MsgType::Hello);
    CHECK(f2->type == MsgType::PakeA);
    CHECK(!b->receive(0).has_value());
    b->send(Frame{MsgType::PakeB, Bytes{3}});
    auto f3 = a->receive(0);
    REQUIRE(f3.has_value());
    CHECK(f3->type == MsgType::PakeB);
}

TEST_CASE("clocks") {
    FakeClock fc;
    CHECK(fc.now() == 0.0);
    fc.advance(1.5);
    CHECK(fc.now() == 1.5);
    SystemClock sc;
    double t1 = sc.now();
    double t2 = sc.now();
    CHECK(t2 >= t1);
}

TEST_CASE("stream channel reassembles frames split across writes") {
    int fds[2];
    REQUIRE(::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) == 0);
    TcpChannel reader(fds[0]);
    Bytes wire = encode_frame(Frame{MsgType::ConfirmA, Bytes(32, 0x5C)});
    Bytes more = encode_frame(Frame{MsgType::ConfirmB, Bytes(32, 0x3D)});
    wire.insert(wire.end(), more.begin(), more.end());
    // dribble the two frames through the socket in three raw chunks
    size_t cut1 = 3, cut2 = wire.size() - 10;
    REQUIRE(::send(fds[1], wire.data(), cut1, 0) == ssize_t(cut1));
    REQUIRE(::send(fds[1], wire.data() + cut1, cut2 - cut1, 0) == ssize_t(cut2 - cut1));
    REQUIRE(::send(fds[1], wire.data() + cut2, wire.size() - cut2, 0) ==
            ssize_t(wire.size() - cut2));
    auto f1 = reader.receive(1.0);
    auto f2 = reader.receive(1.0);
    REQUIRE(f1.has_value());
    REQUIRE(f2.has_value());
    CHECK(f1->type == MsgType::ConfirmA);
    CHECK(f1->payload == Bytes(32, 0x5C));
    CHECK(f2->type == MsgType::ConfirmB);
    ::close(fds[1]);
    CHECK(!reader.receive(0.02).has_value());
}

TEST_CASE("stream channel receive times out when nothing arrives") {
    int fds[2];
    REQUIRE(::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) == 0);
    TcpChannel reader(fds[0]);
    SystemClock sc;
    double t0 = sc.now();
    CHECK(!reader.receive(0.05).has_value());
    CHECK(sc.now() - t0 >= 0.04);
    ::close(fds[1]);
}

TEST_CASE("out-of-order frames abort the session without producing a key") {
    ProtocolConfig cfg = test_config(16, Ratio(3, 4));
    Rng rng(77);
    auto bits = random_bits(rng, cfg.n);
    SECTION("commitment before amplification") {
        SimulatedBackend backend;
        FpakeSession b(cfg, bits, Role::Responder, &backend, 900);
        b.start(0.0);
        Frame commit{MsgType::Commit, Bytes(16 * 17, 0)};
        auto out = b.on_frame(commit, 0.1);
        REQUIRE(out.size() == 1);
        CHECK(out[0].type == MsgType::Abort);
        REQUIRE(out[0].payload.size() == 1);
        CHECK(out[0].payload[0] == uint8_t(AbortReason::ProtocolViolation));
        CHECK(b.phase() == Phase::Aborted);
        CHECK(b.session_key().empty());
        CHECK(!b.holds_secret_material());
    }
    SECTION("reflected first pake message") {
        SimulatedBackend backend_a, backend_b;
        FpakeSession a(cfg, bits, Role::Initiator, &backend_a, 901);
        FpakeSession b(cfg, bits, Role::Responder, &backend_b, 902);
        a.start(0.0);
        auto hello_b = b.start(0.0);
        auto pake_a = a.on_frame(hello_b[0], 0.0);
        REQUIRE(pake_a.size() == 1);
        REQUIRE(pake_a[0].type == MsgType::PakeA);
        auto out = a.on_frame(pake_a[0], 0.1);  // bounce it straight back
        REQUIRE(out.size() == 1);
        CHECK(out[0].payload[0] == uint8_t(AbortReason::ProtocolViolation));
        CHECK(a.phase() == Phase::Aborted);
        CHECK(a.session_key().empty());
    }
    SECTION("confirmation before commitment") {
        SimulatedBackend backend_a, backend_b;
        FpakeSession a(cfg, bits, Role::Initiator, &backend_a, 903);
        FpakeSession b(cfg, bits, Role::Responder, &backend_b, 904);
        auto hello_a = a.start(0.0);
        auto hello_b = b.start(0.0);
        b.on_frame(hello_a[0], 0.0);
        auto pake_a = a.on_frame(hello_b[0], 0.0);
        auto pake_b = b.on_frame(pake_a[0], 0.0);
        REQUIRE(pake_b.size() == 1);
        auto out = b.on_frame(Frame{MsgType::ConfirmA, Bytes(32, 0)}, 0.1);
        REQUIRE(out.size() == 1);
        CHECK(out[0].payload[0] == uint8_t(AbortReason::ProtocolViolation));
        CHECK(b.phase() == Phase::Aborted);
    }
}

TEST_CASE("malformed commitment elements are rejected as violations") {
    ProtocolConfig cfg = test_config(16, Ratio(3, 4));
    Rng rng(501);
    auto bits = random_bits(rng, cfg.n);
    SECTION("wrong payload length") {
        SimulatedBackend ba, bb;
        FakeClock ck;
        auto rep = loopback_pair(cfg, bits, bits, ba, bb, 41, &ck,
                                 [](Frame& f, Role to) {
                                     if (to == Role::Responder && f.type == MsgType::Commit)
                                         f.payload.pop_back();
                                     return true;
                                 });
        CHECK(rep.phase_b == Phase::Aborted);
        CHECK(rep.reason_b == AbortReason::ProtocolViolation);
        CHECK(rep.key_b.empty());
    }
    SECTION("element with stray top bits") {
        SimulatedBackend ba, bb;
        FakeClock ck;
        auto rep = loopback_pair(cfg, bits, bits, ba, bb, 42, &ck,
                                 [](Frame& f, Role to) {
                                     if (to == Role::Responder && f.type == MsgType::Commit)
                                         f.payload[0] = 0x80;  // top byte must be <= 0x3
                                     return true;
                                 });
        CHECK(rep.phase_b == Phase::Aborted);
        CHECK(rep.reason_b == AbortReason::ProtocolViolation);
    }
}

TEST_CASE("single corrupted share is absorbed by the error budget") {
    // n = 48 with the four-sensor fused threshold leaves budget for 13 bad
    // shares, so one flipped share must never sink the pairing
    ProtocolConfig cfg = test_config(48, Ratio(35, 48));
    REQUIRE(cfg.decode_degree() == 22);
    REQUIRE(cfg.error_budget() == 13);
    Rng rng(2024);
    int succeeded = 0;
    const int trials = 100;
    for (int t = 0; t < trials; t++) {
        auto bits = random_bits(rng, cfg.n);
        size_t victim = rng.below(cfg.n);
        SimulatedBackend ba, bb;
        FakeClock ck;
        auto rep = loopback_pair(cfg, bits, bits, ba, bb, 7000 + uint64_t(t), &ck,
                                 [victim](Frame& f, Role to) {
                                     if (to == Role::Responder && f.type == MsgType::Commit)
                                         f.payload[victim * 17 + 9] ^= 0x5A;
                                     return true;
                                 });
        if (rep.keys_match()) succeeded++;
    }
    INFO("succeeded " << succeeded << "/" << trials);
    CHECK(succeeded >= 99);
    CHECK(succeeded == trials);
}

TEST_CASE("randomized commitment frames never yield a confirmed key") {
    // small geometry keeps ten thousand decode attempts affordable
    ProtocolConfig cfg = test_config(16, Ratio(3, 4));
    REQUIRE(cfg.decode_degree() == 8);
    Rng rng(5150);
    Fp130 field;
    const int trials = 10000;
    int b_done = 0, mismatched = 0;
    for (int t = 0; t < trials; t++) {
        auto bits = random_bits(rng, cfg.n);
        SimulatedBackend ba, bb;
        FakeClock ck;
        bool valid_elems = (t & 1) != 0;
        auto rep = loopback_pair(
            cfg, bits, bits, ba, bb, 90000 + uint64_t(t), &ck,
            [&](Frame& f, Role to) {
                if (to == Role::Responder && f.type == MsgType::Commit) {
                    if (valid_elems) {
                        // garbage that still parses as field elements
                        for (size_t i = 0; i + 17 <= f.payload.size(); i += 17) {
                            auto raw = field.to_bytes(field.random(rng));
                            std::copy(raw.begin(), raw.end(), f.payload.begin() + long(i));
                        }
                    } else {
                        Bytes junk = rng.bytes(f.payload.size());
                        f.payload = junk;
                    }
                }
                return true;
            });
        if (rep.phase_b == Phase::Done) b_done++;
        if (rep.both_done() && rep.key_a != rep.key_b) mismatched++;
    }
    CHECK(b_done == 0);
    CHECK(mismatched == 0);
}

TEST_CASE("withheld confirmation reply trips the initiator timeout") {
    ProtocolConfig cfg = test_config(16, Ratio(3, 4));
    Rng rng(31337);
    auto bits = random_bits(rng, cfg.n);
    SimulatedBackend ba, bb;
    FakeClock ck;
    auto rep = loopback_pair(cfg, bits, bits, ba, bb, 5, &ck, [](Frame& f, Role to) {
        return !(to == Role::Initiator && f.type == MsgType::ConfirmB);
    });
    CHECK(rep.phase_a == Phase::Aborted);
    CHECK(rep.reason_a == AbortReason::Timeout);
    // the responder had already verified and finished by then
    CHECK(rep.phase_b == Phase::Done);
    CHECK(rep.key_a.empty());
    // terminated within the timeout plus the driver's tick quantum
    CHECK(rep.t_total <= cfg.confirm_timeout + 1.0);
}

TEST_CASE("withheld commitment times out both sides") {
    ProtocolConfig cfg = test_config(16, Ratio(3, 4));
    Rng rng(999);
    auto bits = random_bits(rng, cfg.n);
    SimulatedBackend ba, bb;
    FakeClock ck;
    // swallow the whole commitment flight; both peers are left waiting
    auto rep = loopback_pair(cfg, bits, bits, ba, bb, 6, &ck, [](Frame& f, Role to) {
        return !(to == Role::Responder &&
                 (f.type == MsgType::Commit || f.type == MsgType::ConfirmA));
    });
    CHECK(rep.phase_a == Phase::Aborted);
    CHECK(rep.phase_b == Phase::Aborted);
    CHECK(rep.reason_a == AbortReason::Timeout);
    CHECK(rep.reason_b == AbortReason::Timeout);
    CHECK(rep.t_total <= cfg.confirm_timeout + 1.0);
}

TEST_CASE("dropping every frame still terminates") {
    ProtocolConfig cfg = test_config(16, Ratio(3, 4));
    Rng rng(4242);
    auto bits = random_bits(rng, cfg.n);
    SimulatedBackend ba, bb;
    FakeClock ck;
    auto rep = loopback_pair(cfg, bits, bits, ba, bb, 7, &ck,
                             [](Frame&, Role) { return false; });
    CHECK(rep.phase_a == Phase::Aborted);
    CHECK(rep.phase_b == Phase::Aborted);
    CHECK(rep.t_total <= cfg.confirm_timeout + 1.0);
}

TEST_CASE("stage timings partition the total") {
    ProtocolConfig cfg = test_config(48, Ratio(35, 48));
    Rng rng(60);
    auto bits = random_bits(rng, cfg.n);
    SimulatedBackend ba, bb;
    auto rep = loopback_pair(cfg, bits, bits, ba, bb, 8);
    REQUIRE(rep.keys_match());
    CHECK(rep.t_amplify >= 0);
    CHECK(rep.t_commit >= 0);
    CHECK(rep.t_confirm >= 0);
    CHECK(std::abs(rep.t_amplify + rep.t_commit + rep.t_confirm - rep.t_total) < 1e-9);
}

TEST_CASE("pairing over a local socket") {
    ProtocolConfig cfg = test_config(24, Ratio(3, 4));
    Rng rng(808);
    auto bits = random_bits(rng, cfg.n);
    int fds[2];
    REQUIRE(::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) == 0);
    SystemClock ck;
    Bytes key_b;
    std::thread responder([&] {
        TcpChannel ch(fds[1]);
        SimulatedBackend backend;
        FpakeSession s(cfg, bits, Role::Responder, &backend, 1002);
        SystemClock ck2;
        auto r = run_session(s, ch, ck2);
        if (r.ok()) key_b = r.value();
    });
    TcpChannel ch(fds[0]);
    SimulatedBackend backend;
    FpakeSession s(cfg, bits, Role::Initiator, &backend, 1001);
    auto r = run_session(s, ch, ck);
    responder.join();
    REQUIRE(r.ok());
    REQUIRE(!key_b.empty());
    CHECK(r.value() == key_b);
}
