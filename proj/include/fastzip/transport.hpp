#pragma once

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <array>
#include <chrono>
#include <cstring>
#include <deque>
#include <memory>
#include <optional>
#include <string>

#include "hashing.hpp"
#include "pake.hpp"
#include "util.hpp"

namespace fastzip {

constexpr uint8_t PROTOCOL_VERSION = 1;
constexpr size_t MAX_FRAME_LENGTH = 1u << 20;  // length field cap, type byte included

enum class MsgType : uint8_t {
    Hello = 0x01,
    PakeA = 0x02,
    PakeB = 0x03,
    Commit = 0x04,
    ConfirmA = 0x05,
    ConfirmB = 0x06,
    Abort = 0x0F,
};

enum class AbortReason : uint8_t {
    None = 0x00,
    ParamMismatch = 0x01,
    VersionMismatch = 0x02,
    DecodeFailure = 0x03,
    HashMismatch = 0x04,
    Timeout = 0x05,
    ProtocolViolation = 0x06,
};

inline const char* abort_reason_name(AbortReason r) {
    switch (r) {
        case AbortReason::None: return "None";
        case AbortReason::ParamMismatch: return "ParamMismatch";
        case AbortReason::VersionMismatch: return "VersionMismatch";
        case AbortReason::DecodeFailure: return "DecodeFailure";
        case AbortReason::HashMismatch: return "HashMismatch";
        case AbortReason::Timeout: return "Timeout";
        case AbortReason::ProtocolViolation: return "ProtocolViolation";
    }
    return "?";
}

enum class FrameError { FrameTooLarge, Truncated, UnknownType };

inline const char* frame_error_name(FrameError e) {
    switch (e) {
        case FrameError::FrameTooLarge: return "FrameTooLarge";
        case FrameError::Truncated: return "Truncated";
        case FrameError::UnknownType: return "UnknownType";
    }
    return "?";
}

struct Frame {
    MsgType type;
    Bytes payload;
};

inline bool known_msg_type(uint8_t t) {
    return (t >= 0x01 && t <= 0x06) || t == 0x0F;
}

// [u32 length | type | payload], length covering type byte plus payload.
inline Bytes encode_frame(const Frame& f) {
    Bytes out;
    put_u32_be(out, uint32_t(f.payload.size() + 1));
    out.push_back(uint8_t(f.type));
    out.insert(out.end(), f.payload.begin(), f.payload.end());
    return out;
}

// Decodes one frame from the front of the buffer; on success also reports how
// many bytes it consumed.
inline Expected<std::pair<Frame, size_t>, FrameError> decode_frame(const uint8_t* data,
                                                                   size_t size) {
    if (size < 4) return FrameError::Truncated;
    uint32_t len = get_u32_be(data);
    if (len > MAX_FRAME_LENGTH) return FrameError::FrameTooLarge;
    if (len < 1) return FrameError::Truncated;
    if (size < 4 + size_t(len)) return FrameError::Truncated;
    if (!known_msg_type(data[4])) return FrameError::UnknownType;
    Frame f;
    f.type = MsgType(data[4]);
    f.payload.assign(data + 5, data + 4 + len);
    return std::make_pair(std::move(f), 4 + size_t(len));
}

inline Expected<std::pair<Frame, size_t>, FrameError> decode_frame(const Bytes& b) {
    return decode_frame(b.data(), b.size());
}

struct Hello {
    uint8_t version = PROTOCOL_VERSION;
    std::array<uint8_t, 16> nonce{};
    uint16_t n = 0;
    uint16_t thr_num = 0;
    uint16_t thr_den = 1;
    uint16_t secret_bits = 128;
    uint8_t sensors = 0;  // bit i set = modality i contributes (V,H,G,B = bits 0..3)
};

constexpr size_t HELLO_SIZE = 26;

inline Bytes encode_hello(const Hello& h) {
    Bytes b;
    b.push_back(h.version);
    b.insert(b.end(), h.nonce.begin(), h.nonce.end());
    put_u16_be(b, h.n);
    put_u16_be(b, h.thr_num);
    put_u16_be(b, h.thr_den);
    put_u16_be(b, h.secret_bits);
    b.push_back(h.sensors);
    return b;
}

inline std::optional<Hello> parse_hello(const Bytes& b) {
    if (b.size() != HELLO_SIZE) return std::nullopt;
    Hello h;
    h.version = b[0];
    std::copy(b.begin() + 1, b.begin() + 17, h.nonce.begin());
    h.n = get_u16_be(b.data() + 17);
    h.thr_num = get_u16_be(b.data() + 19);
    h.thr_den = get_u16_be(b.data() + 21);
    h.secret_bits = get_u16_be(b.data() + 23);
    h.sensors = b[25];
    if (h.thr_den == 0) return std::nullopt;
    return h;
}

struct ProtocolConfig {
    uint16_t n = 48;
    Ratio thr{35, 48};
    uint16_t secret_bits = 128;
    double confirm_timeout = 3.0;
    uint8_t sensors = 0;
    Bytes session_nonce;  // filled by negotiation

    long long decode_degree() const { return (thr * Ratio(2, 1) - Ratio(1, 1)).ceil_mul(n); }
    long long error_budget() const { return (static_cast<long long>(n) - decode_degree()) / 2; }
    int codewords() const { return secret_bits > 128 ? 2 : 1; }
    size_t secret_bytes() const { return secret_bits > 128 ? 31 : 16; }
};

// Both ends must announce the same parameters; the surviving config carries a
// session nonce neither side chose alone.
inline Expected<ProtocolConfig, AbortReason> negotiate(const Hello& local, const Hello& remote,
                                                       Role local_role) {
    if (local.version != remote.version) return AbortReason::VersionMismatch;
    if (local.n != remote.n || local.secret_bits != remote.secret_bits ||
        local.sensors != remote.sensors)
        return AbortReason::ParamMismatch;
    if (Ratio(local.thr_num, local.thr_den) != Ratio(remote.thr_num, remote.thr_den))
        return AbortReason::ParamMismatch;
    ProtocolConfig cfg;
    cfg.n = local.n;
    cfg.thr = Ratio(local.thr_num, local.thr_den);
    cfg.secret_bits = local.secret_bits;
    cfg.sensors = local.sensors;
    const Hello& init = local_role == Role::Initiator ? local : remote;
    const Hello& resp = local_role == Role::Initiator ? remote : local;
    Bytes both(init.nonce.begin(), init.nonce.end());
    both.insert(both.end(), resp.nonce.begin(), resp.nonce.end());
    Digest d = sha256(both);
    cfg.session_nonce.assign(d.begin(), d.begin() + 16);
    return cfg;
}

// Monotonic seconds, injectable so tests can run deadlines without sleeping.
struct Clock {
    virtual ~Clock() = default;
    virtual double now() = 0;
};

struct SystemClock : Clock {
    double now() override {
        return std::chrono::duration<double>(
                   std::chrono::steady_clock::now().time_since_epoch())
            .count();
    }
};

struct FakeClock : Clock {
    double t = 0;
    double now() override { return t; }
    void advance(double dt) { t += dt; }
};

// Frame transport endpoint. receive never blocks longer than the given
// timeout; nullopt means nothing arrived (or the peer is gone).
class FrameChannel {
  public:
    virtual ~FrameChannel() = default;
    virtual bool send(const Frame& f) = 0;
    virtual std::optional<Frame> receive(double timeout_seconds) = 0;
};

// Two ordered reliable queues; both endpoints share ownership of the state.
class InMemoryChannel : public FrameChannel {
  public:
    struct Shared {
        std::deque<Frame> to_a, to_b;
    };

    InMemoryChannel(std::shared_ptr<Shared> s, bool is_a) : shared_(std::move(s)), is_a_(is_a) {}

    bool send(const Frame& f) override {
        (is_a_ ? shared_->to_b : shared_->to_a).push_back(f);
        return true;
    }
    std::optional<Frame> receive(double) override {
        auto& q = is_a_ ? shared_->to_a : shared_->to_b;
        if (q.empty()) return std::nullopt;
        Frame f = std::move(q.front());
        q.pop_front();
        return f;
    }
    size_t pending() const { return (is_a_ ? shared_->to_a : shared_->to_b).size(); }

  private:
    std::shared_ptr<Shared> shared_;
    bool is_a_;
};

inline std::pair<std::unique_ptr<InMemoryChannel>, std::unique_ptr<InMemoryChannel>>
make_channel_pair() {
    auto shared = std::make_shared<InMemoryChannel::Shared>();
    return {std::make_unique<InMemoryChannel>(shared, true),
            std::make_unique<InMemoryChannel>(shared, false)};
}

// Frame codec over a connected stream socket. Owns the descriptor.
class TcpChannel : public FrameChannel {
  public:
    explicit TcpChannel(int fd) : fd_(fd) {}
    ~TcpChannel() override {
        if (fd_ >= 0) ::close(fd_);
    }
    TcpChannel(const TcpChannel&) = delete;
    TcpChannel& operator=(const TcpChannel&) = delete;

    bool send(const Frame& f) override {
        Bytes wire = encode_frame(f);
        size_t off = 0;
        while (off < wire.size()) {
            ssize_t k = ::send(fd_, wire.data() + off, wire.size() - off, 0);
            if (k <= 0) return false;
            off += size_t(k);
        }
        return true;
    }

    std::optional<Frame> receive(double timeout_seconds) override {
        auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration<double>(timeout_seconds);
        for (;;) {
            auto dec = decode_frame(buf_);
            if (dec.ok()) {
                Frame f = std::move(dec.value().first);
                buf_.erase(buf_.begin(), buf_.begin() + long(dec.value().second));
                return f;
            }
            if (dec.error() != FrameError::Truncated) return std::nullopt;  // poisoned stream
            double remain = std::chrono::duration<double>(deadline -
                                                          std::chrono::steady_clock::now())
                                .count();
            if (remain < 0) return std::nullopt;
            struct pollfd pfd { fd_, POLLIN, 0 };
            int pr = ::poll(&pfd, 1, int(remain * 1000) + 1);
            if (pr <= 0) return std::nullopt;
            uint8_t chunk[4096];
            ssize_t k = ::recv(fd_, chunk, sizeof chunk, 0);
            if (k <= 0) return std::nullopt;
            buf_.insert(buf_.end(), chunk, chunk + k);
        }
    }

  private:
    int fd_;
    Bytes buf_;
};

// Minimal blocking TCP plumbing for the command-line pairing modes.
inline int tcp_listen_accept(const std::string& host, uint16_t port) {
    int ls = ::socket(AF_INET, SOCK_STREAM, 0);
    if (ls < 0) return -1;
    int one = 1;
    ::setsockopt(ls, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    addr.sin_addr.s_addr = host.empty() ? INADDR_ANY : ::inet_addr(host.c_str());
    if (::bind(ls, (sockaddr*)&addr, sizeof addr) != 0 || ::listen(ls, 1) != 0) {
        ::close(ls);
        return -1;
    }
    int fd = ::accept(ls, nullptr, nullptr);
    ::close(ls);
    if (fd >= 0) ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return fd;
}

inline int tcp_connect(const std::string& host, uint16_t port) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) return -1;
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    addr.sin_addr.s_addr = ::inet_addr(host.empty() ? "127.0.0.1" : host.c_str());
    if (::connect(fd, (sockaddr*)&addr, sizeof addr) != 0) {
        ::close(fd);
        return -1;
    }
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return fd;
}

}  // namespace fastzip
