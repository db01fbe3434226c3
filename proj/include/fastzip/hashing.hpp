#pragma once

#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <cstring>
#include <string>

#include "util.hpp"

namespace fastzip {

using Digest = std::array<uint8_t, 32>;

inline Digest sha256(const uint8_t* data, size_t len) {
    Digest out{};
    unsigned int outlen = 0;
    EVP_Digest(data, len, out.data(), &outlen, EVP_sha256(), nullptr);
    return out;
}
inline Digest sha256(const Bytes& b) { return sha256(b.data(), b.size()); }

inline Digest hmac_sha256(const uint8_t* key, size_t keylen, const uint8_t* msg,
                          size_t msglen) {
    uint8_t k[64] = {0};
    if (keylen > 64) {
        Digest kd = sha256(key, keylen);
        std::memcpy(k, kd.data(), 32);
    } else {
        std::memcpy(k, key, keylen);
    }
    uint8_t ipad[64], opad[64];
    for (int i = 0; i < 64; i++) {
        ipad[i] = k[i] ^ 0x36;
        opad[i] = k[i] ^ 0x5c;
    }
    Bytes inner;
    inner.insert(inner.end(), ipad, ipad + 64);
    inner.insert(inner.end(), msg, msg + msglen);
    Digest ih = sha256(inner);
    Bytes outer;
    outer.insert(outer.end(), opad, opad + 64);
    outer.insert(outer.end(), ih.begin(), ih.end());
    return sha256(outer);
}
inline Digest hmac_sha256(const Bytes& key, const Bytes& msg) {
    return hmac_sha256(key.data(), key.size(), msg.data(), msg.size());
}

// RFC 5869 style HKDF over HMAC-SHA256
inline Digest hkdf_extract(const Bytes& salt, const Bytes& ikm) {
    return hmac_sha256(salt.data(), salt.size(), ikm.data(), ikm.size());
}

inline Bytes hkdf_expand(const Digest& prk, const Bytes& info, size_t len) {
    Bytes out;
    out.reserve(len);
    Bytes t;
    uint8_t counter = 1;
    while (out.size() < len) {
        Bytes block = t;
        block.insert(block.end(), info.begin(), info.end());
        block.push_back(counter++);
        Digest d = hmac_sha256(prk.data(), prk.size(), block.data(), block.size());
        t.assign(d.begin(), d.end());
        size_t take = std::min(size_t(32), len - out.size());
        out.insert(out.end(), t.begin(), t.begin() + take);
    }
    return out;
}

inline Bytes hkdf(const std::string& salt_label, const Bytes& ikm, const Bytes& info,
                  size_t len) {
    Bytes salt(salt_label.begin(), salt_label.end());
    return hkdf_expand(hkdf_extract(salt, ikm), info, len);
}

}  // namespace fastzip
