#pragma once

#include <cassert>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "signal.hpp"
#include "util.hpp"

namespace fastzip {

enum class QuantizerError { NoSensors, IncompatibleFingerprints };

inline const char* quantizer_error_name(QuantizerError e) {
    switch (e) {
        case QuantizerError::NoSensors: return "NoSensors";
        case QuantizerError::IncompatibleFingerprints: return "IncompatibleFingerprints";
    }
    return "?";
}

inline int modality_bits(Modality m) {
    switch (m) {
        case Modality::Acv: return 24;
        case Modality::Ach: return 24;
        case Modality::Gyr: return 16;
        case Modality::Bar: return 12;
    }
    return 0;
}

// Per-modality similarity floor a legitimate pairing partner must clear.
inline Ratio modality_threshold(Modality m) {
    switch (m) {
        case Modality::Acv: return Ratio(17, 24);
        case Modality::Ach: return Ratio(18, 24);
        case Modality::Gyr: return Ratio(15, 16);
        case Modality::Bar: return Ratio(11, 12);
    }
    return Ratio(0, 1);
}

inline char modality_letter(Modality m) {
    switch (m) {
        case Modality::Acv: return 'V';
        case Modality::Ach: return 'H';
        case Modality::Gyr: return 'G';
        case Modality::Bar: return 'B';
    }
    return '?';
}

enum class DeltaMode { None, SigmaFraction, Absolute };

struct QuantizerParams {
    int bits = 24;
    DeltaMode delta_mode = DeltaMode::None;
    double delta_value = 0.0;
    // Legacy spacing override: when set, sample points use a fixed stride of
    // ceil(N/M) + epsilon instead of spreading evenly across the window.
    std::optional<long> epsilon;
};

inline QuantizerParams default_quantizer_params(Modality m) {
    QuantizerParams p;
    p.bits = modality_bits(m);
    if (m == Modality::Acv || m == Modality::Ach) {
        p.delta_mode = DeltaMode::SigmaFraction;
        p.delta_value = 0.05;
    }
    return p;
}

// Evenly spread sample points: p_i = round((i - 1/2) * N / M) with ties rounded
// down, clamped into [0, N-1]. Integer arithmetic throughout; the i-th point
// (1-based) sits at the center of the i-th of M equal slices of the window.
inline std::vector<size_t> quantization_points(size_t n, int m,
                                               std::optional<long> epsilon = std::nullopt) {
    assert(n >= 1 && m >= 1);
    std::vector<size_t> pts;
    pts.reserve(size_t(m));
    for (int i = 1; i <= m; i++) {
        unsigned long long num, den;
        if (epsilon) {
            unsigned long long stride = (n + size_t(m) - 1) / size_t(m) + (unsigned long long)*epsilon;
            num = (2ull * i - 1) * stride;
            den = 2;
        } else {
            num = (2ull * i - 1) * n;
            den = 2ull * unsigned(m);
        }
        unsigned long long q = num / den, r = num % den;
        if (2 * r > den) q += 1;  // half rounds down
        if (q >= n) q = n - 1;
        pts.push_back(size_t(q));
    }
    return pts;
}

inline double population_sigma(const std::vector<double>& w) {
    if (w.empty()) return 0.0;
    double mean = 0;
    for (double v : w) mean += v;
    mean /= double(w.size());
    double var = 0;
    for (double v : w) var += (v - mean) * (v - mean);
    return std::sqrt(var / double(w.size()));
}

// Median of the window; an even count averages the central pair.
inline double window_median(std::vector<double> w) {
    assert(!w.empty());
    const size_t n = w.size();
    auto mid = w.begin() + n / 2;
    std::nth_element(w.begin(), mid, w.end());
    double hi = *mid;
    if (n % 2 == 1) return hi;
    auto lo_it = w.begin() + (n / 2 - 1);
    std::nth_element(w.begin(), lo_it, mid);
    return (*lo_it + hi) / 2.0;
}

inline double resolve_delta(const std::vector<double>& w, const QuantizerParams& p) {
    switch (p.delta_mode) {
        case DeltaMode::None: return 0.0;
        case DeltaMode::SigmaFraction: return p.delta_value * population_sigma(w);
        case DeltaMode::Absolute: return p.delta_value;
    }
    return 0.0;
}

// One bit per sample point: 1 iff the sample strictly exceeds median + delta.
inline std::vector<uint8_t> quantize(const std::vector<double>& w, const QuantizerParams& p) {
    assert(!w.empty() && p.bits >= 1 && size_t(p.bits) <= w.size());
    const double thr = window_median(w) + resolve_delta(w, p);
    std::vector<uint8_t> bits;
    bits.reserve(size_t(p.bits));
    for (size_t pt : quantization_points(w.size(), p.bits, p.epsilon))
        bits.push_back(w[pt] > thr ? 1 : 0);
    return bits;
}

struct FingerprintSegment {
    Modality modality;
    size_t offset;
    size_t length;
    Ratio threshold;
};

struct Fingerprint {
    double start_time = 0.0;
    std::vector<uint8_t> bits;  // one byte per bit, values 0/1
    std::vector<FingerprintSegment> segments;
    Ratio fused_threshold{0, 1};

    std::string bit_string() const {
        std::string s;
        s.reserve(bits.size());
        for (uint8_t b : bits) s.push_back(b ? '1' : '0');
        return s;
    }
    std::string modality_string() const {
        std::string s;
        for (size_t i = 0; i < segments.size(); i++) {
            if (i) s.push_back('+');
            s.push_back(modality_letter(segments[i].modality));
        }
        return s;
    }
};

inline Fingerprint fingerprint_window(const Series& w, const QuantizerParams& p) {
    Fingerprint f;
    f.start_time = w.start_time;
    f.bits = quantize(w.v, p);
    f.segments.push_back({w.modality, 0, f.bits.size(), modality_threshold(w.modality)});
    f.fused_threshold = modality_threshold(w.modality);
    return f;
}

// Concatenates per-modality fingerprints (canonical order Acv, Ach, Gyr, Bar)
// into one bit string whose threshold is the bit-count-weighted mean of the
// per-modality thresholds, kept as an exact fraction.
inline Expected<Fingerprint, QuantizerError> fuse(const std::vector<Fingerprint>& parts) {
    if (parts.empty()) return QuantizerError::NoSensors;
    Fingerprint out;
    out.start_time = parts[0].start_time;
    long long weighted_num = 0, total_len = 0;
    long long common_den = 1;
    int last_modality = -1;
    for (const auto& part : parts) {
        if (part.segments.size() != 1) return QuantizerError::IncompatibleFingerprints;
        const auto& seg = part.segments[0];
        if (int(seg.modality) <= last_modality) return QuantizerError::IncompatibleFingerprints;
        last_modality = int(seg.modality);
        out.segments.push_back({seg.modality, out.bits.size(), part.bits.size(), seg.threshold});
        out.bits.insert(out.bits.end(), part.bits.begin(), part.bits.end());
        // accumulate sum(len_i * thr_i) over a running common denominator
        long long len = (long long)part.bits.size();
        weighted_num = weighted_num * seg.threshold.den + len * seg.threshold.num * common_den;
        common_den *= seg.threshold.den;
        total_len += len;
    }
    out.fused_threshold = Ratio(weighted_num, common_den * total_len);
    return out;
}

inline bool same_layout(const Fingerprint& a, const Fingerprint& b) {
    if (a.bits.size() != b.bits.size() || a.segments.size() != b.segments.size()) return false;
    for (size_t i = 0; i < a.segments.size(); i++) {
        const auto& sa = a.segments[i];
        const auto& sb = b.segments[i];
        if (sa.modality != sb.modality || sa.offset != sb.offset || sa.length != sb.length)
            return false;
    }
    return true;
}

inline Expected<Ratio, QuantizerError> hamming_similarity(const Fingerprint& a,
                                                          const Fingerprint& b) {
    if (!same_layout(a, b) || a.bits.empty()) return QuantizerError::IncompatibleFingerprints;
    long long match = 0;
    for (size_t i = 0; i < a.bits.size(); i++)
        if (a.bits[i] == b.bits[i]) match++;
    return Ratio(match, (long long)a.bits.size());
}

inline std::string dump_fingerprint(const Fingerprint& f) {
    char head[64];
    std::snprintf(head, sizeof head, "%.3f", f.start_time);
    return std::string(head) + " " + f.modality_string() + " " + f.bit_string();
}

inline std::optional<std::vector<Modality>> parse_modality_set(const std::string& s) {
    std::vector<Modality> out;
    int last = -1;
    size_t i = 0;
    while (i < s.size()) {
        Modality m;
        switch (s[i]) {
            case 'V': m = Modality::Acv; break;
            case 'H': m = Modality::Ach; break;
            case 'G': m = Modality::Gyr; break;
            case 'B': m = Modality::Bar; break;
            default: return std::nullopt;
        }
        if (int(m) <= last) return std::nullopt;
        last = int(m);
        out.push_back(m);
        i++;
        if (i < s.size()) {
            if (s[i] != '+') return std::nullopt;
            i++;
            if (i == s.size()) return std::nullopt;
        }
    }
    if (out.empty()) return std::nullopt;
    return out;
}

// Inverse of dump_fingerprint, assuming default bit widths per modality.
inline std::optional<Fingerprint> parse_fingerprint(const std::string& line) {
    std::istringstream in(line);
    double t;
    std::string mods, bits;
    if (!(in >> t >> mods >> bits)) return std::nullopt;
    auto set = parse_modality_set(mods);
    if (!set) return std::nullopt;
    Fingerprint f;
    f.start_time = t;
    size_t expect = 0;
    for (Modality m : *set) expect += size_t(modality_bits(m));
    if (bits.size() != expect) return std::nullopt;
    for (char c : bits) {
        if (c != '0' && c != '1') return std::nullopt;
        f.bits.push_back(c == '1' ? 1 : 0);
    }
    std::vector<Fingerprint> parts;
    size_t off = 0;
    for (Modality m : *set) {
        Fingerprint part;
        part.start_time = t;
        size_t len = size_t(modality_bits(m));
        part.bits.assign(f.bits.begin() + off, f.bits.begin() + off + len);
        part.segments.push_back({m, 0, len, modality_threshold(m)});
        parts.push_back(std::move(part));
        off += len;
    }
    auto fused = fuse(parts);
    if (!fused.ok()) return std::nullopt;
    fused.value().start_time = t;
    return fused.value();
}

}  // namespace fastzip
