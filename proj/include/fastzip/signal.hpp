#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "util.hpp"

namespace fastzip {

enum class RawModality { Accelerometer3d, Gyroscope3d, Barometer };
enum class Modality { Acv, Ach, Gyr, Bar };

inline const char* modality_name(Modality m) {
    switch (m) {
        case Modality::Acv: return "Acv";
        case Modality::Ach: return "Ach";
        case Modality::Gyr: return "Gyr";
        case Modality::Bar: return "Bar";
    }
    return "?";
}

inline double modality_rate(Modality m) { return m == Modality::Bar ? 10.0 : 100.0; }
inline double modality_window_seconds(Modality m) { return m == Modality::Bar ? 20.0 : 10.0; }
inline int modality_window_samples(Modality m) {
    return int(modality_rate(m) * modality_window_seconds(m));  // 1000 or 200
}

struct RawRecording {
    RawModality modality = RawModality::Accelerometer3d;
    double nominal_rate = 0;
    std::vector<double> t;
    std::vector<double> x, y, z;  // barometer uses x only

    size_t size() const { return t.size(); }
    int channels() const { return modality == RawModality::Barometer ? 1 : 3; }
};

// Uniform-rate scalar stream; a window is a fixed-length slice of one.
struct Series {
    Modality modality = Modality::Acv;
    double rate = 0;
    double start_time = 0;
    std::vector<double> v;
};

enum class SignalError {
    EmptyRecording,
    GravityEstimateDegenerate,
    InvalidPressure,
    WindowTooShort,
};

inline const char* signal_error_name(SignalError e) {
    switch (e) {
        case SignalError::EmptyRecording: return "EmptyRecording";
        case SignalError::GravityEstimateDegenerate: return "GravityEstimateDegenerate";
        case SignalError::InvalidPressure: return "InvalidPressure";
        case SignalError::WindowTooShort: return "WindowTooShort";
    }
    return "?";
}

// ---------- resampling ----------

inline Expected<RawRecording, SignalError> resample(const RawRecording& rec,
                                                    double target_rate) {
    if (rec.size() < 2) return SignalError::EmptyRecording;
    RawRecording out;
    out.modality = rec.modality;
    out.nominal_rate = target_rate;
    const double t0 = rec.t.front();
    const double span = rec.t.back() - t0;
    const long steps = long(std::floor(span * target_rate + 1e-9));
    const int nch = rec.channels();
    const std::vector<double>* chans[3] = {&rec.x, &rec.y, &rec.z};
    std::vector<double>* ochans[3] = {&out.x, &out.y, &out.z};
    out.t.resize(steps + 1);
    for (int c = 0; c < nch; c++) ochans[c]->resize(steps + 1);
    size_t hi = 1;
    for (long k = 0; k <= steps; k++) {
        double tk = t0 + double(k) / target_rate;
        while (hi + 1 < rec.t.size() && rec.t[hi] < tk) hi++;
        size_t lo = hi - 1;
        double den = rec.t[hi] - rec.t[lo];
        double w = den > 0 ? (tk - rec.t[lo]) / den : 0.0;
        w = std::clamp(w, 0.0, 1.0);
        out.t[k] = tk;
        for (int c = 0; c < nch; c++)
            (*ochans[c])[k] = (*chans[c])[lo] * (1 - w) + (*chans[c])[hi] * w;
    }
    return out;
}

// ---------- channel extraction ----------

// Gravity is estimated per non-overlapping 5 s window as the per-axis mean;
// the trailing partial window reuses the last full window's estimate.
inline Expected<std::pair<Series, Series>, SignalError> decompose_acceleration(
    const RawRecording& rec) {
    if (rec.modality != RawModality::Accelerometer3d || rec.size() < 2)
        return SignalError::EmptyRecording;
    const size_t n = rec.size();
    const size_t wlen = size_t(std::lround(rec.nominal_rate * 5.0));
    if (wlen == 0 || n < wlen) return SignalError::EmptyRecording;

    Series acv, ach;
    acv.modality = Modality::Acv;
    ach.modality = Modality::Ach;
    acv.rate = ach.rate = rec.nominal_rate;
    acv.start_time = ach.start_time = rec.t.front();
    acv.v.resize(n);
    ach.v.resize(n);

    double g[3] = {0, 0, 0};
    bool have_g = false;
    for (size_t w0 = 0; w0 < n; w0 += wlen) {
        size_t w1 = std::min(w0 + wlen, n);
        if (w1 - w0 == wlen) {
            double s[3] = {0, 0, 0};
            for (size_t i = w0; i < w1; i++) {
                s[0] += rec.x[i];
                s[1] += rec.y[i];
                s[2] += rec.z[i];
            }
            for (int c = 0; c < 3; c++) g[c] = s[c] / double(wlen);
            have_g = true;
            double norm = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
            if (norm < 1.0) return SignalError::GravityEstimateDegenerate;
        } else if (!have_g) {
            return SignalError::EmptyRecording;
        }
        double norm = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
        double gh[3] = {g[0] / norm, g[1] / norm, g[2] / norm};
        for (size_t i = w0; i < w1; i++) {
            double d[3] = {rec.x[i] - g[0], rec.y[i] - g[1], rec.z[i] - g[2]};
            double vert = d[0] * gh[0] + d[1] * gh[1] + d[2] * gh[2];
            double r[3] = {d[0] - vert * gh[0], d[1] - vert * gh[1], d[2] - vert * gh[2]};
            acv.v[i] = vert;
            ach.v[i] = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
        }
    }
    return std::make_pair(std::move(acv), std::move(ach));
}

inline Expected<Series, SignalError> gyro_sky_axis(const RawRecording& rec) {
    if (rec.modality != RawModality::Gyroscope3d || rec.size() == 0)
        return SignalError::EmptyRecording;
    Series out;
    out.modality = Modality::Gyr;
    out.rate = rec.nominal_rate;
    out.start_time = rec.t.front();
    out.v = rec.z;
    return out;
}

inline Expected<double, SignalError> pressure_to_altitude(double hpa) {
    if (hpa <= 0) return SignalError::InvalidPressure;
    return 44330.0 * (1.0 - std::pow(hpa / 1013.25, 1.0 / 5.255));
}

inline Expected<Series, SignalError> barometer_to_altitude(const RawRecording& rec) {
    if (rec.modality != RawModality::Barometer || rec.size() == 0)
        return SignalError::EmptyRecording;
    Series out;
    out.modality = Modality::Bar;
    out.rate = rec.nominal_rate;
    out.start_time = rec.t.front();
    out.v.resize(rec.size());
    for (size_t i = 0; i < rec.size(); i++) {
        auto h = pressure_to_altitude(rec.x[i]);
        if (!h.ok()) return h.error();
        out.v[i] = h.value();
    }
    return out;
}

// ---------- filtering ----------

struct FilterChainConfig {
    int sg_window = 3;
    int sg_degree = 2;
    double gaussian_sigma = 1.4;
    std::optional<double> ewma_alpha;
    bool mean_subtract = false;
    bool mean_subtract_pre = false;  // run mean subtraction before the filters
};

namespace detail {

inline size_t mirror_index(long i, size_t n) {
    long m = long(n);
    while (i < 0 || i >= m) {
        if (i < 0) i = -i;
        if (i >= m) i = 2 * (m - 1) - i;
    }
    return size_t(i);
}

inline std::vector<double> convolve_mirror(const std::vector<double>& x,
                                           const std::vector<double>& w) {
    const long r = long(w.size() - 1) / 2;
    const size_t n = x.size();
    std::vector<double> out(n);
    for (size_t i = 0; i < n; i++) {
        double acc = 0;
        for (long k = -r; k <= r; k++)
            acc += w[size_t(k + r)] * x[mirror_index(long(i) + k, n)];
        out[i] = acc;
    }
    return out;
}

// Least-squares polynomial smoothing weights for the window center: the center
// row of the projection matrix A (A^T A)^{-1} A^T over offsets -h..h.
inline std::vector<double> sg_center_weights(int window, int degree) {
    const int h = window / 2;
    const int k = degree + 1;
    std::vector<std::vector<double>> a(window, std::vector<double>(k));
    for (int i = 0; i < window; i++) {
        double xp = 1;
        for (int j = 0; j < k; j++) {
            a[i][j] = xp;
            xp *= double(i - h);
        }
    }
    std::vector<std::vector<double>> m(k, std::vector<double>(2 * k, 0.0));
    for (int r = 0; r < k; r++) {
        for (int c = 0; c < k; c++)
            for (int i = 0; i < window; i++) m[r][c] += a[i][r] * a[i][c];
        m[r][k + r] = 1;
    }
    for (int col = 0; col < k; col++) {
        int piv = col;
        for (int r = col + 1; r < k; r++)
            if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
        std::swap(m[col], m[piv]);
        double pv = m[col][col];
        for (int c = 0; c < 2 * k; c++) m[col][c] /= pv;
        for (int r = 0; r < k; r++) {
            if (r == col) continue;
            double f = m[r][col];
            if (f == 0) continue;
            for (int c = 0; c < 2 * k; c++) m[r][c] -= f * m[col][c];
        }
    }
    std::vector<double> w(window, 0.0);
    for (int i = 0; i < window; i++)
        for (int j = 0; j < k; j++) w[i] += m[0][k + j] * a[i][j];
    return w;
}

inline std::vector<double> gaussian_kernel(double sigma) {
    const long r = long(std::floor(4.0 * sigma));
    std::vector<double> w(2 * r + 1);
    double sum = 0;
    for (long j = -r; j <= r; j++) {
        w[size_t(j + r)] = std::exp(-double(j * j) / (2.0 * sigma * sigma));
        sum += w[size_t(j + r)];
    }
    for (auto& c : w) c /= sum;
    return w;
}

}  // namespace detail

inline Expected<std::vector<double>, SignalError> apply_filter_chain(
    const std::vector<double>& input, const FilterChainConfig& cfg) {
    if (long(input.size()) < cfg.sg_window || input.empty())
        return SignalError::WindowTooShort;
    std::vector<double> cur = input;
    auto subtract_mean = [&cur]() {
        double mean = 0;
        for (double v : cur) mean += v;
        mean /= double(cur.size());
        for (auto& v : cur) v -= mean;
    };
    if (cfg.mean_subtract && cfg.mean_subtract_pre) subtract_mean();
    cur = detail::convolve_mirror(cur, detail::sg_center_weights(cfg.sg_window, cfg.sg_degree));
    cur = detail::convolve_mirror(cur, detail::gaussian_kernel(cfg.gaussian_sigma));
    if (cfg.ewma_alpha) {
        double a = *cfg.ewma_alpha;
        for (size_t i = 1; i < cur.size(); i++)
            cur[i] = a * cur[i] + (1 - a) * cur[i - 1];
    }
    if (cfg.mean_subtract && !cfg.mean_subtract_pre) subtract_mean();
    return cur;
}

inline Expected<Series, SignalError> apply_filter_chain(const Series& s,
                                                        const FilterChainConfig& cfg) {
    auto r = apply_filter_chain(s.v, cfg);
    if (!r.ok()) return r.error();
    Series out = s;
    out.v = std::move(r.value());
    return out;
}

// Whole-stream pass: altitude gets its mean removed before smoothing.
inline FilterChainConfig stage1_chain(Modality m) {
    FilterChainConfig cfg;
    cfg.sg_window = 3;  // fits 3 points with a quadratic: identity, kept as configured
    cfg.sg_degree = 2;
    cfg.gaussian_sigma = 1.4;
    if (m == Modality::Bar) {
        cfg.mean_subtract = true;
        cfg.mean_subtract_pre = true;
    }
    return cfg;
}

// Per-window pass ahead of quantization.
inline FilterChainConfig stage2_chain(Modality m) {
    FilterChainConfig cfg;
    cfg.sg_window = 5;
    cfg.sg_degree = 3;
    cfg.gaussian_sigma = 1.4;
    if (m == Modality::Acv) cfg.ewma_alpha = 0.16;
    if (m == Modality::Ach) cfg.ewma_alpha = 0.2;
    return cfg;
}

// Slice a full-length window starting at sample index `begin`.
inline std::optional<Series> extract_window(const Series& s, size_t begin) {
    const size_t len = size_t(modality_window_samples(s.modality));
    if (begin + len > s.v.size()) return std::nullopt;
    Series out;
    out.modality = s.modality;
    out.rate = s.rate;
    out.start_time = s.start_time + double(begin) / s.rate;
    out.v.assign(s.v.begin() + begin, s.v.begin() + begin + len);
    return out;
}

}  // namespace fastzip
