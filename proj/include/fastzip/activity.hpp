#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "signal.hpp"

namespace fastzip {

enum class ActivityError { PowerUndefined, SnrUndefined };

struct ActivityMetrics {
    std::optional<double> avg_power_db;       // absent when undefined (silent window)
    std::optional<double> snr;                // absent when variance is zero
    std::optional<int> prominent_peaks;       // only computed for Acv/Ach
};

struct ActivityThresholds {
    // Per-modality floors, indexed by Modality. Calibrated against the synthetic
    // generator; real deployments should recalibrate on their own recordings.
    // The vertical channel is mean-free by construction (gravity estimation
    // subtracts block means), so its SNR gate is disabled; power and peak
    // counts carry that channel's gating.
    double min_power_db[4] = {-20.0, -20.0, -35.0, -30.0};
    double min_snr[4] = {-1.0, 0.5, 0.01, 0.003};
    int min_peaks = 1;  // strict >, so windows need at least 2 prominent peaks
    double peak_height_ratio = 0.25;
    int peak_min_distance = 50;
};

struct WindowSchedule {
    double step_seconds = 5.0;
};

inline Expected<double, ActivityError> average_power_db(const std::vector<double>& w) {
    if (w.empty()) return ActivityError::PowerUndefined;
    double acc = 0;
    for (double v : w) acc += v * v;
    double ms = acc / double(w.size());
    if (ms <= 0) return ActivityError::PowerUndefined;
    return 10.0 * std::log10(ms);
}

inline Expected<double, ActivityError> snr(const std::vector<double>& w) {
    if (w.size() < 2) return ActivityError::SnrUndefined;
    double mean = 0;
    for (double v : w) mean += v;
    mean /= double(w.size());
    double var = 0;
    for (double v : w) var += (v - mean) * (v - mean);
    var /= double(w.size());
    if (var <= 0) return ActivityError::SnrUndefined;
    return mean / std::sqrt(var);
}

// Strict local maxima at least rho * (global max) high, greedily thinned so no
// two accepted peaks are within min_distance samples. Taller peaks win; equal
// heights resolve to the earlier index.
inline int prominent_peaks(const std::vector<double>& w, double rho, int min_distance) {
    const size_t n = w.size();
    if (n < 3) return 0;
    double gmax = *std::max_element(w.begin(), w.end());
    std::vector<size_t> cand;
    for (size_t i = 1; i + 1 < n; i++)
        if (w[i] > w[i - 1] && w[i] > w[i + 1] && w[i] >= rho * gmax)
            cand.push_back(i);
    std::stable_sort(cand.begin(), cand.end(),
                     [&](size_t a, size_t b) { return w[a] > w[b]; });
    std::vector<size_t> accepted;
    for (size_t i : cand) {
        bool blocked = false;
        for (size_t j : accepted)
            if (std::llabs((long long)i - (long long)j) <= min_distance) { blocked = true; break; }
        if (!blocked) accepted.push_back(i);
    }
    return int(accepted.size());
}

inline ActivityMetrics activity_metrics(const Series& w, const ActivityThresholds& thr) {
    ActivityMetrics m;
    auto p = average_power_db(w.v);
    if (p.ok()) m.avg_power_db = p.value();
    auto s = snr(w.v);
    if (s.ok()) m.snr = s.value();
    if (w.modality == Modality::Acv || w.modality == Modality::Ach)
        m.prominent_peaks = prominent_peaks(w.v, thr.peak_height_ratio, thr.peak_min_distance);
    return m;
}

inline bool passes(const Series& w, const ActivityThresholds& thr,
                   ActivityMetrics* out_metrics = nullptr) {
    ActivityMetrics m = activity_metrics(w, thr);
    if (out_metrics) *out_metrics = m;
    const int mi = int(w.modality);
    if (!m.avg_power_db || !(*m.avg_power_db > thr.min_power_db[mi])) return false;
    if (!m.snr || !(std::abs(*m.snr) > thr.min_snr[mi])) return false;
    if (m.prominent_peaks && !(*m.prominent_peaks > thr.min_peaks)) return false;
    return true;
}

struct AcceptedWindow {
    Series window;
    ActivityMetrics metrics;
};

// Candidate windows start at 0, step, 2*step ... relative to the stream start.
inline std::vector<AcceptedWindow> schedule_windows(const Series& stream,
                                                    const WindowSchedule& sched,
                                                    const ActivityThresholds& thr) {
    std::vector<AcceptedWindow> out;
    const size_t wlen = size_t(modality_window_samples(stream.modality));
    const size_t step = size_t(std::lround(sched.step_seconds * stream.rate));
    if (step == 0 || stream.v.size() < wlen) return out;
    for (size_t begin = 0; begin + wlen <= stream.v.size(); begin += step) {
        auto w = extract_window(stream, begin);
        if (!w) break;
        ActivityMetrics m;
        if (passes(*w, thr, &m)) out.push_back({std::move(*w), m});
    }
    return out;
}

}  // namespace fastzip
