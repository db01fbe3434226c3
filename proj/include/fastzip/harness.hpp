#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "activity.hpp"
#include "protocol.hpp"
#include "quantizer.hpp"
#include "signal.hpp"
#include "synthetic.hpp"
#include "util.hpp"

namespace fastzip {

enum class HarnessError { NoData, InsufficientCorpus };

inline const char* harness_error_name(HarnessError e) {
    switch (e) {
        case HarnessError::NoData: return "NoData";
        case HarnessError::InsufficientCorpus: return "InsufficientCorpus";
    }
    return "?";
}

// ---------- per-device pipeline ----------

struct DeviceChannels {
    int car = 0, spot = 0;
    std::array<Series, 4> channels;  // indexed by Modality
};

inline Expected<DeviceChannels, SignalError> process_device(const SyntheticDevice& dev) {
    DeviceChannels out;
    out.car = dev.car;
    out.spot = dev.spot;
    auto acc = resample(dev.accel, modality_rate(Modality::Acv));
    if (!acc.ok()) return acc.error();
    auto split = decompose_acceleration(acc.value());
    if (!split.ok()) return split.error();
    auto gy = resample(dev.gyro, modality_rate(Modality::Gyr));
    if (!gy.ok()) return gy.error();
    auto sky = gyro_sky_axis(gy.value());
    if (!sky.ok()) return sky.error();
    auto ba = resample(dev.baro, modality_rate(Modality::Bar));
    if (!ba.ok()) return ba.error();
    auto alt = barometer_to_altitude(ba.value());
    if (!alt.ok()) return alt.error();

    Series raw[4] = {std::move(split.value().first), std::move(split.value().second),
                     std::move(sky.value()), std::move(alt.value())};
    for (int m = 0; m < 4; m++) {
        auto sm = apply_filter_chain(raw[m], stage1_chain(Modality(m)));
        if (!sm.ok()) return sm.error();
        out.channels[size_t(m)] = std::move(sm.value());
    }
    return out;
}

// ---------- windowed fingerprints ----------

struct WindowPrint {
    double start_time = 0;
    bool accepted = false;  // activity filter verdict for this window
    ActivityMetrics metrics;
    Fingerprint print;  // single-modality fingerprint
};

struct DeviceFingerprints {
    int car = 0, spot = 0;
    std::array<std::vector<WindowPrint>, 4> prints;  // per modality, ascending start
};

// Every scheduled window is fingerprinted; `accepted` records the filter
// verdict so attack code can keep windows a legitimate device would drop.
inline DeviceFingerprints fingerprint_device(const DeviceChannels& ch,
                                             const WindowSchedule& sched,
                                             const ActivityThresholds& thr) {
    DeviceFingerprints out;
    out.car = ch.car;
    out.spot = ch.spot;
    for (int mi = 0; mi < 4; mi++) {
        const Modality m = Modality(mi);
        const Series& s = ch.channels[size_t(mi)];
        const size_t wlen = size_t(modality_window_samples(m));
        const size_t step = size_t(std::lround(sched.step_seconds * s.rate));
        if (step == 0 || s.v.size() < wlen) continue;
        const QuantizerParams qp = default_quantizer_params(m);
        for (size_t begin = 0; begin + wlen <= s.v.size(); begin += step) {
            auto w = extract_window(s, begin);
            if (!w) break;
            WindowPrint wp;
            wp.start_time = w->start_time;
            wp.accepted = passes(*w, thr, &wp.metrics);
            auto filtered = apply_filter_chain(*w, stage2_chain(m));
            wp.print = fingerprint_window(filtered.ok() ? filtered.value() : *w, qp);
            out.prints[size_t(mi)].push_back(std::move(wp));
        }
    }
    return out;
}

namespace detail {

inline int64_t epoch_key(double t) { return llround(t * 1000.0); }

using EpochIndex = std::array<std::map<int64_t, const WindowPrint*>, 4>;

inline EpochIndex index_windows(const DeviceFingerprints& d, bool accepted_only) {
    EpochIndex idx;
    for (int m = 0; m < 4; m++)
        for (const auto& wp : d.prints[size_t(m)])
            if (!accepted_only || wp.accepted) idx[size_t(m)][epoch_key(wp.start_time)] = &wp;
    return idx;
}

inline bool ratio_ge(const Ratio& a, const Ratio& b) {
    return (long long)a.num * b.den >= (long long)b.num * a.den;
}

// Window (accepted when gated) whose start time is closest to `target`.
inline const WindowPrint* closest_window(const std::vector<WindowPrint>& prints, double target,
                                         bool accepted_only) {
    const WindowPrint* best = nullptr;
    double best_d = 0;
    for (const auto& wp : prints) {
        if (accepted_only && !wp.accepted) continue;
        double d = std::fabs(wp.start_time - target);
        if (!best || d < best_d) {
            best = &wp;
            best_d = d;
        }
    }
    return best;
}

}  // namespace detail

// ---------- TAR / FAR ----------

struct TrialParams {
    std::vector<Modality> sensors = {Modality::Acv, Modality::Ach, Modality::Gyr, Modality::Bar};
    std::optional<Ratio> threshold_override;  // default: fused threshold of the sensor set
    bool collect_trials = false;
};

struct PairingTrialResult {
    int car_a = 0, spot_a = 0, car_b = 0, spot_b = 0;
    bool colocated = false;
    double start_time = 0;
    Ratio similarity{0, 1};
    bool accepted = false;
};

struct TarFarReport {
    long long colocated_trials = 0, colocated_accepts = 0;
    long long cross_trials = 0, cross_accepts = 0;
    double tar = 0, far = 0;
    std::vector<PairingTrialResult> trials;  // filled when collect_trials
};

namespace detail {

// Fused fingerprint of one device at one epoch; null when any sensor lacks an
// accepted window there.
inline std::optional<Fingerprint> fused_at(const EpochIndex& idx,
                                           const std::vector<Modality>& sensors, int64_t key) {
    std::vector<Fingerprint> parts;
    parts.reserve(sensors.size());
    for (Modality m : sensors) {
        auto it = idx[size_t(m)].find(key);
        if (it == idx[size_t(m)].end()) return std::nullopt;
        parts.push_back(it->second->print);
    }
    auto fused = fuse(parts);
    if (!fused.ok()) return std::nullopt;
    return fused.value();
}

inline std::vector<Modality> canonical_sensors(std::vector<Modality> sensors) {
    std::sort(sensors.begin(), sensors.end(),
              [](Modality a, Modality b) { return int(a) < int(b); });
    sensors.erase(std::unique(sensors.begin(), sensors.end()), sensors.end());
    return sensors;
}

}  // namespace detail

inline Expected<TarFarReport, HarnessError> compute_tar_far(
    const std::vector<DeviceFingerprints>& devices, const TrialParams& params) {
    const auto sensors = detail::canonical_sensors(params.sensors);
    if (sensors.empty() || devices.size() < 2) return HarnessError::NoData;
    std::vector<detail::EpochIndex> idx;
    idx.reserve(devices.size());
    for (const auto& d : devices) idx.push_back(detail::index_windows(d, true));

    TarFarReport rep;
    for (size_t i = 0; i < devices.size(); i++) {
        for (size_t j = i + 1; j < devices.size(); j++) {
            const bool colocated = devices[i].car == devices[j].car;
            const auto& lead = idx[i][size_t(sensors[0])];
            for (const auto& [key, wp] : lead) {
                auto fa = detail::fused_at(idx[i], sensors, key);
                if (!fa) continue;
                auto fb = detail::fused_at(idx[j], sensors, key);
                if (!fb) continue;
                auto sim = hamming_similarity(*fa, *fb);
                if (!sim.ok()) continue;
                const Ratio thr = params.threshold_override.value_or(fa->fused_threshold);
                const bool accept = detail::ratio_ge(sim.value(), thr);
                if (colocated) {
                    rep.colocated_trials++;
                    rep.colocated_accepts += accept;
                } else {
                    rep.cross_trials++;
                    rep.cross_accepts += accept;
                }
                if (params.collect_trials)
                    rep.trials.push_back({devices[i].car, devices[i].spot, devices[j].car,
                                          devices[j].spot, colocated, wp->start_time, sim.value(),
                                          accept});
            }
        }
    }
    if (rep.colocated_trials + rep.cross_trials == 0) return HarnessError::NoData;
    rep.tar = rep.colocated_trials ? double(rep.colocated_accepts) / double(rep.colocated_trials) : 0.0;
    rep.far = rep.cross_trials ? double(rep.cross_accepts) / double(rep.cross_trials) : 0.0;
    return rep;
}

// Fused fingerprint per epoch where every chosen sensor has an accepted
// window on this device, in epoch order.
inline std::vector<Fingerprint> device_fused_fingerprints(const DeviceFingerprints& dev,
                                                          const std::vector<Modality>& sensors) {
    const auto set = detail::canonical_sensors(sensors);
    std::vector<Fingerprint> out;
    if (set.empty()) return out;
    auto idx = detail::index_windows(dev, true);
    for (const auto& [key, wp] : idx[size_t(set[0])]) {
        (void)wp;
        auto f = detail::fused_at(idx, set, key);
        if (f) out.push_back(std::move(*f));
    }
    return out;
}

// Epoch-aligned fused fingerprint pairs across a device set, capped per
// relation kind; feeds full-protocol spot checks.
inline std::vector<std::pair<Fingerprint, Fingerprint>> collect_aligned_pairs(
    const std::vector<DeviceFingerprints>& devices, const std::vector<Modality>& sensors,
    size_t max_colocated, size_t max_cross) {
    const auto set = detail::canonical_sensors(sensors);
    std::vector<std::pair<Fingerprint, Fingerprint>> out;
    if (set.empty() || devices.size() < 2) return out;
    std::vector<detail::EpochIndex> idx;
    idx.reserve(devices.size());
    for (const auto& d : devices) idx.push_back(detail::index_windows(d, true));
    size_t n_col = 0, n_cross = 0;
    for (size_t i = 0; i < devices.size(); i++) {
        for (size_t j = i + 1; j < devices.size(); j++) {
            const bool colocated = devices[i].car == devices[j].car;
            size_t& count = colocated ? n_col : n_cross;
            const size_t cap = colocated ? max_colocated : max_cross;
            for (const auto& [key, wp] : idx[i][size_t(set[0])]) {
                (void)wp;
                if (count >= cap) break;
                auto fa = detail::fused_at(idx[i], set, key);
                if (!fa) continue;
                auto fb = detail::fused_at(idx[j], set, key);
                if (!fb) continue;
                out.emplace_back(std::move(*fa), std::move(*fb));
                count++;
            }
        }
    }
    return out;
}

// ---------- attacks ----------

enum class AttackKind { Injection, Replay, SimilarContext };
enum class AttackAlignment { Unsynchronized, RoughTimeline, BestMatchSingleSensor };

inline const char* attack_kind_name(AttackKind k) {
    switch (k) {
        case AttackKind::Injection: return "injection";
        case AttackKind::Replay: return "replay";
        case AttackKind::SimilarContext: return "similar-context";
    }
    return "?";
}

inline std::optional<AttackKind> parse_attack_kind(const std::string& s) {
    if (s == "injection") return AttackKind::Injection;
    if (s == "replay") return AttackKind::Replay;
    if (s == "similar-context" || s == "similar_context") return AttackKind::SimilarContext;
    return std::nullopt;
}

struct AttackSpec {
    AttackKind kind = AttackKind::Injection;
    AttackAlignment alignment = AttackAlignment::Unsynchronized;
    Modality oracle_sensor = Modality::Acv;  // similar-context substituted sensor
    double oracle_tolerance_seconds = 15.0;  // similar-context search radius
    double replay_jitter_seconds = 30.0;     // rough-timeline jitter bound
    uint64_t seed = 1;
};

// The single-sensor guessing oracle is what distinguishes similar-context; the
// plain attacks never get best-match alignment.
inline bool attack_spec_valid(const AttackSpec& s) {
    if (s.alignment == AttackAlignment::BestMatchSingleSensor)
        return s.kind == AttackKind::SimilarContext;
    return true;
}

struct AttackReport {
    long long trials = 0, accepts = 0;
    double far = 0;
};

// Adversary tries to pair with each victim device at every epoch the victim
// would engage (all chosen sensors accepted). Injection presents noise-profile
// windows regardless of filter verdicts; replay presents the source's accepted
// windows; similar-context additionally swaps one sensor's sub-fingerprint for
// the closest legitimate one from the victim's partner device.
inline Expected<AttackReport, HarnessError> run_attack(
    const AttackSpec& spec, const std::vector<DeviceFingerprints>& victims,
    const std::vector<DeviceFingerprints>& adversaries, const TrialParams& params) {
    if (!attack_spec_valid(spec)) return HarnessError::NoData;
    const auto sensors = detail::canonical_sensors(params.sensors);
    if (sensors.empty() || victims.empty() || adversaries.empty()) return HarnessError::NoData;

    const bool gated_source = spec.kind != AttackKind::Injection;
    Rng rng(spec.seed);
    AttackReport rep;

    std::vector<detail::EpochIndex> vidx;
    vidx.reserve(victims.size());
    for (const auto& v : victims) vidx.push_back(detail::index_windows(v, true));

    for (size_t vi = 0; vi < victims.size(); vi++) {
        // partner: the legitimate device the oracle steals sub-fingerprints from
        const DeviceFingerprints* partner = nullptr;
        if (spec.kind == AttackKind::SimilarContext) {
            for (size_t pj = 0; pj < victims.size(); pj++)
                if (pj != vi && victims[pj].car == victims[vi].car) {
                    partner = &victims[pj];
                    break;
                }
        }
        for (const auto& adv : adversaries) {
            long long epoch_no = 0;
            const auto& lead = vidx[vi][size_t(sensors[0])];
            for (const auto& [key, lead_wp] : lead) {
                auto fv = detail::fused_at(vidx[vi], sensors, key);
                if (!fv) continue;
                const double t = lead_wp->start_time;

                std::vector<Fingerprint> parts;
                bool complete = true;
                for (Modality m : sensors) {
                    const auto& pool = adv.prints[size_t(m)];
                    const WindowPrint* chosen = nullptr;
                    if (spec.kind == AttackKind::SimilarContext && m == spec.oracle_sensor &&
                        partner) {
                        chosen = detail::closest_window(partner->prints[size_t(m)], t, true);
                        if (chosen &&
                            std::fabs(chosen->start_time - t) > spec.oracle_tolerance_seconds)
                            chosen = nullptr;  // outside the oracle's reach: fall back
                    }
                    if (!chosen) {
                        if (spec.alignment == AttackAlignment::RoughTimeline) {
                            double target =
                                t + (2.0 * rng.real() - 1.0) * spec.replay_jitter_seconds;
                            chosen = detail::closest_window(pool, target, gated_source);
                        } else {  // unsynchronized: walk own windows in order
                            std::vector<const WindowPrint*> usable;
                            for (const auto& wp : pool)
                                if (!gated_source || wp.accepted) usable.push_back(&wp);
                            if (!usable.empty())
                                chosen = usable[size_t(epoch_no) % usable.size()];
                        }
                    }
                    if (!chosen) {
                        complete = false;
                        break;
                    }
                    parts.push_back(chosen->print);
                }
                epoch_no++;
                if (!complete) continue;
                auto fa = fuse(parts);
                if (!fa.ok()) continue;
                auto sim = hamming_similarity(fa.value(), *fv);
                if (!sim.ok()) continue;
                const Ratio thr = params.threshold_override.value_or(fv->fused_threshold);
                rep.trials++;
                rep.accepts += detail::ratio_ge(sim.value(), thr);
            }
        }
    }
    rep.far = rep.trials ? double(rep.accepts) / double(rep.trials) : 0.0;
    return rep;
}

// ---------- pairing time over streams ----------

struct InsufficientContext {
    double elapsed = 0;            // stream time walked before running dry
    long long bits_accumulated = 0;
};

// Walks the accepted windows in completion order, summing their bits; returns
// the stream time at which the requirement is met.
inline Expected<double, InsufficientContext> accumulate_pairing_time(
    const DeviceFingerprints& dev, const std::vector<Modality>& sensors_in,
    long long required_bits) {
    if (required_bits <= 0) return 0.0;
    const auto sensors = detail::canonical_sensors(sensors_in);
    struct Event {
        double completion;
        long long bits;
    };
    std::vector<Event> events;
    double stream_end = 0;
    for (Modality m : sensors) {
        const double len = modality_window_seconds(m);
        for (const auto& wp : dev.prints[size_t(m)]) {
            stream_end = std::max(stream_end, wp.start_time + len);
            if (wp.accepted)
                events.push_back({wp.start_time + len, (long long)wp.print.bits.size()});
        }
    }
    std::sort(events.begin(), events.end(),
              [](const Event& a, const Event& b) { return a.completion < b.completion; });
    long long total = 0;
    for (const auto& e : events) {
        total += e.bits;
        if (total >= required_bits) return e.completion;
    }
    return InsufficientContext{stream_end, total};
}

// ---------- entropy analysis ----------

struct EntropyReport {
    size_t corpus_size = 0;
    size_t fingerprint_bits = 0;
    std::map<int, long long> walk_positions;  // final walk position -> count
    std::map<int, double> expected_binomial;  // position -> expected count
    double chi_square = 0;
    int chi_df = 0;
    double chi_p_value = 1.0;
    double markov_p01 = 0, markov_p11 = 0;
    double mcv_min_entropy = 0;     // bits per bit
    double markov_min_entropy = 0;  // bits per bit
};

namespace detail {

// Regularized upper incomplete gamma Q(a, x): series below a+1, otherwise a
// modified Lentz continued fraction.
inline double gamma_q(double a, double x) {
    if (!(a > 0) || !(x >= 0)) return 1.0;
    if (x == 0) return 1.0;
    const double log_pref = -x + a * std::log(x) - std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, del = 1.0 / a, sum = del;
        for (int i = 0; i < 1000; i++) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
        }
        return 1.0 - sum * std::exp(log_pref);
    }
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= 1000; i++) {
        double an = -double(i) * (double(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(log_pref) * h;
}

inline double chi_square_survival(double x, int df) {
    if (df <= 0) return 1.0;
    return std::clamp(gamma_q(double(df) / 2.0, x / 2.0), 0.0, 1.0);
}

inline double binom_pmf(int n, int k) {
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) -
                    double(n) * std::log(2.0));
}

}  // namespace detail

inline Expected<EntropyReport, HarnessError> entropy_analysis(
    const std::vector<std::vector<uint8_t>>& corpus) {
    if (corpus.size() < 100) return HarnessError::InsufficientCorpus;
    const size_t n = corpus[0].size();
    if (n == 0) return HarnessError::InsufficientCorpus;
    for (const auto& fp : corpus)
        if (fp.size() != n) return HarnessError::InsufficientCorpus;

    EntropyReport rep;
    rep.corpus_size = corpus.size();
    rep.fingerprint_bits = n;

    // final walk positions and pooled bit statistics
    std::vector<long long> ones_count(n + 1, 0);  // by number of 1-bits
    long long total_ones = 0;
    long long c00 = 0, c01 = 0, c10 = 0, c11 = 0;
    long long first_ones = 0;
    for (const auto& fp : corpus) {
        int k = 0;
        for (size_t i = 0; i < n; i++) {
            k += fp[i];
            if (i + 1 < n) {
                if (fp[i]) {
                    (fp[i + 1] ? c11 : c10)++;
                } else {
                    (fp[i + 1] ? c01 : c00)++;
                }
            }
        }
        ones_count[size_t(k)]++;
        total_ones += k;
        first_ones += fp[0];
    }
    const long long N = (long long)corpus.size();
    for (int k = 0; k <= int(n); k++) {
        int pos = 2 * k - int(n);
        if (ones_count[size_t(k)]) rep.walk_positions[pos] = ones_count[size_t(k)];
        rep.expected_binomial[pos] = double(N) * detail::binom_pmf(int(n), k);
    }

    // chi-square over number-of-ones bins, tails merged to expected >= 5
    {
        std::vector<std::pair<double, double>> bins;  // (observed, expected)
        double ob = 0, ex = 0;
        for (int k = 0; k <= int(n); k++) {
            ob += double(ones_count[size_t(k)]);
            ex += double(N) * detail::binom_pmf(int(n), k);
            if (ex >= 5.0) {
                bins.push_back({ob, ex});
                ob = ex = 0;
            }
        }
        if (ex > 0 || ob > 0) {
            if (!bins.empty()) {
                bins.back().first += ob;
                bins.back().second += ex;
            } else {
                bins.push_back({ob, ex});
            }
        }
        rep.chi_df = int(bins.size()) - 1;
        rep.chi_square = 0;
        for (auto& [o, e] : bins)
            if (e > 0) rep.chi_square += (o - e) * (o - e) / e;
        rep.chi_p_value = detail::chi_square_survival(rep.chi_square, rep.chi_df);
    }

    rep.markov_p01 = (c00 + c01) ? double(c01) / double(c00 + c01) : 0.0;
    rep.markov_p11 = (c10 + c11) ? double(c11) / double(c10 + c11) : 0.0;

    const double freq1 = double(total_ones) / (double(N) * double(n));
    rep.mcv_min_entropy = -std::log2(std::max(freq1, 1.0 - freq1));

    // most probable length-n path of the fitted 2-state chain
    {
        const double pi1 = double(first_ones) / double(N);
        const double pi0 = 1.0 - pi1;
        double lp0 = std::log2(pi0), lp1 = std::log2(pi1);
        const double l00 = std::log2(1.0 - rep.markov_p01), l01 = std::log2(rep.markov_p01);
        const double l10 = std::log2(1.0 - rep.markov_p11), l11 = std::log2(rep.markov_p11);
        for (size_t i = 1; i < n; i++) {
            double n0 = std::max(lp0 + l00, lp1 + l10);
            double n1 = std::max(lp0 + l01, lp1 + l11);
            lp0 = n0;
            lp1 = n1;
        }
        const double best = std::max(lp0, lp1);
        // + 0.0 turns the negative zero from -log2(1.0) into plain zero
        rep.markov_min_entropy = std::clamp(-best / double(n), 0.0, 1.0) + 0.0;
    }
    rep.mcv_min_entropy = std::clamp(rep.mcv_min_entropy, 0.0, 1.0) + 0.0;
    return rep;
}

inline Expected<EntropyReport, HarnessError> entropy_analysis(
    const std::vector<Fingerprint>& corpus) {
    std::vector<std::vector<uint8_t>> bits;
    bits.reserve(corpus.size());
    for (const auto& f : corpus) bits.push_back(f.bits);
    return entropy_analysis(bits);
}

// ---------- fingerprint corpora ----------

inline std::vector<Fingerprint> read_fingerprint_corpus(std::istream& in) {
    std::vector<Fingerprint> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (auto f = parse_fingerprint(line)) out.push_back(std::move(*f));
    }
    return out;
}

inline void write_fingerprint_corpus(std::ostream& out, const std::vector<Fingerprint>& corpus) {
    for (const auto& f : corpus) out << dump_fingerprint(f) << "\n";
}

// ---------- full-protocol spot checks ----------

struct SpotCheckReport {
    long long trials = 0;
    long long predicate_accepts = 0;
    long long session_accepts = 0;
    long long disagreements = 0;  // predicate and session disagree on a trial
};

// Runs real key agreement for fingerprint pairs and compares the outcome with
// the threshold predicate. The two can differ only inside the error-budget
// rounding band, which this surfaces.
inline SpotCheckReport full_protocol_spot_check(
    const std::vector<std::pair<Fingerprint, Fingerprint>>& pairs, double confirm_timeout,
    uint64_t seed) {
    SpotCheckReport rep;
    uint64_t trial_seed = seed;
    for (const auto& [fa, fb] : pairs) {
        if (fa.bits.size() != fb.bits.size() || fa.bits.empty()) continue;
        ProtocolConfig cfg;
        cfg.n = uint16_t(fa.bits.size());
        cfg.thr = fa.fused_threshold;
        cfg.secret_bits = 128;
        cfg.confirm_timeout = confirm_timeout;
        SimulatedBackend backend_a, backend_b;
        auto rr = loopback_pair(cfg, fa.bits, fb.bits, backend_a, backend_b, trial_seed++);
        auto sim = hamming_similarity(fa, fb);
        if (!sim.ok()) continue;
        const bool predicted = detail::ratio_ge(sim.value(), fa.fused_threshold);
        const bool done = rr.both_done() && rr.keys_match();
        rep.trials++;
        rep.predicate_accepts += predicted;
        rep.session_accepts += done;
        rep.disagreements += predicted != done;
    }
    return rep;
}

}  // namespace fastzip
