#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "io.hpp"
#include "signal.hpp"
#include "util.hpp"

namespace fastzip {

enum class Scenario { City, Country, Highway, Parking };

inline const char* scenario_name(Scenario s) {
    switch (s) {
        case Scenario::City: return "city";
        case Scenario::Country: return "country";
        case Scenario::Highway: return "highway";
        case Scenario::Parking: return "parking";
    }
    return "?";
}

inline std::optional<Scenario> parse_scenario(const std::string& s) {
    if (s == "city") return Scenario::City;
    if (s == "country") return Scenario::Country;
    if (s == "highway") return Scenario::Highway;
    if (s == "parking") return Scenario::Parking;
    return std::nullopt;
}

// Event rates and amplitudes are artifact constants tuned per scenario; the
// config text below is the authoritative record of the values in effect.
struct GeneratorConfig {
    Scenario scenario = Scenario::City;
    // shared latent event processes (per car)
    double bump_rate = 0.50;         // road impacts per second (vertical)
    double ramp_rate = 0.10;         // sustained speed changes per second
    double micro_accel_rate = 0.55;  // short speed corrections per second
    double turn_rate = 0.12;         // steering events per second
    double road_texture = 0.07;      // shared roughness amplitude (vertical)
    double yaw_jitter = 0.015;       // shared steering jitter amplitude
    double altitude_amplitude = 5.0; // slow altitude drift scale, meters
    // per-device imperfection
    double accel_noise = 0.02;       // sensor noise sigma, m/s^2
    double gyro_noise = 0.004;       // sensor noise sigma, rad/s
    double baro_noise = 0.004;       // sensor noise sigma, hPa
    std::vector<double> attenuation; // per mounting spot; 1.0 when not listed

    double attenuation_for(int spot) const {
        if (spot >= 0 && size_t(spot) < attenuation.size()) return attenuation[size_t(spot)];
        return 1.0;
    }
};

inline GeneratorConfig scenario_defaults(Scenario s) {
    GeneratorConfig c;
    c.scenario = s;
    switch (s) {
        case Scenario::City:
            break;  // struct defaults are the city profile
        case Scenario::Country:
            c.bump_rate = 0.40;
            c.ramp_rate = 0.05;
            c.micro_accel_rate = 0.40;
            c.turn_rate = 0.06;
            c.altitude_amplitude = 9.0;
            break;
        case Scenario::Highway:
            c.bump_rate = 0.60;
            c.ramp_rate = 0.03;
            c.micro_accel_rate = 0.45;
            c.turn_rate = 0.02;
            c.yaw_jitter = 0.012;
            c.altitude_amplitude = 7.0;
            break;
        case Scenario::Parking:
            c.bump_rate = 0.30;
            c.ramp_rate = 0.12;
            c.micro_accel_rate = 0.60;
            c.turn_rate = 0.30;
            c.yaw_jitter = 0.025;
            c.altitude_amplitude = 1.5;
            break;
    }
    return c;
}

inline std::string generator_config_text(const GeneratorConfig& c) {
    std::string out;
    char buf[96];
    auto kv = [&](const char* k, double v) {
        std::snprintf(buf, sizeof buf, "%s = %g\n", k, v);
        out += buf;
    };
    out += "scenario = ";
    out += scenario_name(c.scenario);
    out += "\n";
    kv("bump_rate", c.bump_rate);
    kv("ramp_rate", c.ramp_rate);
    kv("micro_accel_rate", c.micro_accel_rate);
    kv("turn_rate", c.turn_rate);
    kv("road_texture", c.road_texture);
    kv("yaw_jitter", c.yaw_jitter);
    kv("altitude_amplitude", c.altitude_amplitude);
    kv("accel_noise", c.accel_noise);
    kv("gyro_noise", c.gyro_noise);
    kv("baro_noise", c.baro_noise);
    if (!c.attenuation.empty()) {
        out += "attenuation = ";
        for (size_t i = 0; i < c.attenuation.size(); i++) {
            std::snprintf(buf, sizeof buf, "%s%g", i ? "," : "", c.attenuation[i]);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

inline GeneratorConfig generator_config_from_map(const ConfigMap& m) {
    Scenario sc = Scenario::City;
    if (auto s = parse_scenario(config_string(m, "scenario", "city"))) sc = *s;
    GeneratorConfig c = scenario_defaults(sc);
    c.bump_rate = config_double(m, "bump_rate", c.bump_rate);
    c.ramp_rate = config_double(m, "ramp_rate", c.ramp_rate);
    c.micro_accel_rate = config_double(m, "micro_accel_rate", c.micro_accel_rate);
    c.turn_rate = config_double(m, "turn_rate", c.turn_rate);
    c.road_texture = config_double(m, "road_texture", c.road_texture);
    c.yaw_jitter = config_double(m, "yaw_jitter", c.yaw_jitter);
    c.altitude_amplitude = config_double(m, "altitude_amplitude", c.altitude_amplitude);
    c.accel_noise = config_double(m, "accel_noise", c.accel_noise);
    c.gyro_noise = config_double(m, "gyro_noise", c.gyro_noise);
    c.baro_noise = config_double(m, "baro_noise", c.baro_noise);
    c.attenuation = config_double_list(m, "attenuation", c.attenuation);
    return c;
}

inline double pressure_from_altitude(double meters) {
    return 1013.25 * std::pow(1.0 - meters / 44330.0, 5.255);
}

namespace detail {

// One car's shared context: every device in the car sees these processes.
struct CarLatent {
    std::vector<double> acv;          // vertical dynamics, 100 Hz
    std::vector<double> ach_x, ach_y; // horizontal dynamics, 100 Hz
    std::vector<double> gyr;          // sky-axis rotation, 100 Hz
    std::vector<double> alt;          // altitude above the stream datum, 10 Hz
};

inline double expo_step(Rng& rng, double rate) {
    double u = rng.real();
    double dt = -std::log(1.0 - u) / rate;
    return dt > 1e-9 ? dt : 1e-9;
}

// Smoothed unit-variance noise scaled to `amp`, one-pole with mixing `alpha`.
inline std::vector<double> shared_texture(size_t n, double amp, double alpha, Rng& rng) {
    std::vector<double> v(n, 0.0);
    if (amp <= 0) {
        for (size_t i = 0; i < n; i++) rng.normal();  // keep the draw count stable
        return v;
    }
    const double scale = amp / std::sqrt(alpha / (2.0 - alpha));
    double s = 0;
    for (size_t i = 0; i < n; i++) {
        s = alpha * rng.normal() + (1.0 - alpha) * s;
        v[i] = s * scale;
    }
    return v;
}

inline void add_gaussian_pulse(std::vector<double>& v, double rate, double t0, double sigma,
                               double amp) {
    long lo = std::lround((t0 - 4 * sigma) * rate), hi = std::lround((t0 + 4 * sigma) * rate);
    lo = std::max(lo, 0L);
    hi = std::min(hi, long(v.size()) - 1);
    for (long i = lo; i <= hi; i++) {
        double d = (double(i) / rate - t0) / sigma;
        v[size_t(i)] += amp * std::exp(-0.5 * d * d);
    }
}

// Impact with rebound: positive center lobe, shallow negative side lobes.
inline void add_impact(std::vector<double>& v, double rate, double t0, double sigma, double amp) {
    long lo = std::lround((t0 - 4 * sigma) * rate), hi = std::lround((t0 + 4 * sigma) * rate);
    lo = std::max(lo, 0L);
    hi = std::min(hi, long(v.size()) - 1);
    for (long i = lo; i <= hi; i++) {
        double d = (double(i) / rate - t0) / sigma;
        v[size_t(i)] += amp * (1.0 - d * d) * std::exp(-0.5 * d * d);
    }
}

inline void add_trapezoid(std::vector<double>& v, double rate, double t0, double rise, double hold,
                          double fall, double amp) {
    long lo = std::max(std::lround(t0 * rate), 0L);
    long hi = std::min(std::lround((t0 + rise + hold + fall) * rate), long(v.size()) - 1);
    for (long i = lo; i <= hi; i++) {
        double dt = double(i) / rate - t0;
        double w;
        if (dt < rise)
            w = dt / rise;
        else if (dt < rise + hold)
            w = 1.0;
        else
            w = 1.0 - (dt - rise - hold) / fall;
        v[size_t(i)] += amp * std::max(w, 0.0);
    }
}

inline CarLatent build_car_latent(const GeneratorConfig& cfg, double duration, Rng rng) {
    const size_t n100 = size_t(std::lround(duration * 100.0)) + 1;
    const size_t n10 = size_t(std::lround(duration * 10.0)) + 1;
    CarLatent lat;
    lat.acv.assign(n100, 0.0);
    lat.ach_x.assign(n100, 0.0);
    lat.ach_y.assign(n100, 0.0);
    lat.gyr.assign(n100, 0.0);
    lat.alt.assign(n10, 0.0);

    // road impacts (vertical)
    for (double t = expo_step(rng, cfg.bump_rate); t < duration; t += expo_step(rng, cfg.bump_rate)) {
        double amp = 0.9 + 1.5 * rng.real();
        double sigma = 0.04 + 0.08 * rng.real();
        add_impact(lat.acv, 100.0, t, sigma, amp);
    }
    // sustained speed changes (longitudinal)
    for (double t = expo_step(rng, cfg.ramp_rate); t < duration; t += expo_step(rng, cfg.ramp_rate)) {
        double amp = (rng.u64() & 1 ? 1.0 : -1.0) * (0.8 + 1.0 * rng.real());
        add_trapezoid(lat.ach_x, 100.0, t, 1.0 + rng.real(), 1.5 + 2.5 * rng.real(),
                      1.0 + rng.real(), amp);
    }
    // short speed corrections (longitudinal)
    for (double t = expo_step(rng, cfg.micro_accel_rate); t < duration;
         t += expo_step(rng, cfg.micro_accel_rate)) {
        double amp = (rng.u64() & 1 ? 1.0 : -1.0) * (0.2 + 0.5 * rng.real());
        add_gaussian_pulse(lat.ach_x, 100.0, t, 0.25 + 0.35 * rng.real(), amp);
    }
    // steering events: sky-axis rotation plus the lateral force they imply
    for (double t = expo_step(rng, cfg.turn_rate); t < duration; t += expo_step(rng, cfg.turn_rate)) {
        double amp = (rng.u64() & 1 ? 1.0 : -1.0) * (0.25 + 0.45 * rng.real());
        double sigma = 0.5 + 0.6 * rng.real();
        add_gaussian_pulse(lat.gyr, 100.0, t, sigma, amp);
        add_gaussian_pulse(lat.ach_y, 100.0, t, sigma, 2.2 * amp);
    }
    // shared roughness and steering jitter
    {
        auto tex = shared_texture(n100, cfg.road_texture, 0.3, rng);
        for (size_t i = 0; i < n100; i++) lat.acv[i] += tex[i];
        auto tx = shared_texture(n100, 0.4 * cfg.road_texture, 0.3, rng);
        for (size_t i = 0; i < n100; i++) lat.ach_x[i] += tx[i];
        auto ty = shared_texture(n100, 0.3 * cfg.road_texture, 0.3, rng);
        for (size_t i = 0; i < n100; i++) lat.ach_y[i] += ty[i];
        auto tg = shared_texture(n100, cfg.yaw_jitter, 0.3, rng);
        for (size_t i = 0; i < n100; i++) lat.gyr[i] += tg[i];
    }
    // slow altitude drift: a few incommensurate waves, slight fast component
    {
        const int waves = 5;
        double weight_sum = 0;
        double periods[waves], weights[waves], phases[waves];
        for (int j = 0; j < waves; j++) {
            periods[j] = 18.0 * std::pow(160.0 / 18.0, double(j) / (waves - 1));
            weights[j] = std::sqrt(periods[j]);
            weight_sum += weights[j];
            phases[j] = 2.0 * M_PI * rng.real();
        }
        double fast_period = 8.0 + 8.0 * rng.real();
        double fast_phase = 2.0 * M_PI * rng.real();
        for (size_t i = 0; i < n10; i++) {
            double t = double(i) / 10.0, h = 0;
            for (int j = 0; j < waves; j++)
                h += cfg.altitude_amplitude * (weights[j] / weight_sum) *
                     std::sin(2.0 * M_PI * t / periods[j] + phases[j]);
            h += 0.3 * cfg.altitude_amplitude * std::sin(2.0 * M_PI * t / fast_period + fast_phase);
            lat.alt[i] = h;
        }
    }
    return lat;
}

}  // namespace detail

struct SyntheticDevice {
    int car = 1;   // 1-based
    int spot = 0;  // mounting spot within the car, 0-based
    RawRecording accel;  // 3-axis, gravity on z
    RawRecording gyro;   // 3-axis, sky axis on z
    RawRecording baro;   // pressure in hPa
};

struct SyntheticContext {
    GeneratorConfig config;
    double duration = 0;
    std::vector<SyntheticDevice> devices;  // car 1 devices first, then car 2
};

// Two cars driving the same kind of route but independently: devices within a
// car observe one shared event process per channel plus their own sensor
// noise; the cars' processes are unrelated. Deterministic in all arguments.
inline SyntheticContext generate_synthetic_context(uint64_t seed, Scenario scenario,
                                                   int n_devices_car1, int n_devices_car2,
                                                   double duration,
                                                   const GeneratorConfig* overrides = nullptr) {
    assert(duration >= 60.0);
    assert(n_devices_car1 >= 0 && n_devices_car2 >= 0);
    GeneratorConfig cfg = overrides ? *overrides : scenario_defaults(scenario);
    cfg.scenario = scenario;

    Rng root(seed);
    detail::CarLatent lat[2] = {detail::build_car_latent(cfg, duration, root.fork(1)),
                                detail::build_car_latent(cfg, duration, root.fork(2))};

    SyntheticContext ctx;
    ctx.config = cfg;
    ctx.duration = duration;
    const size_t n100 = lat[0].acv.size(), n10 = lat[0].alt.size();

    const int counts[2] = {n_devices_car1, n_devices_car2};
    for (int car = 0; car < 2; car++) {
        for (int spot = 0; spot < counts[car]; spot++) {
            Rng dev = root.fork(1000 + uint64_t(car) * 100 + uint64_t(spot));
            const double att = cfg.attenuation_for(spot);
            SyntheticDevice d;
            d.car = car + 1;
            d.spot = spot;

            d.accel.modality = RawModality::Accelerometer3d;
            d.accel.nominal_rate = 100.0;
            d.accel.t.resize(n100);
            d.accel.x.resize(n100);
            d.accel.y.resize(n100);
            d.accel.z.resize(n100);
            for (size_t i = 0; i < n100; i++) {
                d.accel.t[i] = double(i) / 100.0;
                d.accel.x[i] = att * lat[car].ach_x[i] + cfg.accel_noise * dev.normal();
                d.accel.y[i] = att * lat[car].ach_y[i] + cfg.accel_noise * dev.normal();
                d.accel.z[i] = 9.81 + att * lat[car].acv[i] + cfg.accel_noise * dev.normal();
            }

            d.gyro.modality = RawModality::Gyroscope3d;
            d.gyro.nominal_rate = 100.0;
            d.gyro.t.resize(n100);
            d.gyro.x.resize(n100);
            d.gyro.y.resize(n100);
            d.gyro.z.resize(n100);
            for (size_t i = 0; i < n100; i++) {
                d.gyro.t[i] = double(i) / 100.0;
                d.gyro.x[i] = cfg.gyro_noise * dev.normal();
                d.gyro.y[i] = cfg.gyro_noise * dev.normal();
                d.gyro.z[i] = att * lat[car].gyr[i] + cfg.gyro_noise * dev.normal();
            }

            d.baro.modality = RawModality::Barometer;
            d.baro.nominal_rate = 10.0;
            d.baro.t.resize(n10);
            d.baro.x.resize(n10);
            for (size_t i = 0; i < n10; i++) {
                d.baro.t[i] = double(i) / 10.0;
                d.baro.x[i] =
                    pressure_from_altitude(att * lat[car].alt[i]) + cfg.baro_noise * dev.normal();
            }

            ctx.devices.push_back(std::move(d));
        }
    }
    return ctx;
}

// Noise-only profile: what a stationary sensor records. Used as the injection
// attack source; shares nothing with any driving context.
inline SyntheticDevice generate_noise_profile(uint64_t seed, const GeneratorConfig& cfg,
                                              double duration) {
    GeneratorConfig quiet = cfg;
    quiet.bump_rate = quiet.ramp_rate = quiet.micro_accel_rate = quiet.turn_rate = 1e-12;
    quiet.road_texture = quiet.yaw_jitter = 0.0;
    quiet.altitude_amplitude = 0.0;
    auto ctx = generate_synthetic_context(seed, cfg.scenario, 1, 0, duration, &quiet);
    SyntheticDevice d = std::move(ctx.devices[0]);
    d.car = 0;  // not part of either car
    return d;
}

}  // namespace fastzip
