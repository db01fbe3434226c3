// Command-line front end: parameter tables, synthetic data, the fingerprint
// pipeline, live two-process pairing, evaluation, attacks, entropy reports,
// and loopback benchmarks. Exit codes: 0 ok, 1 usage, 2 bad data, 3 pairing
// aborted (reason on stderr).

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "fastzip/harness.hpp"
#include "fastzip/io.hpp"
#include "fastzip/protocol.hpp"
#include "fastzip/seccalc.hpp"
#include "fastzip/synthetic.hpp"

namespace fz = fastzip;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kData = 2;
constexpr int kAborted = 3;

struct Globals {
    std::string config_path;
    uint64_t seed = 1;
    bool verbose = false;
    int jobs = 1;
    fz::ConfigMap config;
    std::string config_used;
};

int usage_error(const std::string& msg) {
    std::fprintf(stderr, "fastzip: %s\n", msg.c_str());
    return kUsage;
}

int data_error(const std::string& msg) {
    std::fprintf(stderr, "fastzip: %s\n", msg.c_str());
    return kData;
}

// "0.729" or "35/48".
std::optional<fz::Ratio> parse_threshold(const std::string& s) {
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        char* e1 = nullptr;
        char* e2 = nullptr;
        long long num = std::strtoll(s.c_str(), &e1, 10);
        long long den = std::strtoll(s.c_str() + slash + 1, &e2, 10);
        if (e1 != s.c_str() + slash || *e2 != '\0' || den <= 0) return std::nullopt;
        return fz::Ratio(num, den);
    }
    return fz::Ratio::parse_decimal(s);
}

// Comma list of plus-sets: "V,H,V+H+G+B".
std::optional<std::vector<std::vector<fz::Modality>>> parse_sensor_sets(const std::string& s) {
    std::vector<std::vector<fz::Modality>> out;
    size_t pos = 0;
    while (pos <= s.size()) {
        size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        auto set = fz::parse_modality_set(s.substr(pos, comma - pos));
        if (!set) return std::nullopt;
        out.push_back(*set);
        pos = comma + 1;
    }
    if (out.empty()) return std::nullopt;
    return out;
}

std::string sensor_set_name(const std::vector<fz::Modality>& mods) {
    std::string s;
    for (size_t i = 0; i < mods.size(); i++) {
        if (i) s.push_back('+');
        s.push_back(fz::modality_letter(mods[i]));
    }
    return s;
}

std::optional<std::pair<int, int>> parse_cars(const std::string& s) {
    int a = 0, b = 0;
    char tail = 0;
    if (std::sscanf(s.c_str(), "%d+%d%c", &a, &b, &tail) != 2 || a < 0 || b < 0)
        return std::nullopt;
    return std::make_pair(a, b);
}

std::optional<std::pair<std::string, uint16_t>> parse_hostport(const std::string& s) {
    auto colon = s.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 >= s.size()) return std::nullopt;
    char* end = nullptr;
    long port = std::strtol(s.c_str() + colon + 1, &end, 10);
    if (*end != '\0' || port < 1 || port > 65535) return std::nullopt;
    return std::make_pair(s.substr(0, colon), uint16_t(port));
}

std::vector<fz::Scenario> parse_scenario_list(const std::string& s) {
    if (s == "all")
        return {fz::Scenario::City, fz::Scenario::Country, fz::Scenario::Highway,
                fz::Scenario::Parking};
    auto sc = fz::parse_scenario(s);
    if (!sc) return {};
    return {*sc};
}

// Generator settings for one scenario: config-file keys apply, an explicit
// scenario choice wins over the config's own.
fz::GeneratorConfig generator_for(const Globals& g, fz::Scenario scenario) {
    fz::ConfigMap m = g.config;
    m["scenario"] = fz::scenario_name(scenario);
    return fz::generator_config_from_map(m);
}

uint8_t sensor_mask(const std::vector<fz::Modality>& mods) {
    uint8_t mask = 0;
    for (fz::Modality m : mods) mask |= uint8_t(1u << unsigned(m));
    return mask;
}

uint8_t segment_mask(const fz::Fingerprint& f) {
    uint8_t mask = 0;
    for (const auto& seg : f.segments) mask |= uint8_t(1u << unsigned(seg.modality));
    return mask;
}

void parallel_for(int jobs, int count, const std::function<void(int)>& fn) {
    jobs = std::max(1, std::min(jobs, count));
    if (jobs <= 1) {
        for (int i = 0; i < count; i++) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(size_t(jobs));
    for (int w = 0; w < jobs; w++)
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) fn(i);
        });
    for (auto& t : pool) t.join();
}

std::vector<fz::DeviceFingerprints> run_pipeline(const fz::SyntheticContext& ctx) {
    std::vector<fz::DeviceFingerprints> out;
    for (const auto& d : ctx.devices) {
        auto ch = fz::process_device(d);
        if (!ch.ok()) continue;
        out.push_back(fz::fingerprint_device(ch.value(), fz::WindowSchedule{},
                                             fz::ActivityThresholds{}));
    }
    return out;
}

uint64_t run_seed_for(uint64_t base, int scenario_idx, int k) {
    fz::Rng r = fz::Rng(base).fork(uint64_t(100 + scenario_idx)).fork(uint64_t(k));
    return r.u64();
}

// Devices present in a directory, identified by a per-device probe file.
std::vector<std::pair<int, int>> discover_devices(const std::string& dir,
                                                  const std::string& probe_suffix) {
    std::vector<std::pair<int, int>> found;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        if (!entry.is_regular_file()) continue;
        std::string name = entry.path().filename().string();
        int car = 0, spot = 0, off = 0;
        if (std::sscanf(name.c_str(), "car%d_spot%d%n", &car, &spot, &off) != 2) continue;
        if (name.substr(size_t(off)) != probe_suffix) continue;
        found.emplace_back(car, spot);
    }
    std::sort(found.begin(), found.end());
    found.erase(std::unique(found.begin(), found.end()), found.end());
    return found;
}

// ---------- calc-params ----------

struct CalcOpts {
    bool table1 = false;
    bool table2 = false;
    bool csv = false;
    long long bits = 0;
    std::string threshold;
    std::string convention = "inclusive";
    long long security_bits = 128;
};

int cmd_calc_params(const CalcOpts& o) {
    if (o.convention != "inclusive" && o.convention != "exclusive")
        return usage_error("calc-params: --convention must be inclusive or exclusive");
    if (!o.table1 && !o.table2 && !(o.bits > 0 && !o.threshold.empty()))
        return usage_error("calc-params: pick --table1, --table2, or --bits with --threshold");

    if (o.table1) {
        auto rows = fz::table1();
        double incl90 = 0, excl90 = 0;
        if (o.csv)
            std::printf("thr_percent,n,d,log2_inclusive,log2_exclusive,floor_i,floor_log2\n");
        else
            std::printf("offline guessing probability by fingerprint size\n"
                        "  thr     n    d   log2 p incl   log2 p excl   best i   log2 guesses\n");
        for (const auto& r : rows) {
            if (r.thr_percent == 90) {
                incl90 = r.log2_inclusive;
                excl90 = r.log2_exclusive;
            }
            if (o.csv)
                std::printf("%d,%lld,%lld,%.4f,%.4f,%lld,%.4f\n", r.thr_percent, r.n, r.d,
                            r.log2_inclusive, r.log2_exclusive, r.floor_i, r.floor_log2);
            else
                std::printf("  %2d%%  %4lld  %3lld  %12.4f  %12.4f  %7lld  %13.4f\n",
                            r.thr_percent, r.n, r.d, r.log2_inclusive, r.log2_exclusive,
                            r.floor_i, r.floor_log2);
        }
        std::printf("%snote: the 90%% row depends on the tail convention; counting exact-"
                    "threshold guesses as hits gives log2 p = %.4f, counting them out gives "
                    "%.4f\n",
                    o.csv ? "# " : "", incl90, excl90);
    }

    if (o.table2) {
        auto rows = fz::table2();
        if (o.csv)
            std::printf("sensors,thr_milli,bits_per_window,window_seconds,exchange_bits,"
                        "exchange_seconds,commitment_bits,commitment_seconds\n");
        else
            std::printf("pairing profiles per sensor combination\n"
                        "  sensors     thr    bits/win  window   exch bits  exch time"
                        "   commit bits  commit time\n");
        for (const auto& p : rows) {
            if (o.csv)
                std::printf("%s,%lld,%lld,%lld,%lld,%lld,%lld,%lld\n", p.name.c_str(),
                            p.thr_milli, p.bits_per_window, p.window_seconds, p.exchange_bits,
                            p.exchange_seconds, p.commitment_bits, p.commitment_seconds);
            else
                std::printf("  %-9s %4lld.%lld%%  %7lld  %5lld s  %9lld  %7lld s  %11lld"
                            "  %9lld s\n",
                            p.name.c_str(), p.thr_milli / 10, p.thr_milli % 10,
                            p.bits_per_window, p.window_seconds, p.exchange_bits,
                            p.exchange_seconds, p.commitment_bits, p.commitment_seconds);
        }
    }

    if (o.bits > 0 && !o.threshold.empty()) {
        auto thr = parse_threshold(o.threshold);
        if (!thr) return usage_error("calc-params: bad --threshold value");
        auto conv = o.convention == "exclusive" ? fz::TailConvention::Exclusive
                                                : fz::TailConvention::Inclusive;
        auto incl = fz::offline_guess_probability(o.bits, *thr, fz::TailConvention::Inclusive);
        auto excl = fz::offline_guess_probability(o.bits, *thr, fz::TailConvention::Exclusive);
        if (!incl.ok())
            return usage_error(std::string("calc-params: ") +
                               fz::seccalc_error_name(incl.error()));
        long long d = fz::decode_parts(o.bits, *thr);
        std::printf("n %lld  threshold %lld/%lld  decode degree %lld  error budget %lld\n",
                    o.bits, thr->num, thr->den, d, (o.bits - d) / 2);
        std::printf("log2 offline-guess probability  %.4f inclusive  %.4f exclusive"
                    "  (--convention %s)\n",
                    incl.value().log2_p(), excl.value().log2_p(), o.convention.c_str());
        std::printf("commitment bits for %lld-bit secret  %lld\n", o.security_bits,
                    fz::fuzzy_commitment_bits(*thr, o.security_bits));
        (void)conv;
    }
    return kOk;
}

// ---------- generate ----------

struct GenerateOpts {
    std::string out;
    std::string scenario;  // empty: config file scenario, else city
    std::string cars = "2+1";
    double duration = 300.0;
};

int cmd_generate(const GenerateOpts& o, const Globals& g) {
    fz::ConfigMap m = g.config;
    if (!o.scenario.empty()) {
        auto scenarios = parse_scenario_list(o.scenario);
        if (scenarios.size() != 1)
            return usage_error("generate: --scenario must be city, country, highway, or parking");
        m["scenario"] = fz::scenario_name(scenarios[0]);
    }
    auto cars = parse_cars(o.cars);
    if (!cars) return usage_error("generate: --cars must look like 2+1");
    if (o.duration < 60.0) return usage_error("generate: --duration must be at least 60");
    if (cars->first + cars->second < 1) return usage_error("generate: no devices requested");

    fz::GeneratorConfig cfg = fz::generator_config_from_map(m);

    std::error_code ec;
    fs::create_directories(o.out, ec);
    if (ec) return data_error("generate: cannot create " + o.out);

    auto ctx = fz::generate_synthetic_context(g.seed, cfg.scenario, cars->first, cars->second,
                                              o.duration, &cfg);
    int written = 0;
    for (const auto& dev : ctx.devices) {
        const fz::RawRecording* recs[3] = {&dev.accel, &dev.gyro, &dev.baro};
        for (const auto* rec : recs) {
            std::string name = fz::recording_filename(dev.car, dev.spot, rec->modality);
            std::string path = (fs::path(o.out) / name).string();
            if (!fz::write_recording_csv(path, *rec))
                return data_error("generate: cannot write " + path);
            if (g.verbose) std::fprintf(stderr, "wrote %s\n", path.c_str());
            written++;
        }
    }
    std::ofstream conf(fs::path(o.out) / "generator.conf");
    conf << fz::generator_config_text(cfg);
    if (!conf) return data_error("generate: cannot write generator.conf");
    std::printf("scenario %s  duration %.0f s  devices %d (car1 %d, car2 %d)\n",
                fz::scenario_name(cfg.scenario), ctx.duration, int(ctx.devices.size()),
                cars->first, cars->second);
    std::printf("wrote %d recordings and generator.conf to %s\n", written, o.out.c_str());
    return kOk;
}

// ---------- preprocess ----------

struct PreprocessOpts {
    std::string in;
    std::string out;
};

int cmd_preprocess(const PreprocessOpts& o, const Globals& g) {
    auto devices = discover_devices(o.in, "_accelerometer.csv");
    if (devices.empty()) return data_error("preprocess: no car*_spot*_*.csv recordings in " + o.in);
    std::error_code ec;
    fs::create_directories(o.out, ec);
    if (ec) return data_error("preprocess: cannot create " + o.out);

    for (auto [car, spot] : devices) {
        fz::SyntheticDevice dev;
        dev.car = car;
        dev.spot = spot;
        struct Part {
            fz::RawModality m;
            double rate;
            fz::RawRecording* dst;
        } parts[3] = {{fz::RawModality::Accelerometer3d, 100.0, &dev.accel},
                      {fz::RawModality::Gyroscope3d, 100.0, &dev.gyro},
                      {fz::RawModality::Barometer, 10.0, &dev.baro}};
        for (const auto& part : parts) {
            std::string path =
                (fs::path(o.in) / fz::recording_filename(car, spot, part.m)).string();
            auto rec = fz::read_recording_csv(path, part.m, part.rate);
            if (!rec.ok())
                return data_error("preprocess: " + path + ": " +
                                  fz::io_error_name(rec.error()));
            *part.dst = std::move(rec.value());
        }
        auto ch = fz::process_device(dev);
        if (!ch.ok())
            return data_error(std::string("preprocess: car") + std::to_string(car) + "_spot" +
                              std::to_string(spot) + ": " + fz::signal_error_name(ch.error()));
        std::printf("car%d_spot%d:", car, spot);
        for (int m = 0; m < 4; m++) {
            const fz::Series& s = ch.value().channels[size_t(m)];
            std::string path = (fs::path(o.out) / fz::stream_filename(car, spot, fz::Modality(m)))
                                   .string();
            if (!fz::write_series_csv(path, s))
                return data_error("preprocess: cannot write " + path);
            std::printf(" %s %zu", fz::channel_label(fz::Modality(m)), s.v.size());
            if (g.verbose) std::fprintf(stderr, "wrote %s\n", path.c_str());
        }
        std::printf("\n");
    }
    return kOk;
}

// ---------- quantize ----------

struct QuantizeOpts {
    std::string in;
    std::string out;
    std::string sensors = "V+H+G+B";
};

int cmd_quantize(const QuantizeOpts& o, const Globals& g) {
    auto set = fz::parse_modality_set(o.sensors);
    if (!set) return usage_error("quantize: --sensors must be a plus-set of V,H,G,B");
    auto devices = discover_devices(o.in, "_acv.csv");
    if (devices.empty()) return data_error("quantize: no car*_spot*_acv.csv streams in " + o.in);
    std::error_code ec;
    fs::create_directories(o.out, ec);
    if (ec) return data_error("quantize: cannot create " + o.out);

    for (auto [car, spot] : devices) {
        fz::DeviceChannels ch;
        ch.car = car;
        ch.spot = spot;
        for (int m = 0; m < 4; m++) {
            std::string path = (fs::path(o.in) / fz::stream_filename(car, spot, fz::Modality(m)))
                                   .string();
            auto s = fz::read_series_csv(path, fz::Modality(m));
            if (!s.ok())
                return data_error("quantize: " + path + ": " + fz::io_error_name(s.error()));
            ch.channels[size_t(m)] = std::move(s.value());
        }
        auto prints = fz::fingerprint_device(ch, fz::WindowSchedule{}, fz::ActivityThresholds{});
        auto corpus = fz::device_fused_fingerprints(prints, *set);
        char name[48];
        std::snprintf(name, sizeof name, "car%d_spot%d.bits", car, spot);
        std::ofstream out((fs::path(o.out) / name).string());
        fz::write_fingerprint_corpus(out, corpus);
        if (!out) return data_error(std::string("quantize: cannot write ") + name);
        std::printf("%s: %zu fingerprints (%s)\n", name, corpus.size(),
                    sensor_set_name(*set).c_str());
        if (g.verbose)
            std::fprintf(stderr, "wrote %s\n", (fs::path(o.out) / name).string().c_str());
    }
    return kOk;
}

// ---------- pair ----------

struct PairOpts {
    std::string role;
    std::string listen;
    std::string connect;
    std::string fingerprint;
    std::string start_at;
    long long secret_bits = 128;
    double timeout = 10.0;
    long long line = 0;
};

std::optional<double> parse_start_at(const std::string& s) {
    if (s.find(':') != std::string::npos) {
        int h = 0, mi = 0, sec = 0;
        char tail = 0;
        if (std::sscanf(s.c_str(), "%d:%d:%d%c", &h, &mi, &sec, &tail) != 3) return std::nullopt;
        std::time_t now = std::time(nullptr);
        std::tm local{};
        localtime_r(&now, &local);
        local.tm_hour = h;
        local.tm_min = mi;
        local.tm_sec = sec;
        return double(std::mktime(&local));
    }
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') return std::nullopt;
    return v;
}

int cmd_pair(const PairOpts& o, const Globals& g) {
    const bool initiator = o.role == "initiator";
    if (!initiator && o.role != "responder")
        return usage_error("pair: --role must be initiator or responder");
    if (initiator && o.connect.empty())
        return usage_error("pair: initiator needs --connect host:port");
    if (!initiator && o.listen.empty())
        return usage_error("pair: responder needs --listen host:port");

    std::ifstream in(o.fingerprint);
    if (!in) return data_error("pair: cannot open " + o.fingerprint);
    auto corpus = fz::read_fingerprint_corpus(in);
    if (corpus.empty()) return data_error("pair: no fingerprints in " + o.fingerprint);
    if (o.line < 0 || size_t(o.line) >= corpus.size())
        return data_error("pair: --line out of range (corpus has " +
                          std::to_string(corpus.size()) + " fingerprints)");
    const fz::Fingerprint& f = corpus[size_t(o.line)];

    fz::ProtocolConfig cfg;
    cfg.n = uint16_t(f.bits.size());
    cfg.thr = f.fused_threshold;
    cfg.secret_bits = uint16_t(o.secret_bits);
    cfg.confirm_timeout = o.timeout;
    cfg.sensors = segment_mask(f);
    if (g.verbose)
        std::fprintf(stderr, "pair: %s  n %u  thr %lld/%lld  sensors %s\n", o.role.c_str(),
                     unsigned(cfg.n), cfg.thr.num, cfg.thr.den, f.modality_string().c_str());

    if (!o.start_at.empty()) {
        auto target = parse_start_at(o.start_at);
        if (!target) return usage_error("pair: --start-at wants HH:MM:SS or epoch seconds");
        double now = std::chrono::duration<double>(
                         std::chrono::system_clock::now().time_since_epoch())
                         .count();
        if (*target > now)
            std::this_thread::sleep_for(std::chrono::duration<double>(*target - now));
    }

    int fd = -1;
    if (initiator) {
        auto hp = parse_hostport(o.connect);
        if (!hp) return usage_error("pair: bad --connect address");
        for (int tries = 0; tries < 100 && fd < 0; tries++) {
            fd = fz::tcp_connect(hp->first, hp->second);
            if (fd < 0) std::this_thread::sleep_for(std::chrono::milliseconds(100));
        }
        if (fd < 0) return data_error("pair: cannot connect to " + o.connect);
    } else {
        auto hp = parse_hostport(o.listen);
        if (!hp) return usage_error("pair: bad --listen address");
        fd = fz::tcp_listen_accept(hp->first, hp->second);
        if (fd < 0) return data_error("pair: cannot listen on " + o.listen);
    }

    fz::TcpChannel ch(fd);
    fz::EkeBackend backend;
    fz::FpakeSession session(cfg, f.bits, initiator ? fz::Role::Initiator : fz::Role::Responder,
                             &backend, g.seed * 2 + (initiator ? 1 : 2));
    fz::SystemClock ck;
    auto key = fz::run_session(session, ch, ck);
    if (!key.ok()) {
        std::fprintf(stderr, "fastzip: pairing aborted: %s\n",
                     fz::abort_reason_name(key.error()));
        return kAborted;
    }
    fz::Digest d = fz::sha256(key.value());
    std::printf("key-fingerprint %s\n", fz::to_hex(fz::Bytes(d.begin(), d.end())).c_str());
    return kOk;
}

// ---------- evaluate ----------

struct EvaluateOpts {
    std::string scenario = "city";
    std::string cars = "2+2";
    std::string sensor_sets = "V,H,G,B,V+H,V+H+G,V+H+G+B";
    int seeds = 5;
    double duration = 600.0;
    bool csv = false;
    bool full_protocol = false;
};

int cmd_evaluate(const EvaluateOpts& o, const Globals& g) {
    auto scenarios = parse_scenario_list(o.scenario);
    if (scenarios.empty())
        return usage_error("evaluate: --scenario must be a scenario name or all");
    auto cars = parse_cars(o.cars);
    if (!cars || cars->first + cars->second < 2)
        return usage_error("evaluate: --cars must name at least two devices, like 2+2");
    auto sets = parse_sensor_sets(o.sensor_sets);
    if (!sets) return usage_error("evaluate: bad --sensor-sets");
    if (o.seeds < 1) return usage_error("evaluate: --seeds must be positive");
    if (o.duration < 60.0) return usage_error("evaluate: --duration must be at least 60");

    struct Counts {
        long long col_trials = 0, col_accepts = 0, cross_trials = 0, cross_accepts = 0;
    };
    const int runs = int(scenarios.size()) * o.seeds;
    std::vector<std::vector<Counts>> per_run(size_t(runs),
                                             std::vector<Counts>(sets->size()));
    std::vector<std::vector<fz::DeviceFingerprints>> first_devices(scenarios.size());

    parallel_for(g.jobs, runs, [&](int run) {
        const int scen_idx = run / o.seeds;
        const int k = run % o.seeds;
        const fz::GeneratorConfig gen_cfg = generator_for(g, scenarios[size_t(scen_idx)]);
        auto ctx = fz::generate_synthetic_context(run_seed_for(g.seed, scen_idx, k),
                                                  gen_cfg.scenario, cars->first, cars->second,
                                                  o.duration, &gen_cfg);
        auto devices = run_pipeline(ctx);
        for (size_t si = 0; si < sets->size(); si++) {
            fz::TrialParams params;
            params.sensors = (*sets)[si];
            auto rep = fz::compute_tar_far(devices, params);
            if (!rep.ok()) continue;
            per_run[size_t(run)][si] = {rep.value().colocated_trials,
                                        rep.value().colocated_accepts,
                                        rep.value().cross_trials, rep.value().cross_accepts};
        }
        if (k == 0) first_devices[size_t(scen_idx)] = std::move(devices);
    });

    std::vector<std::vector<Counts>> pooled(scenarios.size(),
                                            std::vector<Counts>(sets->size()));
    long long grand_total = 0;
    for (int run = 0; run < runs; run++)
        for (size_t si = 0; si < sets->size(); si++) {
            auto& dst = pooled[size_t(run / o.seeds)][si];
            const auto& src = per_run[size_t(run)][si];
            dst.col_trials += src.col_trials;
            dst.col_accepts += src.col_accepts;
            dst.cross_trials += src.cross_trials;
            dst.cross_accepts += src.cross_accepts;
            grand_total += src.col_trials + src.cross_trials;
        }
    if (grand_total == 0) return data_error("evaluate: no aligned trials produced");

    if (o.csv)
        std::printf("scenario,sensors,colocated_trials,colocated_accepts,tar,"
                    "cross_trials,cross_accepts,far\n");
    for (size_t sc = 0; sc < scenarios.size(); sc++)
        for (size_t si = 0; si < sets->size(); si++) {
            const auto& c = pooled[sc][si];
            double tar = c.col_trials ? double(c.col_accepts) / double(c.col_trials) : 0.0;
            double far = c.cross_trials ? double(c.cross_accepts) / double(c.cross_trials) : 0.0;
            if (o.csv)
                std::printf("%s,%s,%lld,%lld,%.6f,%lld,%lld,%.6f\n",
                            fz::scenario_name(scenarios[sc]),
                            sensor_set_name((*sets)[si]).c_str(), c.col_trials, c.col_accepts,
                            tar, c.cross_trials, c.cross_accepts, far);
            else
                std::printf("%-8s %-9s tar %.4f (%lld/%lld)  far %.5f (%lld/%lld)\n",
                            fz::scenario_name(scenarios[sc]),
                            sensor_set_name((*sets)[si]).c_str(), tar, c.col_accepts,
                            c.col_trials, far, c.cross_accepts, c.cross_trials);
        }

    for (size_t sc = 0; sc < scenarios.size(); sc++) {
        const auto& c = pooled[sc].back();
        double tar = c.col_trials ? double(c.col_accepts) / double(c.col_trials) : 0.0;
        double far = c.cross_trials ? double(c.cross_accepts) / double(c.cross_trials) : 0.0;
        std::printf("%ssummary: %s %s tar %.4f far %.5f over %lld colocated and %lld cross "
                    "trials\n",
                    o.csv ? "# " : "", fz::scenario_name(scenarios[sc]),
                    sensor_set_name(sets->back()).c_str(), tar, far, c.col_trials,
                    c.cross_trials);
    }

    if (o.full_protocol) {
        if (o.csv)
            std::printf("# spotcheck: scenario,sensors,pairs,predicate_accepts,"
                        "session_accepts,disagreements\n");
        for (size_t sc = 0; sc < scenarios.size(); sc++)
            for (size_t si = 0; si < sets->size(); si++) {
                auto pairs = fz::collect_aligned_pairs(first_devices[sc], (*sets)[si], 12, 12);
                auto spot = fz::full_protocol_spot_check(pairs, 3.0,
                                                         run_seed_for(g.seed, int(sc), 777));
                if (o.csv)
                    std::printf("# spotcheck: %s,%s,%lld,%lld,%lld,%lld\n",
                                fz::scenario_name(scenarios[sc]),
                                sensor_set_name((*sets)[si]).c_str(), spot.trials,
                                spot.predicate_accepts, spot.session_accepts,
                                spot.disagreements);
                else
                    std::printf("spotcheck %-8s %-9s %lld pairs, predicate %lld, sessions "
                                "%lld, disagreements %lld\n",
                                fz::scenario_name(scenarios[sc]),
                                sensor_set_name((*sets)[si]).c_str(), spot.trials,
                                spot.predicate_accepts, spot.session_accepts,
                                spot.disagreements);
            }
    }
    return kOk;
}

// ---------- attack ----------

struct AttackOpts {
    std::string kind = "all";
    std::string scenario = "city";
    std::string cars = "2+2";
    std::string sensor_sets = "V,V+H,V+H+G,V+H+G+B";
    std::string alignment = "auto";
    std::string oracle = "V";
    double tolerance = 15.0;
    double jitter = 30.0;
    int seeds = 10;
    double duration = 300.0;
    bool csv = false;
};

int cmd_attack(const AttackOpts& o, const Globals& g) {
    std::vector<fz::AttackKind> kinds;
    if (o.kind == "all")
        kinds = {fz::AttackKind::Injection, fz::AttackKind::Replay,
                 fz::AttackKind::SimilarContext};
    else if (auto k = fz::parse_attack_kind(o.kind))
        kinds = {*k};
    else
        return usage_error("attack: --kind must be injection, replay, similar-context, or all");
    auto scenarios = parse_scenario_list(o.scenario);
    if (scenarios.empty()) return usage_error("attack: --scenario must be a scenario name or all");
    auto cars = parse_cars(o.cars);
    if (!cars || cars->first < 1)
        return usage_error("attack: --cars must name at least one victim device");
    auto sets = parse_sensor_sets(o.sensor_sets);
    if (!sets) return usage_error("attack: bad --sensor-sets");
    auto oracle_set = fz::parse_modality_set(o.oracle);
    if (!oracle_set || oracle_set->size() != 1)
        return usage_error("attack: --oracle must be a single sensor letter");
    if (o.seeds < 1) return usage_error("attack: --seeds must be positive");
    if (o.duration < 60.0) return usage_error("attack: --duration must be at least 60");

    auto alignment_for = [&](fz::AttackKind k) -> std::optional<fz::AttackAlignment> {
        if (o.alignment == "auto")
            return k == fz::AttackKind::SimilarContext
                       ? fz::AttackAlignment::BestMatchSingleSensor
                       : fz::AttackAlignment::Unsynchronized;
        if (o.alignment == "unsynchronized") return fz::AttackAlignment::Unsynchronized;
        if (o.alignment == "rough-timeline") return fz::AttackAlignment::RoughTimeline;
        if (o.alignment == "best-match") return fz::AttackAlignment::BestMatchSingleSensor;
        return std::nullopt;
    };
    for (fz::AttackKind k : kinds) {
        auto al = alignment_for(k);
        if (!al) return usage_error("attack: --alignment must be auto, unsynchronized, "
                                    "rough-timeline, or best-match");
        fz::AttackSpec probe;
        probe.kind = k;
        probe.alignment = *al;
        if (!fz::attack_spec_valid(probe))
            return usage_error(std::string("attack: alignment ") + o.alignment +
                               " is not valid for kind " + fz::attack_kind_name(k));
    }

    struct Counts {
        long long trials = 0, accepts = 0;
    };
    const int runs = int(scenarios.size()) * o.seeds;
    const size_t cells = kinds.size() * sets->size();
    auto per_run = std::vector<std::vector<Counts>>(size_t(runs), std::vector<Counts>(cells));

    parallel_for(g.jobs, runs, [&](int run) {
        const int scen_idx = run / o.seeds;
        const int k = run % o.seeds;
        const uint64_t run_seed = run_seed_for(g.seed, scen_idx, k);
        const fz::GeneratorConfig gen_cfg = generator_for(g, scenarios[size_t(scen_idx)]);
        auto ctx = fz::generate_synthetic_context(run_seed, gen_cfg.scenario, cars->first,
                                                  cars->second, o.duration, &gen_cfg);
        auto devices = run_pipeline(ctx);
        std::vector<fz::DeviceFingerprints> victims, others;
        for (auto& d : devices) (d.car == 1 ? victims : others).push_back(std::move(d));

        auto noise = fz::generate_noise_profile(run_seed + 0x9e3779b9ull, ctx.config,
                                                o.duration);
        std::vector<fz::DeviceFingerprints> injectors;
        if (auto nch = fz::process_device(noise); nch.ok())
            injectors.push_back(fz::fingerprint_device(nch.value(), fz::WindowSchedule{},
                                                       fz::ActivityThresholds{}));

        for (size_t ki = 0; ki < kinds.size(); ki++) {
            fz::AttackSpec spec;
            spec.kind = kinds[ki];
            spec.alignment = *alignment_for(kinds[ki]);
            spec.oracle_sensor = (*oracle_set)[0];
            spec.oracle_tolerance_seconds = o.tolerance;
            spec.replay_jitter_seconds = o.jitter;
            spec.seed = run_seed;
            const auto& adversaries =
                kinds[ki] == fz::AttackKind::Injection ? injectors : others;
            for (size_t si = 0; si < sets->size(); si++) {
                fz::TrialParams params;
                params.sensors = (*sets)[si];
                auto rep = fz::run_attack(spec, victims, adversaries, params);
                if (!rep.ok()) continue;
                per_run[size_t(run)][ki * sets->size() + si] = {rep.value().trials,
                                                                rep.value().accepts};
            }
        }
    });

    std::vector<std::vector<Counts>> pooled(scenarios.size(), std::vector<Counts>(cells));
    long long grand_total = 0;
    for (int run = 0; run < runs; run++)
        for (size_t cell = 0; cell < cells; cell++) {
            auto& dst = pooled[size_t(run / o.seeds)][cell];
            dst.trials += per_run[size_t(run)][cell].trials;
            dst.accepts += per_run[size_t(run)][cell].accepts;
            grand_total += per_run[size_t(run)][cell].trials;
        }
    if (grand_total == 0) return data_error("attack: no attack trials produced");

    if (o.csv) std::printf("scenario,kind,alignment,sensors,trials,accepts,far\n");
    for (size_t sc = 0; sc < scenarios.size(); sc++)
        for (size_t ki = 0; ki < kinds.size(); ki++) {
            const char* al_name =
                alignment_for(kinds[ki]) == fz::AttackAlignment::Unsynchronized
                    ? "unsynchronized"
                    : alignment_for(kinds[ki]) == fz::AttackAlignment::RoughTimeline
                          ? "rough-timeline"
                          : "best-match";
            for (size_t si = 0; si < sets->size(); si++) {
                const auto& c = pooled[sc][ki * sets->size() + si];
                double far = c.trials ? double(c.accepts) / double(c.trials) : 0.0;
                if (o.csv)
                    std::printf("%s,%s,%s,%s,%lld,%lld,%.6f\n",
                                fz::scenario_name(scenarios[sc]),
                                fz::attack_kind_name(kinds[ki]), al_name,
                                sensor_set_name((*sets)[si]).c_str(), c.trials, c.accepts, far);
                else
                    std::printf("%-8s %-15s %-14s %-9s far %.5f (%lld/%lld)\n",
                                fz::scenario_name(scenarios[sc]),
                                fz::attack_kind_name(kinds[ki]), al_name,
                                sensor_set_name((*sets)[si]).c_str(), far, c.accepts, c.trials);
            }
        }

    for (size_t sc = 0; sc < scenarios.size(); sc++) {
        std::string line = std::string(o.csv ? "# " : "") + "summary: " +
                           fz::scenario_name(scenarios[sc]);
        for (size_t ki = 0; ki < kinds.size(); ki++) {
            const auto& c = pooled[sc][ki * sets->size()];
            double far = c.trials ? double(c.accepts) / double(c.trials) : 0.0;
            char buf[96];
            std::snprintf(buf, sizeof buf, "  %s %s far %.5f", fz::attack_kind_name(kinds[ki]),
                          sensor_set_name((*sets)[0]).c_str(), far);
            line += buf;
        }
        std::printf("%s\n", line.c_str());
    }
    return kOk;
}

// ---------- entropy ----------

struct EntropyOpts {
    std::string corpus;
    bool csv = false;
};

int cmd_entropy(const EntropyOpts& o) {
    std::ifstream in(o.corpus);
    if (!in) return data_error("entropy: cannot open " + o.corpus);
    auto corpus = fz::read_fingerprint_corpus(in);
    auto rep = fz::entropy_analysis(corpus);
    if (!rep.ok())
        return data_error(std::string("entropy: ") + fz::harness_error_name(rep.error()) +
                          " (need >= 100 equal-length fingerprints, got " +
                          std::to_string(corpus.size()) + ")");
    const auto& r = rep.value();
    std::printf("corpus %zu fingerprints of %zu bits\n", size_t(r.corpus_size),
                size_t(r.fingerprint_bits));
    std::printf("markov p01 %.6f  p11 %.6f\n", r.markov_p01, r.markov_p11);
    std::printf("mcv min-entropy %.6f bits per bit\n", r.mcv_min_entropy);
    std::printf("markov min-entropy %.6f bits per bit\n", r.markov_min_entropy);
    std::printf("chi-square %.4f on %d df  p-value %.6f\n", r.chi_square, r.chi_df,
                r.chi_p_value);
    std::printf("%swalk,observed,expected\n", o.csv ? "" : "# ");
    for (const auto& [pos, expected] : r.expected_binomial) {
        auto it = r.walk_positions.find(pos);
        long long obs = it == r.walk_positions.end() ? 0 : it->second;
        std::printf("%d,%lld,%.6f\n", pos, obs, expected);
    }
    return kOk;
}

// ---------- bench ----------

struct BenchOpts {
    std::string sensors = "V+H+G+B";
    int iterations = 12;
    long long secret_bits = 128;
    bool simulated = false;
};

struct BenchSample {
    double amplify = 0, commit = 0, confirm = 0, total = 0, comp = 0, wait = 0;
};

// One initiator session over a connected socket, attributing wall time to
// protocol stages and splitting computation from channel wait.
std::optional<BenchSample> bench_session(int fd, const fz::ProtocolConfig& cfg,
                                         const std::vector<uint8_t>& bits, uint64_t seed,
                                         bool simulated, const std::atomic<int>& resp_phase) {
    fz::TcpChannel ch(fd);
    fz::EkeBackend eke;
    fz::SimulatedBackend sim;
    fz::PakeBackend* backend = simulated ? static_cast<fz::PakeBackend*>(&sim)
                                         : static_cast<fz::PakeBackend*>(&eke);
    fz::FpakeSession s(cfg, bits, fz::Role::Initiator, backend, seed);
    fz::SystemClock ck;
    BenchSample out;
    const double t0 = ck.now();
    double t_amp = -1, t_com = -1;
    auto flush = [&](std::vector<fz::Frame> frames) {
        for (const fz::Frame& f : frames) ch.send(f);
    };
    auto timed = [&](auto&& fn) {
        double a = ck.now();
        auto frames = fn();
        out.comp += ck.now() - a;
        flush(std::move(frames));
    };
    timed([&] { return s.start(ck.now()); });
    while (s.phase() != fz::Phase::Done && s.phase() != fz::Phase::Aborted) {
        auto f = ch.receive(0.1);
        if (f)
            timed([&] { return s.on_frame(*f, ck.now()); });
        else
            timed([&] { return s.on_tick(ck.now()); });
        double now = ck.now();
        if (t_amp < 0 && s.phase() >= fz::Phase::Confirming) t_amp = now;
        if (t_amp >= 0 && t_com < 0 && resp_phase.load() >= int(fz::Phase::Confirming))
            t_com = now;
    }
    if (s.phase() != fz::Phase::Done) return std::nullopt;
    const double t3 = ck.now();
    if (t_amp < 0) t_amp = t3;
    if (t_com < 0) t_com = t3;
    out.amplify = t_amp - t0;
    out.commit = std::max(0.0, t_com - t_amp);
    out.confirm = std::max(0.0, t3 - t_com);
    out.total = t3 - t0;
    out.wait = std::max(0.0, out.total - out.comp);
    return out;
}

int cmd_bench(const BenchOpts& o, const Globals& g) {
    auto sets = parse_sensor_sets(o.sensors);
    if (!sets) return usage_error("bench: bad --sensors");
    if (o.iterations < 10) return usage_error("bench: --iterations must be at least 10");
    if (o.secret_bits < 1 || o.secret_bits > 244)
        return usage_error("bench: --secret-bits must be in 1..244");

    int ls = ::socket(AF_INET, SOCK_STREAM, 0);
    if (ls < 0) return data_error("bench: cannot create socket");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = 0;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    socklen_t alen = sizeof addr;
    if (::bind(ls, (sockaddr*)&addr, sizeof addr) != 0 || ::listen(ls, 4) != 0 ||
        ::getsockname(ls, (sockaddr*)&addr, &alen) != 0) {
        ::close(ls);
        return data_error("bench: cannot bind loopback listener");
    }
    const uint16_t port = ntohs(addr.sin_port);

    for (size_t si = 0; si < sets->size(); si++) {
        auto profile = fz::pairing_profile((*sets)[si]);
        fz::ProtocolConfig cfg;
        cfg.n = uint16_t(profile.exchange_bits);
        cfg.thr = profile.thr;
        cfg.secret_bits = uint16_t(o.secret_bits);
        cfg.confirm_timeout = 5.0;
        cfg.sensors = sensor_mask((*sets)[si]);
        const long long flips = cfg.error_budget() / 2;

        std::vector<std::pair<std::vector<uint8_t>, std::vector<uint8_t>>> inputs;
        fz::Rng rng = fz::Rng(g.seed).fork(500 + si);
        for (int it = 0; it < o.iterations; it++) {
            std::vector<uint8_t> a(cfg.n);
            for (auto& b : a) b = uint8_t(rng.below(2));
            std::vector<uint8_t> b = a;
            std::vector<uint8_t> used(cfg.n, 0);
            for (long long fl = 0; fl < flips; fl++) {
                for (;;) {
                    size_t p = size_t(rng.below(uint64_t(cfg.n)));
                    if (!used[p]) {
                        used[p] = 1;
                        b[p] ^= 1;
                        break;
                    }
                }
            }
            inputs.emplace_back(std::move(a), std::move(b));
        }

        std::atomic<int> resp_phase{0};
        std::atomic<bool> resp_ok{true};
        std::thread responder([&] {
            for (int it = 0; it < o.iterations; it++) {
                int fd = ::accept(ls, nullptr, nullptr);
                if (fd < 0) {
                    resp_ok = false;
                    return;
                }
                int one = 1;
                ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
                resp_phase = 0;
                fz::TcpChannel ch(fd);
                fz::EkeBackend eke;
                fz::SimulatedBackend sim;
                fz::PakeBackend* backend = o.simulated
                                               ? static_cast<fz::PakeBackend*>(&sim)
                                               : static_cast<fz::PakeBackend*>(&eke);
                fz::FpakeSession s(cfg, inputs[size_t(it)].second, fz::Role::Responder,
                                   backend, g.seed * 2 + 2 + uint64_t(it) * 64);
                fz::SystemClock ck;
                auto flush = [&](std::vector<fz::Frame> frames) {
                    for (const fz::Frame& f : frames) ch.send(f);
                };
                flush(s.start(ck.now()));
                resp_phase = int(s.phase());
                while (s.phase() != fz::Phase::Done && s.phase() != fz::Phase::Aborted) {
                    auto f = ch.receive(0.1);
                    if (f)
                        flush(s.on_frame(*f, ck.now()));
                    else
                        flush(s.on_tick(ck.now()));
                    resp_phase = int(s.phase());
                }
                if (s.phase() != fz::Phase::Done) resp_ok = false;
            }
        });

        std::vector<BenchSample> samples;
        bool init_ok = true;
        for (int it = 0; it < o.iterations; it++) {
            int fd = fz::tcp_connect("127.0.0.1", port);
            if (fd < 0) {
                init_ok = false;
                break;
            }
            auto sample = bench_session(fd, cfg, inputs[size_t(it)].first,
                                        g.seed * 2 + 1 + uint64_t(it) * 64, o.simulated,
                                        resp_phase);
            if (!sample) {
                init_ok = false;
                break;
            }
            samples.push_back(*sample);
        }
        responder.join();
        if (!init_ok || !resp_ok || samples.size() != size_t(o.iterations)) {
            ::close(ls);
            return data_error("bench: a loopback session failed");
        }

        auto stat = [&](auto field) {
            double mean = 0;
            for (const auto& s : samples) mean += s.*field;
            mean /= double(samples.size());
            double var = 0;
            for (const auto& s : samples) var += (s.*field - mean) * (s.*field - mean);
            var /= double(samples.size() - 1);
            return std::make_pair(mean, std::sqrt(var));
        };
        std::printf("bench %s  n %u  thr %lld.%lld%%  secret %lld  iterations %d  backend %s\n",
                    profile.name.c_str(), unsigned(cfg.n), profile.thr_milli / 10,
                    profile.thr_milli % 10, o.secret_bits, o.iterations,
                    o.simulated ? "simulated" : "eke");
        std::printf("phase,mean_s,sigma_s\n");
        const std::pair<const char*, double BenchSample::*> rows[] = {
            {"amplify", &BenchSample::amplify}, {"commit", &BenchSample::commit},
            {"confirm", &BenchSample::confirm}, {"total", &BenchSample::total},
            {"computation", &BenchSample::comp}, {"channel_wait", &BenchSample::wait}};
        for (const auto& [name, field] : rows) {
            auto [mean, sigma] = stat(field);
            std::printf("%s,%.6f,%.6f\n", name, mean, sigma);
        }
    }
    ::close(ls);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"zero-interaction pairing toolkit: parameter tables, synthetic contexts, the "
                 "fingerprint pipeline, live pairing, evaluation, attacks, entropy reports, "
                 "and benchmarks"};
    app.require_subcommand(1);

    Globals g;
    app.add_option("--config", g.config_path,
                   "config file (key = value); also honors FASTZIP_CONFIG and ./fastzip.conf");
    app.add_option("--seed", g.seed, "root seed; outputs are bit-reproducible given the same "
                                     "seed, timing fields excepted");
    app.add_flag("--verbose", g.verbose, "chatty progress on stderr");
    app.add_option("--jobs", g.jobs, "worker pool size for evaluate and attack")
        ->check(CLI::Range(1, 256));

    CalcOpts calc;
    auto* c = app.add_subcommand("calc-params",
                                 "security parameter tables and single-point calculations");
    c->fallthrough();
    c->add_flag("--table1", calc.table1, "offline guessing bounds for n in 40..140");
    c->add_flag("--table2", calc.table2, "per-sensor-combination pairing profiles");
    c->add_flag("--csv", calc.csv, "machine-readable rows on stdout");
    c->add_option("--bits", calc.bits, "fingerprint size for a single calculation");
    c->add_option("--threshold", calc.threshold, "similarity threshold, decimal or num/den");
    c->add_option("--convention", calc.convention,
                  "tail convention for the headline number: inclusive or exclusive");
    c->add_option("--security-bits", calc.security_bits, "secret size for commitment sizing");

    GenerateOpts gen;
    auto* gn = app.add_subcommand("generate", "write synthetic two-car recordings as CSV");
    gn->fallthrough();
    gn->add_option("--out", gen.out, "output directory")->required();
    gn->add_option("--scenario", gen.scenario, "city, country, highway, or parking");
    gn->add_option("--cars", gen.cars, "devices per car, like 2+1");
    gn->add_option("--duration", gen.duration, "seconds of context, at least 60");

    PreprocessOpts pre;
    auto* pp = app.add_subcommand("preprocess",
                                  "raw recordings to filtered per-channel streams");
    pp->fallthrough();
    pp->add_option("--in", pre.in, "directory of car*_spot*_<sensor>.csv recordings")
        ->required();
    pp->add_option("--out", pre.out, "output directory for stream CSVs")->required();

    QuantizeOpts qz;
    auto* qq = app.add_subcommand("quantize", "streams to fused fingerprint corpora");
    qq->fallthrough();
    qq->add_option("--in", qz.in, "directory of preprocessed streams")->required();
    qq->add_option("--out", qz.out, "output directory for .bits corpora")->required();
    qq->add_option("--sensors", qz.sensors, "fused sensor set, like V+H+G+B");

    PairOpts pr;
    auto* pa = app.add_subcommand("pair", "run one live pairing session over TCP");
    pa->fallthrough();
    pa->add_option("--role", pr.role, "initiator or responder")->required();
    pa->add_option("--listen", pr.listen, "responder bind address, host:port");
    pa->add_option("--connect", pr.connect, "initiator target address, host:port");
    pa->add_option("--fingerprint", pr.fingerprint, "fingerprint corpus file")->required();
    pa->add_option("--line", pr.line, "which corpus line to pair with");
    pa->add_option("--secret-bits", pr.secret_bits, "session secret size")
        ->check(CLI::Range(1, 244));
    pa->add_option("--timeout", pr.timeout, "confirm deadline in seconds");
    pa->add_option("--start-at", pr.start_at, "hold the session until HH:MM:SS or epoch seconds");

    EvaluateOpts ev;
    auto* ee = app.add_subcommand("evaluate", "TAR/FAR tables over synthetic contexts");
    ee->fallthrough();
    ee->add_option("--scenario", ev.scenario, "scenario name or all");
    ee->add_option("--cars", ev.cars, "devices per car, like 2+2");
    ee->add_option("--sensor-sets", ev.sensor_sets, "comma list of plus-sets");
    ee->add_option("--seeds", ev.seeds, "independent contexts per scenario");
    ee->add_option("--duration", ev.duration, "seconds per context");
    ee->add_flag("--csv", ev.csv, "machine-readable rows on stdout");
    ee->add_flag("--full-protocol", ev.full_protocol,
                 "also run real protocol sessions on sampled pairs");

    AttackOpts at;
    auto* aa = app.add_subcommand("attack", "adversarial FARs over synthetic contexts");
    aa->fallthrough();
    aa->add_option("--kind", at.kind, "injection, replay, similar-context, or all");
    aa->add_option("--scenario", at.scenario, "scenario name or all");
    aa->add_option("--cars", at.cars, "victim+adversary devices, like 2+2");
    aa->add_option("--sensor-sets", at.sensor_sets, "comma list of plus-sets");
    aa->add_option("--alignment", at.alignment,
                   "auto, unsynchronized, rough-timeline, or best-match");
    aa->add_option("--oracle", at.oracle, "similar-context substituted sensor letter");
    aa->add_option("--tolerance", at.tolerance, "similar-context search radius in seconds");
    aa->add_option("--jitter", at.jitter, "rough-timeline jitter bound in seconds");
    aa->add_option("--seeds", at.seeds, "independent contexts per scenario");
    aa->add_option("--duration", at.duration, "seconds per context");
    aa->add_flag("--csv", at.csv, "machine-readable rows on stdout");

    EntropyOpts en;
    auto* nn = app.add_subcommand("entropy", "fingerprint corpus randomness report");
    nn->fallthrough();
    nn->add_option("corpus", en.corpus, "fingerprint corpus file")->required();
    nn->add_flag("--csv", en.csv, "histogram without the comment prefix");

    BenchOpts be;
    auto* bb = app.add_subcommand("bench", "loopback session timing per fusion combination");
    bb->fallthrough();
    bb->add_option("--sensors", be.sensors, "comma list of plus-sets to profile");
    bb->add_option("--iterations", be.iterations, "sessions per combination, at least 10");
    bb->add_option("--secret-bits", be.secret_bits, "session secret size");
    bb->add_flag("--simulated", be.simulated, "skip the real key exchange "
                                              "(wire format unchanged)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    std::string used;
    g.config = fz::resolve_config(g.config_path, &used);
    g.config_used = used;
    if (g.verbose && !used.empty()) std::fprintf(stderr, "config: %s\n", used.c_str());

    if (c->parsed()) return cmd_calc_params(calc);
    if (gn->parsed()) return cmd_generate(gen, g);
    if (pp->parsed()) return cmd_preprocess(pre, g);
    if (qq->parsed()) return cmd_quantize(qz, g);
    if (pa->parsed()) return cmd_pair(pr, g);
    if (ee->parsed()) return cmd_evaluate(ev, g);
    if (aa->parsed()) return cmd_attack(at, g);
    if (nn->parsed()) return cmd_entropy(en);
    if (bb->parsed()) return cmd_bench(be, g);
    return kUsage;
}
