#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "fastzip/harness.hpp"
#include "fastzip/seccalc.hpp"

using namespace fastzip;

namespace {

std::vector<DeviceFingerprints> run_pipeline(const SyntheticContext& ctx) {
    std::vector<DeviceFingerprints> out;
    WindowSchedule sched;
    ActivityThresholds thr;
    for (const auto& d : ctx.devices) {
        auto ch = process_device(d);
        REQUIRE(ch.ok());
        out.push_back(fingerprint_device(ch.value(), sched, thr));
    }
    return out;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    REQUIRE(a.size() == b.size());
    REQUIRE(a.size() > 1);
    double ma = 0, mb = 0;
    for (size_t i = 0; i < a.size(); i++) {
        ma += a[i];
        mb += b[i];
    }
    ma /= double(a.size());
    mb /= double(b.size());
    double sab = 0, saa = 0, sbb = 0;
    for (size_t i = 0; i < a.size(); i++) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa <= 0 || sbb <= 0) return 0;
    return sab / std::sqrt(saa * sbb);
}

Fingerprint random_print(Modality m, double t, Rng& rng) {
    Fingerprint f;
    f.start_time = t;
    const size_t nb = size_t(modality_bits(m));
    for (size_t i = 0; i < nb; i++) f.bits.push_back(uint8_t(rng.u64() & 1));
    f.segments.push_back({m, 0, nb, modality_threshold(m)});
    f.fused_threshold = modality_threshold(m);
    return f;
}

DeviceFingerprints coin_flip_device(int car, int spot, Modality m, size_t epochs, Rng& rng) {
    DeviceFingerprints d;
    d.car = car;
    d.spot = spot;
    for (size_t e = 0; e < epochs; e++) {
        WindowPrint wp;
        wp.start_time = 5.0 * double(e);
        wp.accepted = true;
        wp.print = random_print(m, wp.start_time, rng);
        d.prints[size_t(m)].push_back(std::move(wp));
    }
    return d;
}

// Synthetic schedule device: windows of `m` at the given starts, fixed accept
// flags, default bit widths filled with an arbitrary pattern.
DeviceFingerprints schedule_device(Modality m, const std::vector<double>& starts,
                                   const std::vector<bool>& accepted) {
    REQUIRE(starts.size() == accepted.size());
    DeviceFingerprints d;
    d.car = 1;
    Rng rng(99);
    for (size_t i = 0; i < starts.size(); i++) {
        WindowPrint wp;
        wp.start_time = starts[i];
        wp.accepted = accepted[i];
        wp.print = random_print(m, starts[i], rng);
        d.prints[size_t(m)].push_back(std::move(wp));
    }
    return d;
}

}  // namespace

TEST_CASE("generator repeats bit for bit and shares car latents") {
    auto a = generate_synthetic_context(7, Scenario::City, 2, 1, 60.0);
    auto b = generate_synthetic_context(7, Scenario::City, 2, 1, 60.0);
    REQUIRE(a.devices.size() == 3);
    for (size_t d = 0; d < a.devices.size(); d++) {
        CHECK(a.devices[d].accel.z == b.devices[d].accel.z);
        CHECK(a.devices[d].accel.x == b.devices[d].accel.x);
        CHECK(a.devices[d].gyro.z == b.devices[d].gyro.z);
        CHECK(a.devices[d].baro.x == b.devices[d].baro.x);
    }

    SECTION("zero sensor noise makes same-car devices identical") {
        GeneratorConfig quiet = scenario_defaults(Scenario::City);
        quiet.accel_noise = quiet.gyro_noise = quiet.baro_noise = 0.0;
        auto ctx = generate_synthetic_context(7, Scenario::City, 2, 1, 60.0, &quiet);
        CHECK(ctx.devices[0].accel.z == ctx.devices[1].accel.z);
        CHECK(ctx.devices[0].accel.x == ctx.devices[1].accel.x);
        CHECK(ctx.devices[0].accel.y == ctx.devices[1].accel.y);
        CHECK(ctx.devices[0].gyro.z == ctx.devices[1].gyro.z);
        CHECK(ctx.devices[0].baro.x == ctx.devices[1].baro.x);
        CHECK(ctx.devices[0].accel.z != ctx.devices[2].accel.z);
    }

    SECTION("mounting spot attenuation scales the shared part") {
        GeneratorConfig quiet = scenario_defaults(Scenario::City);
        quiet.accel_noise = quiet.gyro_noise = quiet.baro_noise = 0.0;
        quiet.attenuation = {1.0, 0.5};
        auto ctx = generate_synthetic_context(7, Scenario::City, 2, 0, 60.0, &quiet);
        const auto& z0 = ctx.devices[0].accel.z;
        const auto& z1 = ctx.devices[1].accel.z;
        for (size_t i = 0; i < z0.size(); i += 97)
            CHECK(z1[i] - 9.81 == Catch::Approx(0.5 * (z0[i] - 9.81)).margin(1e-12));
        const auto& g0 = ctx.devices[0].gyro.z;
        const auto& g1 = ctx.devices[1].gyro.z;
        for (size_t i = 0; i < g0.size(); i += 97)
            CHECK(g1[i] == Catch::Approx(0.5 * g0[i]).margin(1e-12));
    }

    SECTION("config text round trips through the parser") {
        GeneratorConfig c = scenario_defaults(Scenario::Parking);
        c.attenuation = {1.0, 0.8, 0.9};
        std::istringstream in(generator_config_text(c));
        auto parsed = parse_config_text(in);
        REQUIRE(parsed.ok());
        GeneratorConfig back = generator_config_from_map(parsed.value());
        CHECK(back.scenario == Scenario::Parking);
        CHECK(back.turn_rate == Catch::Approx(c.turn_rate));
        CHECK(back.altitude_amplitude == Catch::Approx(c.altitude_amplitude));
        CHECK(back.attenuation == c.attenuation);
    }
}

TEST_CASE("colocated devices correlate more than cross-car pairs") {
    double co[4] = {0, 0, 0, 0}, cross[4] = {0, 0, 0, 0};
    const int seeds = 20;
    for (int seed = 0; seed < seeds; seed++) {
        auto ctx = generate_synthetic_context(uint64_t(seed), Scenario::City, 2, 1, 120.0);
        const auto& d0 = ctx.devices[0];
        const auto& d1 = ctx.devices[1];
        const auto& e0 = ctx.devices[2];
        const std::vector<double>* ch0[4] = {&d0.accel.z, &d0.accel.x, &d0.gyro.z, &d0.baro.x};
        const std::vector<double>* ch1[4] = {&d1.accel.z, &d1.accel.x, &d1.gyro.z, &d1.baro.x};
        const std::vector<double>* chx[4] = {&e0.accel.z, &e0.accel.x, &e0.gyro.z, &e0.baro.x};
        for (int c = 0; c < 4; c++) {
            co[c] += pearson(*ch0[c], *ch1[c]);
            cross[c] += pearson(*ch0[c], *chx[c]);
        }
    }
    for (int c = 0; c < 4; c++) {
        INFO("channel " << c << " colocated " << co[c] / seeds << " cross " << cross[c] / seeds);
        CHECK(co[c] / seeds > cross[c] / seeds);
        CHECK(co[c] / seeds > 0.5);
    }
}

TEST_CASE("identical streams pair with unit TAR") {
    auto ctx = generate_synthetic_context(3, Scenario::City, 1, 0, 300.0);
    auto twin = ctx.devices[0];
    twin.spot = 1;
    ctx.devices.push_back(twin);
    auto prints = run_pipeline(ctx);
    auto rep = compute_tar_far(prints, TrialParams{});
    REQUIRE(rep.ok());
    CHECK(rep.value().colocated_trials >= 20);
    CHECK(rep.value().cross_trials == 0);
    CHECK(rep.value().tar == 1.0);
}

TEST_CASE("fused synthetic pairing beats chance by a wide margin") {
    auto ctx = generate_synthetic_context(11, Scenario::City, 2, 2, 900.0);
    auto prints = run_pipeline(ctx);
    TrialParams params;
    params.collect_trials = true;
    auto rep = compute_tar_far(prints, params);
    REQUIRE(rep.ok());
    const auto& r = rep.value();
    INFO("tar " << r.tar << " over " << r.colocated_trials << ", far " << r.far << " over "
                << r.cross_trials);
    CHECK(r.colocated_trials + r.cross_trials >= 200);
    CHECK(r.tar > r.far);
    CHECK(r.tar >= 0.85);
    CHECK(r.far <= 0.005);
    for (const auto& t : r.trials) {
        const Ratio thr = Ratio(61, 76);
        CHECK(t.accepted == (t.similarity.num * thr.den >= thr.num * t.similarity.den));
    }
}

TEST_CASE("independent coin-flip fingerprints land on the binomial tail") {
    Rng rng(20240817);
    const size_t epochs = 100000;
    std::vector<DeviceFingerprints> devs;
    devs.push_back(coin_flip_device(1, 0, Modality::Gyr, epochs, rng));
    devs.push_back(coin_flip_device(2, 0, Modality::Gyr, epochs, rng));
    TrialParams params;
    params.sensors = {Modality::Gyr};
    auto rep = compute_tar_far(devs, params);
    REQUIRE(rep.ok());
    CHECK(rep.value().colocated_trials == 0);
    REQUIRE(rep.value().cross_trials == (long long)epochs);
    const double p = 17.0 / 65536.0;  // exact tail of >= 15 of 16 matches
    const double sigma = std::sqrt(p * (1 - p) / double(epochs));
    INFO("far " << rep.value().far << " expected " << p << " sigma " << sigma);
    CHECK(std::fabs(rep.value().far - p) <= 3.0 * sigma);
}

TEST_CASE("raising the fused threshold never raises acceptance") {
    auto ctx = generate_synthetic_context(5, Scenario::City, 2, 2, 420.0);
    auto prints = run_pipeline(ctx);
    double last_tar = 1.0, last_far = 1.0;
    for (long long num = 56; num <= 68; num += 2) {
        TrialParams params;
        params.threshold_override = Ratio(num, 76);
        auto rep = compute_tar_far(prints, params);
        REQUIRE(rep.ok());
        CHECK(rep.value().tar <= last_tar);
        CHECK(rep.value().far <= last_far);
        last_tar = rep.value().tar;
        last_far = rep.value().far;
    }
}

TEST_CASE("no aligned windows reports NoData") {
    std::vector<DeviceFingerprints> devs(2);
    devs[0].car = 1;
    devs[1].car = 2;
    CHECK_FALSE(compute_tar_far(devs, TrialParams{}).ok());
    Rng rng(1);
    devs[0] = coin_flip_device(1, 0, Modality::Acv, 4, rng);
    devs[1] = coin_flip_device(2, 0, Modality::Gyr, 4, rng);  // disjoint sensors
    auto rep = compute_tar_far(devs, TrialParams{});
    REQUIRE_FALSE(rep.ok());
    CHECK(rep.error() == HarnessError::NoData);
}

TEST_CASE("attack strength orders as oracle, replay, injection across seeds") {
    struct Tally {
        long long trials = 0, accepts = 0;
        double far() const { return trials ? double(accepts) / double(trials) : 0.0; }
        void add(const AttackReport& r) {
            trials += r.trials;
            accepts += r.accepts;
        }
    };
    Tally inj_v, rep_v, sim_v, rep_vh, rep_vhg, rep_all;

    for (uint64_t seed = 100; seed < 120; seed++) {
        auto ctx = generate_synthetic_context(seed, Scenario::City, 2, 2, 240.0);
        auto prints = run_pipeline(ctx);
        std::vector<DeviceFingerprints> victims{prints[0], prints[1]};
        std::vector<DeviceFingerprints> replayers{prints[2], prints[3]};

        auto noise = generate_noise_profile(seed + 5000, ctx.config, 240.0);
        auto nch = process_device(noise);
        REQUIRE(nch.ok());
        std::vector<DeviceFingerprints> injectors{
            fingerprint_device(nch.value(), WindowSchedule{}, ActivityThresholds{})};

        AttackSpec inj;
        inj.kind = AttackKind::Injection;
        inj.seed = seed;
        AttackSpec rep;
        rep.kind = AttackKind::Replay;
        rep.seed = seed;
        AttackSpec sim;
        sim.kind = AttackKind::SimilarContext;
        sim.alignment = AttackAlignment::BestMatchSingleSensor;
        sim.oracle_sensor = Modality::Acv;
        sim.seed = seed;

        TrialParams v;
        v.sensors = {Modality::Acv};
        auto r1 = run_attack(inj, victims, injectors, v);
        auto r2 = run_attack(rep, victims, replayers, v);
        auto r3 = run_attack(sim, victims, replayers, v);
        REQUIRE(r1.ok());
        REQUIRE(r2.ok());
        REQUIRE(r3.ok());
        inj_v.add(r1.value());
        rep_v.add(r2.value());
        sim_v.add(r3.value());

        TrialParams vh;
        vh.sensors = {Modality::Acv, Modality::Ach};
        TrialParams vhg;
        vhg.sensors = {Modality::Acv, Modality::Ach, Modality::Gyr};
        TrialParams all;
        auto r4 = run_attack(rep, victims, replayers, vh);
        auto r5 = run_attack(rep, victims, replayers, vhg);
        auto r6 = run_attack(rep, victims, replayers, all);
        REQUIRE(r4.ok());
        REQUIRE(r5.ok());
        REQUIRE(r6.ok());
        rep_vh.add(r4.value());
        rep_vhg.add(r5.value());
        rep_all.add(r6.value());
    }

    INFO("single-sensor FARs: oracle " << sim_v.far() << " replay " << rep_v.far() << " injection "
                                       << inj_v.far());
    CHECK(sim_v.trials >= 1000);
    CHECK(rep_v.trials >= 1000);
    CHECK(inj_v.trials >= 1000);
    CHECK(sim_v.far() >= rep_v.far());
    CHECK(rep_v.far() >= inj_v.far());
    CHECK(sim_v.far() >= 0.3);

    INFO("replay FARs by sensor count: " << rep_v.far() << " " << rep_vh.far() << " "
                                         << rep_vhg.far() << " " << rep_all.far());
    CHECK(rep_v.far() >= rep_vh.far());
    CHECK(rep_vh.far() >= rep_vhg.far());
    CHECK(rep_vhg.far() >= rep_all.far());
}

TEST_CASE("single sensor oracle lifts every modality above the floor") {
    auto ctx = generate_synthetic_context(21, Scenario::City, 2, 2, 600.0);
    auto prints = run_pipeline(ctx);
    std::vector<DeviceFingerprints> victims{prints[0], prints[1]};
    std::vector<DeviceFingerprints> advs{prints[2], prints[3]};
    for (int mi = 0; mi < 4; mi++) {
        AttackSpec spec;
        spec.kind = AttackKind::SimilarContext;
        spec.alignment = AttackAlignment::BestMatchSingleSensor;
        spec.oracle_sensor = Modality(mi);
        spec.seed = 50 + uint64_t(mi);
        TrialParams params;
        params.sensors = {Modality(mi)};
        auto rep = run_attack(spec, victims, advs, params);
        REQUIRE(rep.ok());
        INFO("sensor " << modality_name(Modality(mi)) << " far " << rep.value().far << " over "
                       << rep.value().trials);
        CHECK(rep.value().trials >= 100);
        CHECK(rep.value().far >= 0.3);
    }
}

TEST_CASE("best-match alignment is reserved for the similar-context oracle") {
    AttackSpec bad;
    bad.kind = AttackKind::Replay;
    bad.alignment = AttackAlignment::BestMatchSingleSensor;
    CHECK_FALSE(attack_spec_valid(bad));
    bad.kind = AttackKind::SimilarContext;
    CHECK(attack_spec_valid(bad));

    Rng rng(2);
    std::vector<DeviceFingerprints> a{coin_flip_device(1, 0, Modality::Acv, 4, rng)};
    std::vector<DeviceFingerprints> b{coin_flip_device(2, 0, Modality::Acv, 4, rng)};
    AttackSpec invalid;
    invalid.kind = AttackKind::Injection;
    invalid.alignment = AttackAlignment::BestMatchSingleSensor;
    TrialParams acv_only;
    acv_only.sensors = {Modality::Acv};
    CHECK_FALSE(run_attack(invalid, a, b, acv_only).ok());
}

TEST_CASE("pairing time accounting matches the closed form") {
    std::vector<double> starts;
    for (int i = 0; i < 10; i++) starts.push_back(10.0 * i);
    auto dev = schedule_device(Modality::Acv, starts, std::vector<bool>(10, true));

    SECTION("non-overlapping all-accepted equals the calculator") {
        auto t = accumulate_pairing_time(dev, {Modality::Acv}, 140);
        REQUIRE(t.ok());
        CHECK(t.value() == 60.0);
        CHECK(t.value() == double(pairing_time_seconds(140, 24, 10)));
    }

    SECTION("overlapping schedule is at least as fast") {
        std::vector<double> dense;
        for (int i = 0; i < 19; i++) dense.push_back(5.0 * i);
        auto fast = schedule_device(Modality::Acv, dense, std::vector<bool>(19, true));
        auto t = accumulate_pairing_time(fast, {Modality::Acv}, 140);
        REQUIRE(t.ok());
        CHECK(t.value() == 35.0);
        CHECK(t.value() <= 60.0);
    }

    SECTION("rejected windows never pay out") {
        auto idle = schedule_device(Modality::Acv, starts, std::vector<bool>(10, false));
        auto t = accumulate_pairing_time(idle, {Modality::Acv}, 24);
        REQUIRE_FALSE(t.ok());
        CHECK(t.error().bits_accumulated == 0);
        CHECK(t.error().elapsed == 100.0);
    }

    SECTION("running dry reports the partial tally") {
        auto t = accumulate_pairing_time(dev, {Modality::Acv}, 1000);
        REQUIRE_FALSE(t.ok());
        CHECK(t.error().bits_accumulated == 240);
        CHECK(t.error().elapsed == 100.0);
    }

    SECTION("mixed window lengths settle in completion order") {
        DeviceFingerprints mixed = schedule_device(Modality::Acv, {0.0, 10.0}, {true, true});
        Rng rng(7);
        WindowPrint bar;
        bar.start_time = 0.0;
        bar.accepted = true;
        bar.print = random_print(Modality::Bar, 0.0, rng);
        mixed.prints[size_t(Modality::Bar)].push_back(bar);
        auto t = accumulate_pairing_time(mixed, {Modality::Acv, Modality::Bar}, 50);
        REQUIRE(t.ok());
        CHECK(t.value() == 20.0);
    }

    SECTION("zero requirement is free") {
        auto t = accumulate_pairing_time(dev, {Modality::Acv}, 0);
        REQUIRE(t.ok());
        CHECK(t.value() == 0.0);
    }
}

TEST_CASE("chi-square survival matches reference values") {
    CHECK(detail::chi_square_survival(18.307, 10) == Catch::Approx(0.050001).margin(1e-6));
    CHECK(detail::chi_square_survival(3.841, 1) == Catch::Approx(0.050014).margin(1e-6));
    CHECK(detail::chi_square_survival(11.07, 5) == Catch::Approx(0.050010).margin(1e-6));
    CHECK(detail::chi_square_survival(65.0, 48) == Catch::Approx(0.051487).margin(1e-6));
    CHECK(detail::chi_square_survival(0.0, 10) == 1.0);
}

TEST_CASE("entropy analysis reads a fair source as fair") {
    Rng rng(4242);
    std::vector<std::vector<uint8_t>> corpus;
    for (int i = 0; i < 10000; i++) {
        std::vector<uint8_t> fp(48);
        for (auto& b : fp) b = uint8_t(rng.u64() & 1);
        corpus.push_back(std::move(fp));
    }
    auto rep = entropy_analysis(corpus);
    REQUIRE(rep.ok());
    const auto& r = rep.value();
    CHECK(r.corpus_size == 10000);
    CHECK(r.fingerprint_bits == 48);
    CHECK(r.markov_p01 == Catch::Approx(0.5).margin(0.02));
    CHECK(r.markov_p11 == Catch::Approx(0.5).margin(0.02));
    CHECK(r.chi_p_value > 0.01);
    CHECK(r.mcv_min_entropy > 0.98);
    CHECK(r.markov_min_entropy > 0.95);
    CHECK(r.mcv_min_entropy <= 1.0);
    CHECK(r.markov_min_entropy <= 1.0);
    long long walked = 0;
    for (const auto& [pos, count] : r.walk_positions) {
        CHECK((pos + 48) % 2 == 0);
        walked += count;
    }
    CHECK(walked == 10000);
}

TEST_CASE("degenerate corpora collapse to zero entropy") {
    SECTION("all zeros") {
        std::vector<std::vector<uint8_t>> corpus(100, std::vector<uint8_t>(48, 0));
        auto rep = entropy_analysis(corpus);
        REQUIRE(rep.ok());
        CHECK(rep.value().mcv_min_entropy == 0.0);
        CHECK(rep.value().markov_min_entropy == 0.0);
        CHECK(rep.value().markov_p01 == 0.0);
        CHECK(rep.value().markov_p11 == 0.0);
        REQUIRE(rep.value().walk_positions.size() == 1);
        CHECK(rep.value().walk_positions.at(-48) == 100);
        CHECK(rep.value().chi_p_value < 0.01);
    }

    SECTION("alternating bits") {
        std::vector<std::vector<uint8_t>> corpus;
        for (int i = 0; i < 100; i++) {
            std::vector<uint8_t> fp(48);
            for (int j = 0; j < 48; j++) fp[size_t(j)] = uint8_t((j + i) % 2);
            corpus.push_back(std::move(fp));
        }
        auto rep = entropy_analysis(corpus);
        REQUIRE(rep.ok());
        CHECK(rep.value().markov_p01 == 1.0);
        CHECK(rep.value().markov_p11 == 0.0);
        REQUIRE(rep.value().walk_positions.size() == 1);
        CHECK(rep.value().walk_positions.at(0) == 100);
        CHECK(rep.value().markov_min_entropy == Catch::Approx(1.0 / 48.0).margin(1e-12));
        CHECK(rep.value().markov_min_entropy < 0.05);
        CHECK(rep.value().mcv_min_entropy == 1.0);
    }

    SECTION("too small or ragged") {
        std::vector<std::vector<uint8_t>> corpus(99, std::vector<uint8_t>(48, 1));
        auto rep = entropy_analysis(corpus);
        REQUIRE_FALSE(rep.ok());
        CHECK(rep.error() == HarnessError::InsufficientCorpus);
        corpus.assign(100, std::vector<uint8_t>(48, 1));
        corpus[50].resize(47);
        CHECK_FALSE(entropy_analysis(corpus).ok());
    }
}

TEST_CASE("fingerprint corpora round trip through the dump format") {
    Rng rng(31337);
    std::vector<Fingerprint> corpus;
    for (int i = 0; i < 5; i++) {
        auto v = random_print(Modality::Acv, 5.0 * i, rng);
        auto h = random_print(Modality::Ach, 5.0 * i, rng);
        auto fused = fuse({v, h});
        REQUIRE(fused.ok());
        corpus.push_back(fused.value());
    }
    corpus.push_back(random_print(Modality::Gyr, 123.456, rng));

    std::stringstream buf;
    write_fingerprint_corpus(buf, corpus);
    auto back = read_fingerprint_corpus(buf);
    REQUIRE(back.size() == corpus.size());
    for (size_t i = 0; i < corpus.size(); i++) {
        CHECK(back[i].bits == corpus[i].bits);
        CHECK(back[i].modality_string() == corpus[i].modality_string());
        CHECK(back[i].start_time == Catch::Approx(corpus[i].start_time).margin(1e-3));
    }
}

TEST_CASE("full protocol sessions agree with the threshold predicate") {
    auto ctx = generate_synthetic_context(31, Scenario::City, 2, 0, 420.0);
    auto prints = run_pipeline(ctx);
    auto idx0 = detail::index_windows(prints[0], true);
    auto idx1 = detail::index_windows(prints[1], true);

    const std::vector<Modality> vh = {Modality::Acv, Modality::Ach};
    std::vector<std::pair<Fingerprint, Fingerprint>> pairs;
    std::vector<Fingerprint> lefts;
    for (const auto& [key, wp] : idx0[size_t(Modality::Acv)]) {
        auto fa = detail::fused_at(idx0, vh, key);
        auto fb = detail::fused_at(idx1, vh, key);
        if (!fa || !fb) continue;
        pairs.push_back({*fa, *fb});
        lefts.push_back(*fa);
        if (pairs.size() >= 24) break;
    }
    REQUIRE(pairs.size() >= 12);
    // shifted pairs exercise the reject side
    for (size_t i = 0; i + 6 < lefts.size(); i++) pairs.push_back({lefts[i], lefts[i + 6]});

    auto rep = full_protocol_spot_check(pairs, 3.0, 777);
    CHECK(rep.trials == (long long)pairs.size());
    CHECK(rep.disagreements == 0);
    CHECK(rep.session_accepts == rep.predicate_accepts);
    CHECK(rep.predicate_accepts >= 10);
    CHECK(rep.predicate_accepts < rep.trials);
}
