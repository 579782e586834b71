// Acceptance checks. One PASS/FAIL line per criterion; `--only N` runs one.

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "support/oracles.hpp"
#include "support/run_process.hpp"
#include "support/synthetic_dataset.hpp"

using namespace touchtrack;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kRuntimeC1 = 30.0;
constexpr double kDepthTol = 0.25e-3;
constexpr double kAreaTarget = 28.3;
constexpr double kAreaRelTol = 0.15;
constexpr double kVelocityIdentityTol = 1e-6;
constexpr double kOrthonormalTol = 1e-9;
constexpr double kVelocityErrTol = 2.0;
constexpr double kShakeErrTol = 5.0;
constexpr double kRuntimeC5 = 60.0;
constexpr double kDurationFrames = 2.0;
constexpr double kDtwTol = 1e-9;
constexpr double kPValueTol = 1e-12;
constexpr double kFdrAlpha = 0.05;
constexpr double kFdrSlack = 0.02;
constexpr double kAccuracyBar = 0.90;
constexpr double kShuffledLow = 0.15;
constexpr double kShuffledHigh = 0.35;
constexpr double kRuntimeC9 = 120.0;
constexpr int kImportanceSeeds = 50;
constexpr int kImportanceNeeded = 45;
constexpr double kSegmentationBar = 0.95;
constexpr double kSimNoiseMm = 0.2;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof buf, f, args);
    va_end(args);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

PointCloud flat_grid(double spacing, int n) {
    PointCloud c;
    const double half = spacing * (n - 1) / 2.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) c.points.emplace_back(spacing * i - half, spacing * j - half, 0.0);
    c.normals = std::vector<UnitVector3>(c.size(), UnitVector3::normalized({0, 0, 1}));
    return c;
}

bool same_contact(const ContactFrame& a, const ContactFrame& b) {
    return a.contact == b.contact && a.contacted_hand_indices == b.contacted_hand_indices &&
           a.matched_arm_indices == b.matched_arm_indices && a.contacted_arm_indices == b.contacted_arm_indices &&
           a.depth == b.depth && a.area == b.area;
}

// ---- 1: indexed contact engine against brute force ----
Outcome c01() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::size_t configs = 0;
    std::size_t mismatches = 0;
    std::size_t frames_in_contact = 0;
    for (int trial = 0; trial < 150; ++trial) {
        PointCloud arm;
        std::vector<UnitVector3> normals;
        const std::size_t n = 20 + rng() % 981;
        const double bump = 0.03 * u(rng);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = 0.05 * u(rng);
            const double y = 0.05 * u(rng);
            const double z = bump * std::cos(40 * x) * std::cos(30 * y) + 0.0005 * u(rng);
            arm.points.emplace_back(x, y, z);
            if (trial % 10 == 0) {
                normals.push_back(UnitVector3::normalized({u(rng), u(rng), u(rng) + 1.5}));
            } else {
                normals.push_back(UnitVector3::normalized({40 * bump * std::sin(40 * x) * std::cos(30 * y),
                                                           30 * bump * std::cos(40 * x) * std::sin(30 * y), 1.0}));
            }
        }
        // Occasional duplicate arm points exercise tie-breaking.
        if (trial % 7 == 0) arm.points[n / 2] = arm.points[n / 3];
        arm.normals = normals;
        const PreparedArm prepared(arm);
        const double mnd_ref = oracle::mean_neighbor_distance(arm.points);
        if (prepared.mean_neighbor_distance() != mnd_ref) ++mismatches;
        HandFrame hand;
        const std::size_t m = 1 + rng() % 200;
        const double height = 0.02 * u(rng);
        for (std::size_t i = 0; i < m; ++i) hand.vertices.emplace_back(0.05 * u(rng), 0.05 * u(rng), height + 0.01 * u(rng));
        const ContactFrame got = detect_contact(hand, prepared);
        const ContactFrame want = oracle::contact(hand, arm, mnd_ref);
        if (!same_contact(got, want)) ++mismatches;
        frames_in_contact += got.contact ? 1 : 0;
        ++configs;
    }
    const double secs = seconds_since(t0);
    return {mismatches == 0 && configs >= 100 && secs < kRuntimeC1,
            fmt("%zu configs, %zu in contact, %zu mismatches, %.1f s (limit %.0f s)", configs, frames_in_contact,
                mismatches, secs, kRuntimeC1)};
}

// ---- 2: depth on a flat plane ----
Outcome c02() {
    const PreparedArm arm(flat_grid(0.0005, 161));
    std::string detail;
    bool pass = true;
    for (double delta_mm : {2.0, 5.0, 10.0}) {
        HandFrame hand;
        // 2 mm patch lattice, deliberately off the arm grid.
        for (int j = -5; j <= 5; ++j)
            for (int i = -5; i <= 5; ++i) hand.vertices.emplace_back(0.002 * i + 0.00013, 0.002 * j - 0.00021, -delta_mm * 1e-3);
        const ContactFrame f = detect_contact(hand, arm);
        const double err = f.depth - delta_mm * 1e-3 / 2.0;
        pass = pass && f.contact && std::abs(err) <= kDepthTol;
        detail += fmt("delta %.0f mm -> %.4f mm; ", delta_mm, f.depth * 1e3);
    }
    return {pass, detail + fmt("tolerance %.2f mm", kDepthTol * 1e3)};
}

// ---- 3: area of a 3 cm disk footprint ----
Outcome c03() {
    const PreparedArm arm(flat_grid(0.001, 101));
    auto disk_area = [&](double spacing) {
        HandFrame hand;
        const int r = static_cast<int>(std::lround(0.03 / spacing));
        for (int j = -r; j <= r; ++j)
            for (int i = -r; i <= r; ++i)
                if (i * i + j * j <= r * r) hand.vertices.emplace_back(spacing * i, spacing * j, -0.003);
        const ContactFrame f = detect_contact(hand, arm);
        return std::make_pair(f.area * kCm2PerM2, f.contacted_arm_indices.size());
    };
    // Simulator hand lattice spacing, then a hand as dense as the arm.
    const auto [area, points] = disk_area(GestureSpec{}.patch_spacing);
    const auto [dense_area, dense_points] = disk_area(arm.mean_neighbor_distance());
    const double rel = area / kAreaTarget - 1.0;
    return {std::abs(rel) <= kAreaRelTol,
            fmt("2 mm patch: %zu arm pts -> %.2f cm^2 (%+.1f%%, limit %.0f%%); 1 mm patch: %zu pts -> %.2f cm^2 (%+.1f%%)",
                points, area, 100 * rel, 100 * kAreaRelTol, dense_points, dense_area,
                100 * (dense_area / kAreaTarget - 1.0))};
}

// ---- 4: velocity identity and basis orthonormality ----
Outcome c04() {
    double worst_identity = 0.0;
    std::size_t frames = 0;
    const auto trials = testkit::simulate_trials(5, 404);
    for (const auto& t : trials) {
        for (const auto& r : t.series.records) {
            const double lhs = r.v_lg * r.v_lg + r.v_lt * r.v_lt + r.v_vt * r.v_vt;
            worst_identity = std::max(worst_identity, std::abs(lhs - r.v_abs * r.v_abs));
            ++frames;
        }
    }
    double worst_basis = 0.0;
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g;
    std::vector<ArmBasis> bases{synthetic_arm_basis()};
    while (bases.size() < 1000) {
        const Vector3 vt(g(rng), g(rng), g(rng));
        const Vector3 y(g(rng), g(rng), g(rng));
        if (std::abs(vt.normalized().dot(y.normalized())) > 0.99) continue;
        bases.push_back(build_arm_basis(UnitVector3::normalized(vt), UnitVector3::normalized(y)));
    }
    for (const auto& b : bases) {
        const Vector3 e[3] = {b.vertical.vec(), b.longitudinal.vec(), b.lateral.vec()};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) worst_basis = std::max(worst_basis, std::abs(e[i].dot(e[j]) - (i == j ? 1.0 : 0.0)));
    }
    return {worst_identity <= kVelocityIdentityTol && worst_basis <= kOrthonormalTol,
            fmt("%zu frames, max identity residual %.2e (cm/s)^2; %zu bases, max orthonormality residual %.2e",
                frames, worst_identity, bases.size(), worst_basis)};
}

// ---- 5: velocity error against the simulator ----
Outcome c05() {
    const auto t0 = std::chrono::steady_clock::now();
    const SyntheticArm arm;
    const PreparedArm prepared(make_arm(arm));
    const ArmBasis basis = synthetic_arm_basis();
    struct Case {
        std::string name;
        GestureSpec spec;
        double limit;
    };
    std::vector<Case> cases;
    std::uint64_t seed = 500;
    for (double speed : {3.0, 10.0, 25.0}) {
        for (StrokeDirection dir : {StrokeDirection::longitudinal, StrokeDirection::lateral}) {
            GestureSpec g;
            g.speed_cm_s = speed;
            g.direction = dir;
            const double max_leg = dir == StrokeDirection::longitudinal ? 0.2 : 0.025;
            g.repetitions = static_cast<std::size_t>(std::ceil(speed / 100.0 * g.duration_s / max_leg));
            g.seed = ++seed;
            cases.push_back({fmt("stroke-%s-%.0f", dir == StrokeDirection::longitudinal ? "lg" : "lt", speed), g,
                             kVelocityErrTol});
        }
    }
    GestureSpec tap;
    tap.kind = GestureKind::tap;
    tap.depth_mm = 5.0;
    tap.repetitions = 4;
    tap.duration_s = 2.4;
    tap.seed = ++seed;
    cases.push_back({"tap", tap, kVelocityErrTol});
    GestureSpec hold;
    hold.kind = GestureKind::hold;
    hold.seed = ++seed;
    cases.push_back({"hold", hold, kVelocityErrTol});
    GestureSpec shake;
    shake.kind = GestureKind::shake;
    shake.depth_mm = 8.0;
    shake.seed = ++seed;
    cases.push_back({"shake", shake, kShakeErrTol});

    bool pass = true;
    std::string detail;
    for (auto& c : cases) {
        c.spec.noise_mm = kSimNoiseMm;
        const auto gen = generate_gesture(arm, c.spec);
        const auto series = build_series(gen.frames, prepared, basis);
        const OracleReport rep = oracle_compare(series, gen.truth, basis);
        const double err = rep.max_velocity_mean_abs();
        pass = pass && rep.compared_frames > 0 && err <= c.limit;
        detail += fmt("%s %.2f; ", c.name.c_str(), err);
    }
    const double secs = seconds_since(t0);
    pass = pass && secs < kRuntimeC5;
    return {pass, detail + fmt("cm/s, limits %.0f/%.0f, %.1f s", kVelocityErrTol, kShakeErrTol, secs)};
}

// ---- 6: contact duration and episodes ----
Outcome c06() {
    std::mt19937_64 rng(606);
    std::size_t mismatches = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<bool> flags(1 + rng() % 300);
        std::size_t count = 0;
        for (std::size_t i = 0; i < flags.size(); ++i) {
            flags[i] = rng() % 2 == 0;
            count += flags[i];
        }
        const double f = 10.0 + static_cast<double>(rng() % 110);
        if (contact_duration(flags, f) != static_cast<double>(count) / f) ++mismatches;
    }
    GestureSpec g;
    g.kind = GestureKind::tap;
    g.depth_mm = 5.0;
    g.speed_cm_s = 10.0;
    g.duration_s = 2.4;
    g.repetitions = 4;
    g.noise_mm = kSimNoiseMm;
    g.seed = 66;
    const SyntheticArm arm;
    const auto gen = generate_gesture(arm, g);
    const auto series = build_series(gen.frames, PreparedArm(make_arm(arm)), synthetic_arm_basis());
    const std::size_t episodes = count_episodes(series.contact_flags());
    const double tol = kDurationFrames / g.frame_rate;
    const double err = series.duration - gen.truth.duration_s;
    return {mismatches == 0 && episodes == 4 && std::abs(err) <= tol,
            fmt("1000 flag sequences, %zu mismatches; tap trial %zu episodes, duration %.4f s vs %.4f s (tol %.4f s)",
                mismatches, episodes, series.duration, gen.truth.duration_s, tol)};
}

// ---- 7: DTW ----
Outcome c07() {
    std::mt19937_64 rng(707);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    std::size_t bad = 0;
    std::size_t self_bad = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> a(1 + rng() % 8);
        std::vector<double> b(1 + rng() % 8);
        for (auto& v : a) v = u(rng);
        for (auto& v : b) v = u(rng);
        const double diff = std::abs(dtw_align(a, b).cost - oracle::dtw_cost(a, b));
        worst = std::max(worst, diff);
        bad += diff > kDtwTol ? 1 : 0;
        self_bad += dtw_align(a, a).cost != 0.0 ? 1 : 0;
    }
    return {bad == 0 && self_bad == 0,
            fmt("200 pairs, max |cost - enumeration| %.2e, %zu self-alignments nonzero", worst, self_bad)};
}

// ---- 8: Mann-Whitney, BH step-up, BH false selection ----
Outcome c08() {
    std::mt19937_64 rng(808);
    std::size_t pairs = 0;
    std::size_t mw_bad = 0;
    for (std::size_t na = 1; na < 10; ++na) {
        for (std::size_t nb = 1; na + nb <= 10; ++nb) {
            ++pairs;
            for (int rep = 0; rep < 5; ++rep) {
                std::vector<double> a(na);
                std::vector<double> b(nb);
                const std::uint64_t levels = rep < 2 ? 4 : 1000;
                for (auto& v : a) v = static_cast<double>(rng() % levels);
                for (auto& v : b) v = static_cast<double>(rng() % levels) + (rep == 4 ? 2.0 : 0.0);
                const auto got = mann_whitney_u(a, b);
                const auto want = oracle::mann_whitney(a, b);
                if (got.u != want.u || std::abs(got.p_value - want.p_value) > kPValueTol) ++mw_bad;
            }
        }
    }

    struct Fixed {
        std::vector<double> p;
        std::vector<std::size_t> selected;
    };
    const std::vector<Fixed> fixed{
        {{0.001, 0.2, 0.3, 0.4, 0.5}, {0}},
        {{0.5, 0.4, 0.3, 0.2, 0.001}, {4}},
        {{0.01, 0.02, 0.03, 0.04, 0.05}, {0, 1, 2, 3, 4}},
        {{0.011, 0.02, 0.03, 0.04, 0.05}, {0, 1, 2, 3, 4}},
        {{0.06, 0.07, 0.08, 0.09, 0.1}, {}},
        {{0.011, 0.021, 0.031, 0.041, 0.051}, {}},
        {{0.009, 0.021, 0.031, 0.041, 0.051}, {0}},
        {{0.03, 0.03, 0.03, 0.2, 0.3}, {0, 1, 2}},
        {{0.04, 0.04, 0.04, 0.04, 0.9}, {0, 1, 2, 3}},
        {{0.2, 0.015, 0.9, 0.019, 0.6}, {1, 3}},
        {{0.0, 1.0, 0.0, 1.0, 0.5}, {0, 2}},
        {{0.05}, {0}},
        {{0.0500001}, {}},
        {{0.03, 0.04}, {0, 1}},
        {{0.02, 0.06}, {0}},
        {{0.026, 0.051}, {}},
        {{0.05, 0.05, 0.05, 0.05}, {0, 1, 2, 3}},
        {{0.013, 0.026, 0.038, 0.051}, {}},
        {{0.012, 0.026, 0.038, 0.051}, {0}},
        {{0.001, 0.008, 0.012, 0.019, 0.024, 0.5, 0.6, 0.7, 0.8, 0.9}, {0, 1, 2, 3, 4}},
    };
    std::size_t bh_bad = 0;
    for (const auto& f : fixed) bh_bad += benjamini_hochberg(f.p, kFdrAlpha) != f.selected ? 1 : 0;

    // Pure-noise datasets: every selection is false, so the false discovery
    // proportion is 1 whenever anything is selected.
    std::normal_distribution<double> g;
    std::size_t with_false = 0;
    std::size_t false_total = 0;
    const std::size_t datasets = 200;
    const std::size_t features = 20;
    for (std::size_t d = 0; d < datasets; ++d) {
        LabeledDataset ds;
        std::vector<std::string> names;
        for (std::size_t j = 0; j < features; ++j) names.push_back("f" + std::to_string(j));
        for (int i = 0; i < 30; ++i) {
            std::vector<double> row;
            for (std::size_t j = 0; j < features; ++j) row.push_back(g(rng));
            ds.add({names, row}, i % 2 ? "a" : "b");
        }
        const FeatureSelection sel = select_features(ds, kFdrAlpha);
        if (!sel.fallback) {
            ++with_false;
            false_total += sel.indices.size();
        }
    }
    const double fdr = static_cast<double>(with_false) / static_cast<double>(datasets);
    return {mw_bad == 0 && bh_bad == 0 && fdr <= kFdrAlpha + kFdrSlack,
            fmt("MW: %zu size pairs x5, %zu mismatches; BH: %zu/20 fixed vectors wrong; noise FDR %.3f "
                "(limit %.2f, %zu false selections)",
                pairs, mw_bad, bh_bad, fdr, kFdrAlpha + kFdrSlack, false_total)};
}

LabeledDataset mean_feature_dataset(const std::vector<testkit::SimulatedTrial>& trials) {
    LabeledDataset d;
    for (const auto& t : trials) d.add(extract_mean_features(t.series), std::string(gesture_name(t.kind)));
    return d;
}

// ---- 9: gesture classification ----
Outcome c09() {
    const auto t0 = std::chrono::steady_clock::now();
    double acc_sum = 0.0;
    double acc_min = 1.0;
    const int seeds = 10;
    LabeledDataset first;
    for (int s = 0; s < seeds; ++s) {
        const LabeledDataset d = mean_feature_dataset(testkit::simulate_trials(30, 900 + s));
        if (s == 0) first = d;
        ForestParams p;
        p.seed = 9000 + s;
        const double acc = evaluate_holdout(d, 0.75, 0.05, p).report.accuracy;
        acc_sum += acc;
        acc_min = std::min(acc_min, acc);
    }
    const double acc_mean = acc_sum / seeds;

    double shuffled_sum = 0.0;
    const int shuffle_seeds = 50;
    for (int s = 0; s < shuffle_seeds; ++s) {
        LabeledDataset d = first;
        std::mt19937_64 rng(derive_seed(99, s));
        shuffle_with(d.labels, rng);
        ForestParams p;
        p.seed = 990 + s;
        shuffled_sum += evaluate_holdout(d, 0.75, 0.05, p).report.accuracy;
    }
    const double shuffled = shuffled_sum / shuffle_seeds;
    const double secs = seconds_since(t0);
    return {acc_mean >= kAccuracyBar && shuffled >= kShuffledLow && shuffled <= kShuffledHigh && secs < kRuntimeC9,
            fmt("held-out accuracy mean %.3f (min %.3f) over %d datasets, bar %.2f; shuffled labels %.3f over %d seeds "
                "(band %.2f-%.2f); %.1f s",
                acc_mean, acc_min, seeds, kAccuracyBar, shuffled, shuffle_seeds, kShuffledLow, kShuffledHigh, secs)};
}

// ---- 10: attribute importance for stroke detection ----
Outcome c10() {
    int first = 0;
    std::map<std::string, int> winners;
    for (int s = 0; s < kImportanceSeeds; ++s) {
        const auto trials = testkit::simulate_trials(30, 1000 + s);
        LabeledDataset d;
        for (const auto& t : trials) d.add(extract_features(t.series), t.kind == GestureKind::stroke ? "stroke" : "other");
        const FeatureSelection sel = select_features(d, 0.05);
        ForestParams p;
        p.seed = 10000 + s;
        const ImportanceResult imp = permutation_importance(d.select_columns(sel.indices), p, 0.75, 100, 10, p.seed);
        const AttributeImportance by = aggregate_by_attribute(imp);
        const auto best = std::max_element(by.mean.begin(), by.mean.end()) - by.mean.begin();
        const std::string& top = by.attributes[static_cast<std::size_t>(best)];
        ++winners[top];
        first += top == "v_lg" ? 1 : 0;
    }
    std::string tally;
    for (const auto& [k, v] : winners) tally += fmt("%s:%d ", k.c_str(), v);
    return {first >= kImportanceNeeded,
            fmt("v_lg ranked first in %d/%d seeds (need %d); winners %s", first, kImportanceSeeds, kImportanceNeeded,
                tally.c_str())};
}

std::string read_or_empty(const fs::path& p) { return fs::exists(p) ? io::read_text(p) : std::string{}; }

const std::string kCli = TOUCHTRACK_CLI_PATH;

testkit::ProcessResult cli(const fs::path& dir, std::vector<std::string> args) {
    args.insert(args.begin(), kCli);
    return testkit::run_process(args, dir / "log.txt");
}

// ---- 11: segmentation ----
Outcome c11() {
    const fs::path dir = testkit::fresh_dir("acc11");
    bool pass = true;
    std::string detail;
    for (const char* support : {"table", "cushion"}) {
        const fs::path sim = dir / support;
        const auto s = cli(dir, {"simulate", "-o", sim.string(), "--set", std::string("scene_support=") + support,
                                 "--set", "duration_s=0.2"});
        if (s.exit_code != 0) return {false, std::string("simulate failed: ") + s.output};
        const std::string mode = std::string(support) == "table" ? "plane" : "color";
        std::vector<std::string> outputs;
        double recall = 0.0;
        double precision = 0.0;
        for (int run = 0; run < 2; ++run) {
            const fs::path out = dir / (std::string(support) + "_arm" + std::to_string(run) + ".csv");
            const auto r = cli(dir, {"segment", (sim / "scene.csv").string(), "-o", out.string(), "--mode", mode,
                                     "--labels", (sim / "scene_labels.csv").string()});
            if (r.exit_code != 0) return {false, std::string("segment failed: ") + r.output};
            const auto j = nlohmann::json::parse(r.output);
            recall = j["recall"].get<double>();
            precision = j["precision"].get<double>();
            outputs.push_back(read_or_empty(out));
        }
        // Independent simulate run must reproduce the scene byte for byte.
        const auto s2 = cli(dir, {"simulate", "-o", (dir / (std::string(support) + "_again")).string(), "--set",
                                  std::string("scene_support=") + support, "--set", "duration_s=0.2"});
        const bool same_scene = s2.exit_code == 0 && read_or_empty(sim / "scene.csv") ==
                                                         read_or_empty(dir / (std::string(support) + "_again") / "scene.csv");
        const bool deterministic = outputs[0] == outputs[1] && !outputs[0].empty() && same_scene;
        pass = pass && recall >= kSegmentationBar && precision >= kSegmentationBar && deterministic;
        detail += fmt("%s: recall %.4f precision %.4f %s; ", support, recall, precision,
                      deterministic ? "byte-identical" : "NOT deterministic");
    }
    fs::remove_all(dir);
    return {pass, detail + fmt("bar %.2f", kSegmentationBar)};
}

bool json_round_trips(const fs::path& p) {
    const std::string text = io::read_text(p);
    return nlohmann::json::parse(text).dump(2) + "\n" == text;
}

// ---- 12: simulate -> analyze -> compare through the CLI ----
Outcome c12() {
    const fs::path dir = testkit::fresh_dir("acc12");
    bool pass = true;
    std::string detail;
    for (GestureKind kind : kAllGestures) {
        const std::string name(gesture_name(kind));
        const fs::path sim = dir / name;
        std::vector<std::string> sim_args{"simulate", "-o", sim.string(), "--set", "kind=" + name, "--set",
                                          "noise_mm=0.2"};
        if (kind == GestureKind::tap) {
            sim_args.insert(sim_args.end(), {"--set", "repetitions=3"});
        } else if (kind == GestureKind::shake) {
            sim_args.insert(sim_args.end(), {"--set", "depth_mm=8"});
        }
        const auto s = cli(dir, sim_args);
        const auto a = cli(dir, {"analyze", (sim / "arm.csv").string(), (sim / "hand.jsonl").string(), "-o",
                                 (sim / "measured.csv").string(), "--summary", (sim / "summary.json").string()});
        const auto c = cli(dir, {"compare", (sim / "truth.csv").string(), (sim / "measured.csv").string(), "-o",
                                 (sim / "compare.json").string()});
        const bool exits = s.exit_code == 0 && a.exit_code == 0 && c.exit_code == 0;
        bool lossless = exits;
        std::string broken;
        if (exits) {
            try {
                auto check = [&](bool ok, const char* file) {
                    if (!ok) {
                        lossless = false;
                        broken += std::string(file) + " ";
                    }
                };
                for (const char* f : {"scene.csv", "arm.csv"}) {
                    const std::string text = io::read_text(sim / f);
                    check(io::cloud_to_csv(io::cloud_from_csv(text)) == text, f);
                }
                const std::string labels = io::read_text(sim / "scene_labels.csv");
                check(io::labels_to_csv(io::labels_from_csv(labels)) == labels, "scene_labels.csv");
                const std::string hand = io::read_text(sim / "hand.jsonl");
                check(io::hand_sequence_to_jsonl(io::hand_sequence_from_jsonl(hand)) == hand, "hand.jsonl");
                for (const char* f : {"truth.csv", "measured.csv"}) {
                    const std::string text = io::read_text(sim / f);
                    check(io::series_to_csv(io::series_from_csv(text)) == text, f);
                }
                for (const char* f : {"truth.json", "summary.json", "compare.json"}) check(json_round_trips(sim / f), f);
            } catch (const std::exception& e) {
                lossless = false;
                broken += e.what();
            }
        }
        pass = pass && exits && lossless;
        detail += fmt("%s exit %d/%d/%d %s; ", name.c_str(), s.exit_code, a.exit_code, c.exit_code,
                      lossless ? "lossless" : ("lossy: " + broken).c_str());
    }
    fs::remove_all(dir);
    return {pass, detail};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"contact engine equals brute force", c01},
        {"depth half-distance calibration", c02},
        {"area calibration, 3 cm disk", c03},
        {"velocity identity and basis orthonormality", c04},
        {"simulated velocity error bands", c05},
        {"contact duration and tap episodes", c06},
        {"dtw against path enumeration", c07},
        {"mann-whitney, benjamini-hochberg, noise FDR", c08},
        {"gesture classification and shuffled control", c09},
        {"longitudinal velocity importance for strokes", c10},
        {"segmentation recall, precision, determinism", c11},
        {"cli round trip for all gestures", c12},
    };
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: acceptance [--only N]\n");
            return 2;
        }
    }
    if (only < 0 || only > static_cast<int>(criteria.size())) {
        std::fprintf(stderr, "no criterion %d\n", only);
        return 2;
    }
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (only != 0 && static_cast<int>(i) + 1 != only) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("C%02zu %s  %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
