#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "touchtrack/analysis.hpp"
#include "touchtrack/contact.hpp"
#include "touchtrack/kinematics.hpp"
#include "touchtrack/surface.hpp"

namespace touchtrack {

// Half cylinder standing in for a forearm. The axis runs along +y through
// (0, y, axis_height); world z is up and the sensor looks down from above.
struct SyntheticArm {
    double radius = 0.04;
    double length = 0.25;
    double spacing = 0.002;
    double axis_height = 0.04;
    // Points cover polar angles [min_angle, pi - min_angle] measured from +x.
    double min_angle_rad = 0.0;

    void validate() const {
        require(radius > 0.0 && length > 0.0 && spacing > 0.0, "arm dimensions must be positive");
        require(spacing < radius, "arm spacing must be smaller than the radius");
        require(spacing < length, "arm spacing must be smaller than the length");
        require(min_angle_rad >= 0.0 && min_angle_rad < std::numbers::pi / 2.0, "arm min angle must lie in [0, pi/2)");
        require(std::isfinite(axis_height), "arm axis height must be finite");
    }
};

inline ArmBasis synthetic_arm_basis() {
    return build_arm_basis(UnitVector3::normalized({0.0, 0.0, 1.0}), UnitVector3::normalized({0.0, 1.0, 0.0}));
}

inline PointCloud make_arm(const SyntheticArm& arm) {
    arm.validate();
    const double arc = arm.radius * (std::numbers::pi - 2.0 * arm.min_angle_rad);
    const auto n_arc = static_cast<std::size_t>(std::lround(arc / arm.spacing)) + 1;
    const auto n_axial = static_cast<std::size_t>(std::lround(arm.length / arm.spacing)) + 1;
    const double d_theta = (std::numbers::pi - 2.0 * arm.min_angle_rad) / static_cast<double>(n_arc - 1);
    const double d_y = arm.length / static_cast<double>(n_axial - 1);
    PointCloud cloud;
    cloud.points.reserve(n_arc * n_axial);
    auto& normals = cloud.normals.emplace();
    normals.reserve(n_arc * n_axial);
    for (std::size_t j = 0; j < n_axial; ++j) {
        const double y = -arm.length / 2.0 + d_y * static_cast<double>(j);
        for (std::size_t i = 0; i < n_arc; ++i) {
            const double theta = arm.min_angle_rad + d_theta * static_cast<double>(i);
            const Vector3 radial(std::cos(theta), 0.0, std::sin(theta));
            cloud.points.emplace_back(arm.radius * radial.x(), y, arm.axis_height + arm.radius * radial.z());
            normals.push_back(UnitVector3::normalized(radial));
        }
    }
    cloud.mean_neighbor_distance = compute_mean_neighbor_distance(cloud);
    return cloud;
}

enum class GestureKind { stroke, tap, hold, shake };
enum class StrokeDirection { longitudinal, lateral };
enum class PatchShape { rectangle, disk };

inline constexpr std::array<GestureKind, 4> kAllGestures{GestureKind::stroke, GestureKind::tap, GestureKind::hold,
                                                         GestureKind::shake};

inline std::string_view gesture_name(GestureKind k) {
    switch (k) {
        case GestureKind::stroke: return "stroke";
        case GestureKind::tap: return "tap";
        case GestureKind::hold: return "hold";
        case GestureKind::shake: return "shake";
    }
    return "?";
}

inline GestureKind parse_gesture(std::string_view s) {
    for (GestureKind k : kAllGestures) {
        if (gesture_name(k) == s) return k;
    }
    throw Error("unknown gesture kind '" + std::string(s) + "'");
}

struct GestureSpec {
    GestureKind kind = GestureKind::stroke;
    StrokeDirection direction = StrokeDirection::longitudinal;
    double speed_cm_s = 10.0;  // stroke/tap speed, RMS speed for shake
    double depth_mm = 3.0;     // penetration below the skin surface
    PatchShape patch = PatchShape::rectangle;
    double patch_width = 0.03;   // lateral extent (arc length), meters
    double patch_height = 0.04;  // longitudinal extent, meters
    double patch_radius = 0.015;
    double patch_spacing = 0.002;
    double duration_s = 2.0;
    std::size_t repetitions = 1;  // stroke legs or taps
    double frame_rate = 30.0;
    double noise_mm = 0.0;
    std::uint64_t seed = 1;
    double airborne_mm = 20.0;  // tap hover height above the skin
    double ref_height = 0.02;   // reference point above the patch center
    double center_y = 0.0;      // patch center along the arm axis

    void validate() const {
        require(speed_cm_s > 0.0, "speed must be positive");
        require(depth_mm > 0.0, "depth must be positive");
        require(patch_spacing > 0.0, "patch spacing must be positive");
        if (patch == PatchShape::rectangle) {
            require(patch_width > 0.0 && patch_height > 0.0, "patch size must be positive");
        } else {
            require(patch_radius > 0.0, "patch radius must be positive");
        }
        require(duration_s > 0.0, "duration must be positive");
        require(repetitions > 0, "repetitions must be positive");
        require(frame_rate > 0.0, "frame rate must be positive");
        require(noise_mm >= 0.0, "noise must be non-negative");
        require(airborne_mm > 0.0, "airborne height must be positive");
        require(std::isfinite(ref_height) && std::isfinite(center_y), "non-finite gesture parameter");
    }

    std::size_t frame_count() const {
        return static_cast<std::size_t>(std::lround(duration_s * frame_rate)) + 1;
    }
};

struct GroundTruth {
    std::vector<double> t;
    std::vector<Vector3> offset;           // noiseless rigid displacement of the hand, meters
    std::vector<Vector3> velocity_cm_s;    // (offset[k] - offset[k-1]) / dt; zero at frame 0
    std::vector<bool> contact;
    std::vector<double> depth_mm;          // mean radial penetration of vertices inside the arm
    std::vector<double> area_cm2;          // inside vertices times patch area per vertex
    std::vector<std::pair<double, double>> contact_intervals;
    double duration_s = 0.0;               // prescribed total contact time
    double frame_rate = 0.0;
    double patch_area_cm2 = 0.0;

    std::size_t size() const { return t.size(); }
};

struct GeneratedGesture {
    std::vector<HandFrame> frames;
    GroundTruth truth;
};

namespace detail {

struct PatchVertex {
    double arc = 0.0;    // lateral arc offset from the patch center
    double axial = 0.0;  // longitudinal offset
};

inline std::vector<PatchVertex> patch_lattice(const GestureSpec& spec) {
    std::vector<PatchVertex> out;
    const double s = spec.patch_spacing;
    if (spec.patch == PatchShape::rectangle) {
        const auto na = static_cast<std::size_t>(std::lround(spec.patch_width / s)) + 1;
        const auto nu = static_cast<std::size_t>(std::lround(spec.patch_height / s)) + 1;
        require(na >= 2 && nu >= 2, "patch spacing too coarse for the patch size");
        for (std::size_t j = 0; j < nu; ++j) {
            for (std::size_t i = 0; i < na; ++i) {
                out.push_back({-spec.patch_width / 2.0 + spec.patch_width * static_cast<double>(i) / static_cast<double>(na - 1),
                               -spec.patch_height / 2.0 + spec.patch_height * static_cast<double>(j) / static_cast<double>(nu - 1)});
            }
        }
    } else {
        const auto reach = static_cast<long>(std::floor(spec.patch_radius / s));
        for (long j = -reach; j <= reach; ++j) {
            for (long i = -reach; i <= reach; ++i) {
                const double a = s * static_cast<double>(i);
                const double u = s * static_cast<double>(j);
                if (a * a + u * u <= spec.patch_radius * spec.patch_radius * (1.0 + 1e-12)) out.push_back({a, u});
            }
        }
        require(out.size() >= 2, "patch spacing too coarse for the patch size");
    }
    return out;
}

inline double patch_area(const GestureSpec& spec) {
    return spec.patch == PatchShape::rectangle ? spec.patch_width * spec.patch_height
                                               : std::numbers::pi * spec.patch_radius * spec.patch_radius;
}

// Position on the skin surface, before any displacement.
inline Point3 rest_position(const SyntheticArm& arm, const GestureSpec& spec, const PatchVertex& v) {
    const double phi = v.arc / arm.radius;
    return {arm.radius * std::sin(phi), spec.center_y + v.axial, arm.axis_height + arm.radius * std::cos(phi)};
}

// Triangle wave over one leg per repetition, starting at -leg/2.
inline double stroke_position(double t, double speed, double leg) {
    const double travelled = speed * t;
    const double phase = std::fmod(travelled, 2.0 * leg);
    const double along = phase <= leg ? phase : 2.0 * leg - phase;
    return along - leg / 2.0;
}

struct TapSchedule {
    std::vector<double> descent_start;
    double hover = 0.0;
    double depth = 0.0;
    double speed = 0.0;

    double vertical(double t) const {
        for (double s : descent_start) {
            const double down = (hover + depth) / speed;
            if (t >= s && t <= s + 2.0 * down) {
                const double u = t - s;
                return u <= down ? hover - speed * u : -depth + speed * (u - down);
            }
        }
        return hover;
    }
};

// One tap per slot of duration/repetitions. Each tap is centered in its
// slot, then nudged so skin entry falls halfway between two frames.
inline TapSchedule tap_schedule(const GestureSpec& spec) {
    TapSchedule sched;
    sched.hover = spec.airborne_mm / kMmPerMeter;
    sched.depth = spec.depth_mm / kMmPerMeter;
    sched.speed = spec.speed_cm_s / kCmPerMeter;
    const double slot = spec.duration_s / static_cast<double>(spec.repetitions);
    const double cycle = 2.0 * (sched.hover + sched.depth) / sched.speed;
    if (cycle > slot) {
        throw Error("tap cycle does not fit in duration / repetitions");
    }
    const double slack = slot - cycle;
    const double dt = 1.0 / spec.frame_rate;
    for (std::size_t j = 0; j < spec.repetitions; ++j) {
        double start = slot * static_cast<double>(j) + slack / 2.0;
        if (slack >= 2.0 * dt) {
            const double entry = start + sched.hover / sched.speed;
            const double aligned = (std::floor(entry / dt) + 0.5) * dt;
            start += aligned - entry;
        }
        sched.descent_start.push_back(start);
    }
    return sched;
}

struct ShakeComponent {
    double amplitude = 0.0;  // velocity amplitude, m/s before scaling
    double omega = 0.0;
    double phase = 0.0;
};

inline constexpr std::size_t kShakeComponents = 6;
inline constexpr double kShakeMinHz = 2.0;
inline constexpr double kShakeMaxHz = 5.0;

}  // namespace detail

// Rigid hand patch moving over the synthetic arm with prescribed kinematics.
inline GeneratedGesture generate_gesture(const SyntheticArm& arm, const GestureSpec& spec) {
    arm.validate();
    spec.validate();
    const double depth = spec.depth_mm / kMmPerMeter;
    require(depth < arm.radius / 2.0, "depth must be less than half the arm radius");
    const std::size_t n = spec.frame_count();
    require(n >= 2, "gesture needs at least two frames");
    const double dt = 1.0 / spec.frame_rate;
    const double speed = spec.speed_cm_s / kCmPerMeter;

    const auto lattice = detail::patch_lattice(spec);
    std::vector<Point3> rest;
    rest.reserve(lattice.size());
    for (const auto& v : lattice) rest.push_back(detail::rest_position(arm, spec, v));
    const Point3 rest_ref(0.0, spec.center_y, arm.axis_height + arm.radius + spec.ref_height);

    GroundTruth truth;
    truth.frame_rate = spec.frame_rate;
    truth.patch_area_cm2 = detail::patch_area(spec) * kCm2PerM2;
    for (std::size_t k = 0; k < n; ++k) truth.t.push_back(static_cast<double>(k) * dt);

    std::mt19937_64 rng(spec.seed);
    switch (spec.kind) {
        case GestureKind::stroke: {
            const double leg = speed * spec.duration_s / static_cast<double>(spec.repetitions);
            for (double t : truth.t) {
                const double s = detail::stroke_position(t, speed, leg);
                truth.offset.push_back(spec.direction == StrokeDirection::longitudinal ? Vector3(0.0, s, -depth)
                                                                                        : Vector3(s, 0.0, -depth));
            }
            truth.contact_intervals.emplace_back(truth.t.front(), truth.t.back());
            truth.duration_s = spec.duration_s;
            break;
        }
        case GestureKind::tap: {
            const auto sched = detail::tap_schedule(spec);
            for (double t : truth.t) truth.offset.emplace_back(0.0, 0.0, sched.vertical(t));
            const double down = (sched.hover + sched.depth) / sched.speed;
            for (double s : sched.descent_start) {
                truth.contact_intervals.emplace_back(s + sched.hover / sched.speed,
                                                     s + down + sched.depth / sched.speed);
            }
            truth.duration_s = static_cast<double>(spec.repetitions) * 2.0 * sched.depth / sched.speed;
            break;
        }
        case GestureKind::hold: {
            for (std::size_t k = 0; k < n; ++k) truth.offset.emplace_back(0.0, 0.0, -depth);
            truth.contact_intervals.emplace_back(truth.t.front(), truth.t.back());
            truth.duration_s = spec.duration_s;
            break;
        }
        case GestureKind::shake: {
            std::uniform_real_distribution<double> freq(detail::kShakeMinHz, detail::kShakeMaxHz);
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            std::array<std::vector<detail::ShakeComponent>, 3> axes;
            for (auto& axis : axes) {
                for (std::size_t c = 0; c < detail::kShakeComponents; ++c) {
                    axis.push_back({0.5 + unit(rng), 2.0 * std::numbers::pi * freq(rng),
                                    2.0 * std::numbers::pi * unit(rng)});
                }
            }
            // Displacement is the exact integral of the velocity sum, zero at t = 0.
            auto position = [&](double t) {
                Vector3 p = Vector3::Zero();
                for (int a = 0; a < 3; ++a) {
                    for (const auto& c : axes[static_cast<std::size_t>(a)]) {
                        p[a] += c.amplitude / c.omega * (std::sin(c.omega * t + c.phase) - std::sin(c.phase));
                    }
                }
                return p;
            };
            std::vector<Vector3> raw;
            for (double t : truth.t) raw.push_back(position(t));
            double sum_sq = 0.0;
            for (std::size_t k = 1; k < n; ++k) sum_sq += ((raw[k] - raw[k - 1]) / dt).squaredNorm();
            const double rms = std::sqrt(sum_sq / static_cast<double>(n - 1));
            require(rms > 0.0, "degenerate shake trajectory");
            const double scale = speed / rms;
            for (const auto& p : raw) truth.offset.push_back(p * scale + Vector3(0.0, 0.0, -depth));
            break;
        }
    }

    // Feasibility: the patch must stay over the sampled arm.
    const double axial_limit = arm.length / 2.0;
    const double lateral_limit = 0.9 * arm.radius;
    for (const auto& o : truth.offset) {
        for (const auto& p : rest) {
            const Point3 q = p + o;
            if (std::abs(q.y()) > axial_limit || std::abs(q.x()) > lateral_limit) {
                throw Error("patch leaves the arm; shorten the trajectory or patch");
            }
        }
    }

    const double area_per_vertex = truth.patch_area_cm2 / static_cast<double>(rest.size());
    truth.velocity_cm_s.push_back(Vector3::Zero());
    for (std::size_t k = 1; k < n; ++k) {
        truth.velocity_cm_s.push_back((truth.offset[k] - truth.offset[k - 1]) * (kCmPerMeter / dt));
    }
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t inside = 0;
        double penetration = 0.0;
        for (const auto& p : rest) {
            const Point3 q = p + truth.offset[k];
            const double radial = std::hypot(q.x(), q.z() - arm.axis_height);
            if (radial < arm.radius && std::abs(q.y()) <= axial_limit) {
                ++inside;
                penetration += arm.radius - radial;
            }
        }
        truth.contact.push_back(inside > 0);
        truth.depth_mm.push_back(inside > 0 ? penetration / static_cast<double>(inside) * kMmPerMeter : 0.0);
        truth.area_cm2.push_back(static_cast<double>(inside) * area_per_vertex);
    }
    if (spec.kind == GestureKind::shake) {
        std::size_t k = 0;
        while (k < n) {
            if (!truth.contact[k]) {
                ++k;
                continue;
            }
            const std::size_t begin = k;
            while (k < n && truth.contact[k]) ++k;
            truth.contact_intervals.emplace_back(truth.t[begin], truth.t[k - 1]);
        }
        truth.duration_s = contact_duration(truth.contact, spec.frame_rate);
    }

    GeneratedGesture out;
    out.truth = std::move(truth);
    const double sigma = spec.noise_mm / kMmPerMeter;
    std::normal_distribution<double> noise(0.0, 1.0);
    auto jitter = [&]() {
        if (sigma == 0.0) return Vector3(Vector3::Zero());
        const double x = noise(rng);
        const double y = noise(rng);
        const double z = noise(rng);
        return Vector3(x * sigma, y * sigma, z * sigma);
    };
    out.frames.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        HandFrame f;
        f.timestamp = out.truth.t[k];
        f.vertices.reserve(rest.size());
        for (const auto& p : rest) f.vertices.push_back(p + out.truth.offset[k] + jitter());
        f.ref_point = rest_ref + out.truth.offset[k] + jitter();
        out.frames.push_back(std::move(f));
    }
    return out;
}

// Ground truth in the attribute-series layout, velocities projected on the
// basis.
inline AttributeSeries truth_series(const GroundTruth& truth, const ArmBasis& basis) {
    AttributeSeries s;
    s.frame_rate = truth.frame_rate;
    s.duration = truth.duration_s;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        AttributeRecord r;
        r.t = truth.t[k];
        r.contact = truth.contact[k];
        r.velocity_valid = k > 0;
        if (r.velocity_valid && r.contact) {
            const auto c = decompose_velocity(truth.velocity_cm_s[k], basis);
            r.v_abs = c.v_abs;
            r.v_lg = c.v_lg;
            r.v_lt = c.v_lt;
            r.v_vt = c.v_vt;
        }
        r.area_cm2 = truth.area_cm2[k];
        r.depth_mm = truth.depth_mm[k];
        s.records.push_back(r);
    }
    return s;
}

struct OracleReport {
    std::size_t frames = 0;
    std::size_t compared_frames = 0;  // velocity valid and in contact in both series
    std::array<ErrorStats, 4> velocity{};  // v_abs, v_lg, v_lt, v_vt
    double dtw_v_abs_mean = 0.0;           // mean |error| along the DTW path of the v_abs series
    ErrorStats depth_raw;
    ErrorStats depth_adjusted;  // measured depth doubled, against the radial penetration
    ErrorStats area;
    double contact_agreement = 0.0;
    std::size_t measured_episodes = 0;
    std::size_t truth_episodes = 0;
    double measured_duration = 0.0;
    double truth_duration = 0.0;

    double max_velocity_mean_abs() const {
        double m = 0.0;
        for (const auto& v : velocity) m = std::max(m, v.mean_abs);
        return m;
    }
};

inline OracleReport oracle_compare(const AttributeSeries& measured, const GroundTruth& truth, const ArmBasis& basis) {
    if (measured.records.size() != truth.size()) {
        throw Error("measured and truth frame counts differ");
    }
    const AttributeSeries expected = truth_series(truth, basis);
    OracleReport report;
    report.frames = truth.size();
    std::array<TimeSeries, 4> mv;
    std::array<TimeSeries, 4> tv;
    TimeSeries md, td, md2, ma, ta;
    std::size_t agree = 0;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        const AttributeRecord& m = measured.records[k];
        const AttributeRecord& e = expected.records[k];
        if (std::abs(m.t - e.t) > 1e-9) {
            throw Error("measured and truth timestamps differ");
        }
        agree += m.contact == e.contact ? 1 : 0;
        if (!(m.contact && e.contact)) continue;
        md.t.push_back(e.t);
        md.value.push_back(m.depth_mm);
        md2.t.push_back(e.t);
        md2.value.push_back(2.0 * m.depth_mm);
        td.t.push_back(e.t);
        td.value.push_back(e.depth_mm);
        ma.t.push_back(e.t);
        ma.value.push_back(m.area_cm2);
        ta.t.push_back(e.t);
        ta.value.push_back(e.area_cm2);
        if (!(m.velocity_valid && e.velocity_valid)) continue;
        ++report.compared_frames;
        for (std::size_t c = 0; c < 4; ++c) {
            const Attribute a = kAllAttributes[c];
            mv[c].t.push_back(e.t);
            mv[c].value.push_back(m.get(a));
            tv[c].t.push_back(e.t);
            tv[c].value.push_back(e.get(a));
        }
    }
    for (std::size_t c = 0; c < 4; ++c) report.velocity[c] = pointwise_error(tv[c], mv[c]).stats;
    if (!mv[0].value.empty()) {
        const auto dtw = dtw_align(tv[0].value, mv[0].value);
        double s = 0.0;
        for (double e : dtw.pair_errors) s += e;
        report.dtw_v_abs_mean = s / static_cast<double>(dtw.pair_errors.size());
    }
    report.depth_raw = pointwise_error(td, md).stats;
    report.depth_adjusted = pointwise_error(td, md2).stats;
    report.area = pointwise_error(ta, ma).stats;
    report.contact_agreement = truth.size() > 0 ? static_cast<double>(agree) / static_cast<double>(truth.size()) : 0.0;
    report.measured_episodes = count_episodes(measured.contact_flags());
    report.truth_episodes = count_episodes(truth.contact);
    report.measured_duration = measured.duration;
    report.truth_duration = truth.duration_s;
    return report;
}

// Scenes for segmentation: the arm resting on a table plane, or on a green
// cushion that is not planar.
enum class SceneSupport { table, cushion };

struct SceneSpec {
    SceneSupport support = SceneSupport::table;
    SyntheticArm arm{0.04, 0.25, 0.002, 0.04, 15.0 * std::numbers::pi / 180.0};
    double support_size = 0.4;
    double support_spacing = 0.004;
    double noise_mm = 0.5;
    std::size_t distractor_points = 150;
    std::size_t outliers = 40;
    std::uint64_t seed = 7;

    void validate() const {
        arm.validate();
        require(support_size > 0.0 && support_spacing > 0.0, "support dimensions must be positive");
        require(noise_mm >= 0.0, "noise must be non-negative");
    }
};

struct SyntheticScene {
    PointCloud cloud;               // colors always attached
    std::vector<std::uint8_t> labels;  // 1 for arm points
};

inline SyntheticScene make_scene(const SceneSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double sigma = spec.noise_mm / kMmPerMeter;
    SyntheticScene scene;
    auto& colors = scene.cloud.colors.emplace();
    auto add = [&](const Point3& p, Rgb c, bool is_arm) {
        scene.cloud.points.push_back(p + sigma * Vector3(gauss(rng), gauss(rng), gauss(rng)));
        colors.push_back(c);
        scene.labels.push_back(is_arm ? 1 : 0);
    };
    auto shade = [&](Rgb base) {
        Rgb c = base;
        for (auto& ch : c) {
            const double v = static_cast<double>(ch) + 12.0 * (unit(rng) - 0.5);
            ch = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
        }
        return c;
    };

    const bool cushion = spec.support == SceneSupport::cushion;
    auto support_height = [&](double x, double y) {
        if (!cushion) return 0.0;
        return 0.006 * std::cos(std::numbers::pi * x / spec.support_size) * std::cos(std::numbers::pi * y / spec.support_size) +
               0.004 * std::sin(9.0 * x) * std::sin(7.0 * y);
    };
    const Rgb support_color = cushion ? Rgb{60, 170, 70} : Rgb{150, 115, 80};
    const auto n_support = static_cast<std::size_t>(std::lround(spec.support_size / spec.support_spacing)) + 1;
    for (std::size_t j = 0; j < n_support; ++j) {
        for (std::size_t i = 0; i < n_support; ++i) {
            const double x = -spec.support_size / 2.0 + spec.support_spacing * static_cast<double>(i);
            const double y = -spec.support_size / 2.0 + spec.support_spacing * static_cast<double>(j);
            add({x, y, support_height(x, y)}, shade(support_color), false);
        }
    }

    SyntheticArm arm = spec.arm;
    if (cushion) arm.axis_height += 0.012;
    const PointCloud arm_cloud = make_arm(arm);
    for (const auto& p : arm_cloud.points) add(p, shade(Rgb{205, 150, 125}), true);

    // Small object beside the arm: a dome of radius 2 cm.
    const Point3 dome(0.12, 0.08, support_height(0.12, 0.08));
    for (std::size_t i = 0; i < spec.distractor_points; ++i) {
        const double az = 2.0 * std::numbers::pi * unit(rng);
        const double el = std::asin(unit(rng));
        add(dome + 0.02 * Vector3(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)),
            shade(Rgb{70, 80, 200}), false);
    }
    for (std::size_t i = 0; i < spec.outliers; ++i) {
        add({spec.support_size * (unit(rng) - 0.5), spec.support_size * (unit(rng) - 0.5), 0.03 + 0.2 * unit(rng)},
            shade(Rgb{128, 128, 128}), false);
    }
    return scene;
}

}  // namespace touchtrack
