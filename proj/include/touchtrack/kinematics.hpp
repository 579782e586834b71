#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "touchtrack/contact.hpp"
#include "touchtrack/geometry.hpp"

namespace touchtrack {

inline constexpr double kCmPerMeter = 100.0;
inline constexpr double kMmPerMeter = 1000.0;
inline constexpr double kCm2PerM2 = 1.0e4;
inline constexpr double kDefaultFrameRate = 30.0;

// Reference-point velocity in cm/s from the actual timestamp difference.
inline Vector3 hand_velocity(const HandFrame& prev, const HandFrame& curr) {
    const double dt = curr.timestamp - prev.timestamp;
    if (!(dt > 0.0)) {
        throw Error("hand frame timestamps must be strictly increasing");
    }
    return (curr.ref_point - prev.ref_point) * (kCmPerMeter / dt);
}

struct VelocityComponents {
    double v_abs = 0.0;
    double v_lg = 0.0;
    double v_lt = 0.0;
    double v_vt = 0.0;
};

inline VelocityComponents decompose_velocity(const Vector3& v, const ArmBasis& basis) {
    return VelocityComponents{v.norm(), basis.longitudinal.dot(v), basis.lateral.dot(v), basis.vertical.dot(v)};
}

enum class Attribute { v_abs, v_lg, v_lt, v_vt, area, depth };

inline constexpr std::array<Attribute, 6> kAllAttributes{Attribute::v_abs, Attribute::v_lg, Attribute::v_lt,
                                                         Attribute::v_vt,  Attribute::area, Attribute::depth};

inline std::string_view attribute_name(Attribute a) {
    switch (a) {
        case Attribute::v_abs: return "v_abs";
        case Attribute::v_lg: return "v_lg";
        case Attribute::v_lt: return "v_lt";
        case Attribute::v_vt: return "v_vt";
        case Attribute::area: return "area";
        case Attribute::depth: return "depth";
    }
    return "?";
}

inline bool is_velocity(Attribute a) { return a != Attribute::area && a != Attribute::depth; }
inline bool is_signed(Attribute a) { return a == Attribute::v_lg || a == Attribute::v_lt || a == Attribute::v_vt; }

// Reporting units: cm/s, cm^2, mm.
struct AttributeRecord {
    double t = 0.0;
    bool contact = false;
    bool velocity_valid = false;  // false on the first frame (no backward difference)
    double v_abs = 0.0;
    double v_lg = 0.0;
    double v_lt = 0.0;
    double v_vt = 0.0;
    double area_cm2 = 0.0;
    double depth_mm = 0.0;

    double get(Attribute a) const {
        switch (a) {
            case Attribute::v_abs: return v_abs;
            case Attribute::v_lg: return v_lg;
            case Attribute::v_lt: return v_lt;
            case Attribute::v_vt: return v_vt;
            case Attribute::area: return area_cm2;
            case Attribute::depth: return depth_mm;
        }
        return 0.0;
    }
};

struct TrialLabels {
    std::string gesture;
    std::string message;
    std::string toucher;
};

struct AttributeSeries {
    std::vector<AttributeRecord> records;
    double duration = 0.0;    // seconds
    double frame_rate = 0.0;  // Hz
    TrialLabels labels;

    std::size_t contact_frames() const {
        std::size_t n = 0;
        for (const auto& r : records) n += r.contact ? 1 : 0;
        return n;
    }

    std::vector<bool> contact_flags() const {
        std::vector<bool> flags;
        flags.reserve(records.size());
        for (const auto& r : records) flags.push_back(r.contact);
        return flags;
    }

    // Values of one attribute over contact frames; velocity attributes also
    // skip frames without a valid backward difference.
    std::vector<double> contact_values(Attribute a) const {
        std::vector<double> out;
        for (const auto& r : records) {
            if (!r.contact) continue;
            if (is_velocity(a) && !r.velocity_valid) continue;
            out.push_back(r.get(a));
        }
        return out;
    }
};

// Sum of contact flags divided by the recording frequency.
inline double contact_duration(const std::vector<bool>& flags, double frame_rate) {
    if (!(frame_rate > 0.0)) {
        throw Error("frame rate must be positive");
    }
    std::size_t n = 0;
    for (bool f : flags) n += f ? 1 : 0;
    return static_cast<double>(n) / frame_rate;
}

// Maximal runs of consecutive contact frames.
inline std::size_t count_episodes(const std::vector<bool>& flags) {
    std::size_t episodes = 0;
    bool previous = false;
    for (bool f : flags) {
        if (f && !previous) ++episodes;
        previous = f;
    }
    return episodes;
}

inline double frame_rate_from_timestamps(std::span<const double> t) {
    if (t.size() < 2) {
        throw Error("frame rate needs at least two timestamps");
    }
    const double span = t.back() - t.front();
    if (!(span > 0.0)) {
        throw Error("timestamps must be strictly increasing");
    }
    return static_cast<double>(t.size() - 1) / span;
}

// Consecutive integer timestamps are frame numbers, not seconds.
inline bool timestamps_are_frame_numbers(std::span<const double> t) {
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] != std::floor(t[i])) return false;
        if (i > 0 && t[i] - t[i - 1] != 1.0) return false;
    }
    return t.size() >= 2;
}

inline void validate_sequence(const std::vector<HandFrame>& frames) {
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const HandFrame& f = frames[i];
        if (!std::isfinite(f.timestamp)) throw Error("non-finite hand timestamp");
        if (f.vertices.empty()) throw Error("hand frame has no vertices");
        if (!is_finite(f.ref_point)) throw Error("non-finite hand reference point");
        for (const auto& v : f.vertices) {
            if (!is_finite(v)) throw Error("non-finite hand vertex");
        }
        if (i > 0 && !(f.timestamp > frames[i - 1].timestamp)) {
            throw Error("hand frame timestamps must be strictly increasing");
        }
    }
}

enum class VelocityGate { all, contact_only };

struct SeriesOptions {
    VelocityGate gate = VelocityGate::contact_only;
    // Centered moving average over velocity vectors; 1 disables smoothing.
    std::size_t smoothing_window = 1;
};

namespace detail {

inline std::vector<Vector3> moving_average(const std::vector<Vector3>& v, std::size_t window) {
    if (window <= 1 || v.empty()) return v;
    const std::size_t half = window / 2;
    std::vector<Vector3> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        // Shrink symmetrically near the ends.
        const std::size_t reach = std::min({half, i, v.size() - 1 - i});
        Vector3 sum = Vector3::Zero();
        for (std::size_t j = i - reach; j <= i + reach; ++j) sum += v[j];
        out[i] = sum / static_cast<double>(2 * reach + 1);
    }
    return out;
}

}  // namespace detail

// Per-frame contact attributes and velocities for one trial.
inline AttributeSeries build_series(std::vector<HandFrame> frames, const PreparedArm& arm, const ArmBasis& basis,
                                    const SeriesOptions& options = {}) {
    if (frames.size() < 2) {
        throw Error("series needs at least two hand frames");
    }
    if (options.smoothing_window == 0 || options.smoothing_window % 2 == 0) {
        throw Error("smoothing window must be odd");
    }
    validate_sequence(frames);

    std::vector<double> times;
    times.reserve(frames.size());
    for (const auto& f : frames) times.push_back(f.timestamp);
    if (timestamps_are_frame_numbers(times)) {
        for (auto& f : frames) f.timestamp /= kDefaultFrameRate;
        for (auto& t : times) t /= kDefaultFrameRate;
    }

    AttributeSeries series;
    series.frame_rate = frame_rate_from_timestamps(times);
    series.records.resize(frames.size());

    // velocities[i - 1] is the backward difference ending at frame i.
    std::vector<Vector3> velocities;
    velocities.reserve(frames.size() - 1);
    for (std::size_t i = 1; i < frames.size(); ++i) {
        velocities.push_back(hand_velocity(frames[i - 1], frames[i]));
    }
    velocities = detail::moving_average(velocities, options.smoothing_window);

    for (std::size_t i = 0; i < frames.size(); ++i) {
        const ContactFrame contact = detect_contact(frames[i], arm);
        AttributeRecord& r = series.records[i];
        r.t = frames[i].timestamp;
        r.contact = contact.contact;
        r.area_cm2 = contact.area * kCm2PerM2;
        r.depth_mm = contact.depth * kMmPerMeter;
        r.velocity_valid = i > 0;
        const bool report = i > 0 && (options.gate == VelocityGate::all || contact.contact);
        if (report) {
            const VelocityComponents c = decompose_velocity(velocities[i - 1], basis);
            r.v_abs = c.v_abs;
            r.v_lg = c.v_lg;
            r.v_lt = c.v_lt;
            r.v_vt = c.v_vt;
        }
    }
    series.duration = contact_duration(series.contact_flags(), series.frame_rate);
    return series;
}

// Per-attribute means over contact frames, using |value| for signed
// velocities. Attributes without samples report 0.
inline std::array<double, 6> attribute_means(const AttributeSeries& series) {
    std::array<double, 6> means{};
    for (std::size_t k = 0; k < kAllAttributes.size(); ++k) {
        const Attribute a = kAllAttributes[k];
        const auto values = series.contact_values(a);
        if (values.empty()) continue;
        double sum = 0.0;
        for (double v : values) sum += is_signed(a) ? std::abs(v) : v;
        means[k] = sum / static_cast<double>(values.size());
    }
    return means;
}

}  // namespace touchtrack
