#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <type_traits>

#include "touchtrack/forest.hpp"
#include "touchtrack/io.hpp"
#include "touchtrack/segmentation.hpp"
#include "touchtrack/simulator.hpp"

static_assert(std::is_same_v<std::size_t, std::uint64_t>, "config readers assume a 64-bit size_t");

namespace touchtrack {

// Flat key = value settings. '#' starts a comment; later keys win.
class Config {
public:
    static Config parse(const std::string& text) {
        Config c;
        const auto lines = io::lines_of(text);
        for (std::size_t i = 0; i < lines.size(); ++i) {
            std::string_view line = lines[i];
            if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
            line = io::trim(line);
            if (line.empty()) continue;
            c.set_assignment(line, "config line " + std::to_string(i + 1));
        }
        return c;
    }

    static Config load(const std::filesystem::path& path) { return parse(io::read_text(path)); }

    // "key=value", as given on the command line.
    void set_assignment(std::string_view assignment, const std::string& where = "override") {
        const auto eq = assignment.find('=');
        if (eq == std::string_view::npos) throw Error(where + ": expected key = value");
        const std::string key(io::trim(assignment.substr(0, eq)));
        const std::string value(io::trim(assignment.substr(eq + 1)));
        if (key.empty()) throw Error(where + ": empty key");
        values_[key] = value;
    }

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) > 0; }
    const std::map<std::string, std::string>& values() const { return values_; }

    // Typed readers leave the target untouched when the key is absent and
    // mark the key as consumed.
    void read(const std::string& key, double& target) {
        if (auto v = take(key)) target = io::parse_double(*v, key);
    }
    void read(const std::string& key, std::uint64_t& target) {
        if (auto v = take(key)) {
            const long long x = io::parse_int(*v, key);
            if (x < 0) throw Error(key + " must be non-negative");
            target = static_cast<std::uint64_t>(x);
        }
    }
    void read(const std::string& key, bool& target) {
        if (auto v = take(key)) {
            if (*v == "true" || *v == "1") {
                target = true;
            } else if (*v == "false" || *v == "0") {
                target = false;
            } else {
                throw Error(key + " must be true or false");
            }
        }
    }
    void read(const std::string& key, std::string& target) {
        if (auto v = take(key)) target = *v;
    }
    void read(const std::string& key, Vector3& target) {
        if (auto v = take(key)) target = parse_triple(*v, key);
    }

    static Vector3 parse_triple(const std::string& text, const std::string& what) {
        const auto parts = io::split(text);
        if (parts.size() != 3) throw Error(what + " must be three comma-separated numbers");
        return {io::parse_double(parts[0], what), io::parse_double(parts[1], what), io::parse_double(parts[2], what)};
    }

    // Throws on keys nobody asked for (typos).
    void require_all_consumed() const {
        for (const auto& [key, value] : values_) {
            if (!consumed_.count(key)) throw Error("unknown config key '" + key + "'");
        }
    }

private:
    std::optional<std::string> take(const std::string& key) {
        consumed_.insert(key);
        const auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        return it->second;
    }

    std::map<std::string, std::string> values_;
    std::set<std::string> consumed_;
};

inline void apply_config(Config& c, SegmentationParams& p) {
    c.read("ransac_distance_threshold", p.ransac_distance_threshold);
    c.read("ransac_iterations", p.ransac_iterations);
    Vector3 low(p.hsv_low.h, p.hsv_low.s, p.hsv_low.v);
    Vector3 high(p.hsv_high.h, p.hsv_high.s, p.hsv_high.v);
    c.read("hsv_low", low);
    c.read("hsv_high", high);
    p.hsv_low = Hsv{low.x(), low.y(), low.z()};
    p.hsv_high = Hsv{high.x(), high.y(), high.z()};
    c.read("smoothness_threshold_deg", p.smoothness_threshold_deg);
    c.read("neighbor_k", p.neighbor_k);
    c.read("distance_factor", p.distance_factor);
    c.read("min_cluster_size", p.min_cluster_size);
    c.read("rng_seed", p.rng_seed);
    c.read("normal_hint", p.normal_hint);
    p.validate();
}

inline void apply_config(Config& c, SyntheticArm& a) {
    c.read("arm_radius", a.radius);
    c.read("arm_length", a.length);
    c.read("arm_spacing", a.spacing);
    c.read("arm_axis_height", a.axis_height);
    a.validate();
}

inline void apply_config(Config& c, GestureSpec& g) {
    std::string kind(gesture_name(g.kind));
    c.read("kind", kind);
    g.kind = parse_gesture(kind);
    std::string direction = g.direction == StrokeDirection::longitudinal ? "longitudinal" : "lateral";
    c.read("direction", direction);
    if (direction == "longitudinal") {
        g.direction = StrokeDirection::longitudinal;
    } else if (direction == "lateral") {
        g.direction = StrokeDirection::lateral;
    } else {
        throw Error("direction must be longitudinal or lateral");
    }
    std::string patch = g.patch == PatchShape::rectangle ? "rectangle" : "disk";
    c.read("patch", patch);
    if (patch == "rectangle") {
        g.patch = PatchShape::rectangle;
    } else if (patch == "disk") {
        g.patch = PatchShape::disk;
    } else {
        throw Error("patch must be rectangle or disk");
    }
    c.read("speed_cm_s", g.speed_cm_s);
    c.read("depth_mm", g.depth_mm);
    c.read("patch_width", g.patch_width);
    c.read("patch_height", g.patch_height);
    c.read("patch_radius", g.patch_radius);
    c.read("patch_spacing", g.patch_spacing);
    c.read("duration_s", g.duration_s);
    c.read("repetitions", g.repetitions);
    c.read("frame_rate", g.frame_rate);
    c.read("noise_mm", g.noise_mm);
    c.read("seed", g.seed);
    c.read("airborne_mm", g.airborne_mm);
    c.read("ref_height", g.ref_height);
    c.read("center_y", g.center_y);
    g.validate();
}

inline void apply_config(Config& c, ForestParams& f) {
    c.read("n_trees", f.n_trees);
    c.read("max_depth", f.max_depth);
    c.read("min_samples_split", f.min_samples_split);
    c.read("max_features", f.max_features);
    c.read("bootstrap", f.bootstrap);
    require(f.n_trees > 0, "n_trees must be positive");
    require(f.min_samples_split >= 2, "min_samples_split must be at least 2");
}

}  // namespace touchtrack
