#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "touchtrack/contact.hpp"
#include "touchtrack/geometry.hpp"
#include "touchtrack/kinematics.hpp"

namespace touchtrack::io {

namespace fs = std::filesystem;

// Shortest text that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split(std::string_view line, char sep = ',') {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline double parse_double(std::string_view s, std::string_view what) {
    s = trim(s);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw Error("invalid number '" + std::string(s) + "' in " + std::string(what));
    }
    return v;
}

inline long long parse_int(std::string_view s, std::string_view what) {
    s = trim(s);
    long long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw Error("invalid integer '" + std::string(s) + "' in " + std::string(what));
    }
    return v;
}

inline std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("write failed for " + path.string());
}

inline std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

// Comma-separated table with a header row; blank lines are skipped.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return i;
        }
        throw Error("missing column '" + std::string(name) + "'");
    }
};

inline Table parse_table(const std::string& text, std::string_view what) {
    Table t;
    const auto lines = lines_of(text);
    std::size_t i = 0;
    while (i < lines.size() && trim(lines[i]).empty()) ++i;
    if (i == lines.size()) throw Error(std::string(what) + " has no header");
    t.header = split(lines[i]);
    for (++i; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        auto row = split(lines[i]);
        if (row.size() != t.header.size()) {
            throw Error(std::string(what) + " line " + std::to_string(i + 1) + " has " + std::to_string(row.size()) +
                        " fields, expected " + std::to_string(t.header.size()));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

// ---- point clouds: x,y,z[,nx,ny,nz][,r,g,b] ----

inline std::string cloud_to_csv(const PointCloud& cloud) {
    cloud.validate();
    std::string out = "x,y,z";
    if (cloud.normals) out += ",nx,ny,nz";
    if (cloud.colors) out += ",r,g,b";
    out += '\n';
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto& p = cloud.points[i];
        out += format_double(p.x()) + ',' + format_double(p.y()) + ',' + format_double(p.z());
        if (cloud.normals) {
            const auto& n = (*cloud.normals)[i];
            out += ',' + format_double(n.x()) + ',' + format_double(n.y()) + ',' + format_double(n.z());
        }
        if (cloud.colors) {
            const auto& c = (*cloud.colors)[i];
            out += ',' + std::to_string(c[0]) + ',' + std::to_string(c[1]) + ',' + std::to_string(c[2]);
        }
        out += '\n';
    }
    return out;
}

inline PointCloud cloud_from_csv(const std::string& text) {
    const Table t = parse_table(text, "cloud file");
    const std::vector<std::string> xyz{"x", "y", "z"};
    const std::vector<std::string> nrm{"nx", "ny", "nz"};
    const std::vector<std::string> rgb{"r", "g", "b"};
    auto has_at = [&](std::size_t at, const std::vector<std::string>& names) {
        return t.header.size() >= at + 3 && std::equal(names.begin(), names.end(), t.header.begin() + static_cast<std::ptrdiff_t>(at));
    };
    if (!has_at(0, xyz)) throw Error("cloud header must start with x,y,z");
    std::size_t at = 3;
    const bool normals = has_at(at, nrm);
    if (normals) at += 3;
    const bool colors = has_at(at, rgb);
    if (colors) at += 3;
    if (at != t.header.size()) throw Error("unrecognized cloud header");

    PointCloud cloud;
    cloud.points.reserve(t.rows.size());
    if (normals) cloud.normals.emplace().reserve(t.rows.size());
    if (colors) cloud.colors.emplace().reserve(t.rows.size());
    for (const auto& row : t.rows) {
        cloud.points.emplace_back(parse_double(row[0], "cloud"), parse_double(row[1], "cloud"), parse_double(row[2], "cloud"));
        std::size_t c = 3;
        if (normals) {
            cloud.normals->push_back(UnitVector3::from_stored(
                {parse_double(row[c], "cloud"), parse_double(row[c + 1], "cloud"), parse_double(row[c + 2], "cloud")}));
            c += 3;
        }
        if (colors) {
            Rgb rgb_value{};
            for (std::size_t k = 0; k < 3; ++k) {
                const long long v = parse_int(row[c + k], "cloud colors");
                if (v < 0 || v > 255) throw Error("color value out of range 0-255");
                rgb_value[k] = static_cast<std::uint8_t>(v);
            }
            cloud.colors->push_back(rgb_value);
        }
    }
    cloud.validate();
    return cloud;
}

inline PointCloud load_cloud(const fs::path& path) { return cloud_from_csv(read_text(path)); }
inline void save_cloud(const fs::path& path, const PointCloud& cloud) { write_text(path, cloud_to_csv(cloud)); }

inline std::string labels_to_csv(const std::vector<std::uint8_t>& labels) {
    std::string out = "arm\n";
    for (auto l : labels) out += l ? "1\n" : "0\n";
    return out;
}

inline std::vector<std::uint8_t> labels_from_csv(const std::string& text) {
    const Table t = parse_table(text, "label file");
    const std::size_t col = t.column("arm");
    std::vector<std::uint8_t> labels;
    for (const auto& row : t.rows) {
        const long long v = parse_int(row[col], "label file");
        if (v != 0 && v != 1) throw Error("labels must be 0 or 1");
        labels.push_back(static_cast<std::uint8_t>(v));
    }
    return labels;
}

// ---- hand sequences: one JSON object per line ----

inline nlohmann::json triple(const Vector3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

inline Vector3 triple_from(const nlohmann::json& j, std::string_view what) {
    if (!j.is_array() || j.size() != 3) throw Error(std::string(what) + " must be a triple");
    Vector3 v;
    for (int k = 0; k < 3; ++k) {
        if (!j[static_cast<std::size_t>(k)].is_number()) throw Error(std::string(what) + " must be numeric");
        v[k] = j[static_cast<std::size_t>(k)].get<double>();
    }
    return v;
}

inline std::string hand_sequence_to_jsonl(const std::vector<HandFrame>& frames) {
    std::string out;
    for (const auto& f : frames) {
        nlohmann::json rec;
        rec["t"] = f.timestamp;
        rec["ref"] = triple(f.ref_point);
        auto& verts = rec["vertices"] = nlohmann::json::array();
        for (const auto& v : f.vertices) verts.push_back(triple(v));
        out += rec.dump();
        out += '\n';
    }
    return out;
}

inline std::vector<HandFrame> hand_sequence_from_jsonl(const std::string& text) {
    std::vector<HandFrame> frames;
    const auto lines = lines_of(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        const std::string where = "hand sequence line " + std::to_string(i + 1);
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(lines[i]);
        } catch (const nlohmann::json::parse_error&) {
            throw Error(where + ": malformed record");
        }
        if (!rec.is_object() || !rec.contains("t") || !rec.contains("ref") || !rec.contains("vertices")) {
            throw Error(where + ": expected fields t, ref, vertices");
        }
        if (!rec["t"].is_number()) throw Error(where + ": t must be numeric");
        HandFrame f;
        f.timestamp = rec["t"].get<double>();
        f.ref_point = triple_from(rec["ref"], where + " ref");
        if (!rec["vertices"].is_array()) throw Error(where + ": vertices must be a list");
        f.vertices.reserve(rec["vertices"].size());
        for (const auto& v : rec["vertices"]) f.vertices.push_back(triple_from(v, where + " vertex"));
        frames.push_back(std::move(f));
    }
    validate_sequence(frames);
    return frames;
}

inline std::vector<HandFrame> load_hand_sequence(const fs::path& path) {
    return hand_sequence_from_jsonl(read_text(path));
}

inline void save_hand_sequence(const fs::path& path, const std::vector<HandFrame>& frames) {
    write_text(path, hand_sequence_to_jsonl(frames));
}

// ---- attribute series ----

inline const std::vector<std::string>& attribute_columns() {
    static const std::vector<std::string> cols{"t_s",       "contact",   "v_abs_cm_s", "v_lg_cm_s",
                                               "v_lt_cm_s", "v_vt_cm_s", "area_cm2",   "depth_mm"};
    return cols;
}

inline std::string series_to_csv(const AttributeSeries& series) {
    std::string out;
    for (std::size_t i = 0; i < attribute_columns().size(); ++i) {
        if (i) out += ',';
        out += attribute_columns()[i];
    }
    out += '\n';
    for (const auto& r : series.records) {
        out += format_double(r.t) + ',' + (r.contact ? '1' : '0') + ',' + format_double(r.v_abs) + ',' +
               format_double(r.v_lg) + ',' + format_double(r.v_lt) + ',' + format_double(r.v_vt) + ',' +
               format_double(r.area_cm2) + ',' + format_double(r.depth_mm) + '\n';
    }
    return out;
}

// Frame rate and duration are recomputed from the rows.
inline AttributeSeries series_from_csv(const std::string& text) {
    const Table t = parse_table(text, "attribute file");
    if (t.header != attribute_columns()) throw Error("attribute file header does not match the schema");
    AttributeSeries s;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        AttributeRecord r;
        r.t = parse_double(row[0], "attribute file");
        const long long c = parse_int(row[1], "attribute file");
        if (c != 0 && c != 1) throw Error("contact must be 0 or 1");
        r.contact = c == 1;
        r.velocity_valid = i > 0;
        r.v_abs = parse_double(row[2], "attribute file");
        r.v_lg = parse_double(row[3], "attribute file");
        r.v_lt = parse_double(row[4], "attribute file");
        r.v_vt = parse_double(row[5], "attribute file");
        r.area_cm2 = parse_double(row[6], "attribute file");
        r.depth_mm = parse_double(row[7], "attribute file");
        if (i > 0 && !(r.t > s.records.back().t)) throw Error("attribute timestamps must be strictly increasing");
        s.records.push_back(r);
    }
    if (s.records.size() >= 2) {
        std::vector<double> times;
        for (const auto& r : s.records) times.push_back(r.t);
        s.frame_rate = frame_rate_from_timestamps(times);
        s.duration = contact_duration(s.contact_flags(), s.frame_rate);
    }
    return s;
}

inline AttributeSeries load_series(const fs::path& path) { return series_from_csv(read_text(path)); }
inline void save_series(const fs::path& path, const AttributeSeries& s) { write_text(path, series_to_csv(s)); }

// ---- trial manifest ----

struct TrialEntry {
    std::string trial_id;
    TrialLabels labels;
    fs::path arm_file;       // resolved against the manifest directory
    fs::path hand_seq_file;
};

inline const std::vector<std::string>& manifest_columns() {
    static const std::vector<std::string> cols{"trial_id", "gesture", "message", "toucher", "arm_file", "hand_seq_file"};
    return cols;
}

inline std::vector<TrialEntry> manifest_from_csv(const std::string& text, const fs::path& base_dir) {
    const Table t = parse_table(text, "manifest");
    if (t.header != manifest_columns()) throw Error("manifest header does not match the schema");
    std::vector<TrialEntry> out;
    for (const auto& row : t.rows) {
        TrialEntry e;
        e.trial_id = row[0];
        e.labels = TrialLabels{row[1], row[2], row[3]};
        const fs::path arm(row[4]);
        const fs::path hand(row[5]);
        e.arm_file = arm.is_absolute() ? arm : base_dir / arm;
        e.hand_seq_file = hand.is_absolute() ? hand : base_dir / hand;
        out.push_back(std::move(e));
    }
    if (out.empty()) throw Error("manifest lists no trials");
    return out;
}

inline std::vector<TrialEntry> load_manifest(const fs::path& path) {
    return manifest_from_csv(read_text(path), path.parent_path());
}

inline std::string manifest_to_csv(const std::vector<TrialEntry>& entries) {
    std::string out = "trial_id,gesture,message,toucher,arm_file,hand_seq_file\n";
    for (const auto& e : entries) {
        out += e.trial_id + ',' + e.labels.gesture + ',' + e.labels.message + ',' + e.labels.toucher + ',' +
               e.arm_file.generic_string() + ',' + e.hand_seq_file.generic_string() + '\n';
    }
    return out;
}

// Trial summary: duration plus per-attribute means (|x| for signed velocities).
inline nlohmann::json series_summary(const AttributeSeries& s) {
    nlohmann::json j;
    j["frames"] = s.records.size();
    j["contact_frames"] = s.contact_frames();
    j["frame_rate_hz"] = s.frame_rate;
    j["duration_s"] = s.duration;
    j["episodes"] = count_episodes(s.contact_flags());
    const auto means = attribute_means(s);
    nlohmann::json m = nlohmann::json::object();
    for (std::size_t k = 0; k < kAllAttributes.size(); ++k) m[std::string(attribute_name(kAllAttributes[k]))] = means[k];
    j["means"] = m;
    return j;
}

}  // namespace touchtrack::io
