#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "touchtrack/touchtrack.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace touchtrack;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInvalid = 2;

void write_json(const fs::path& path, const json& j) { io::write_text(path, j.dump(2) + "\n"); }

json stats_json(const ErrorStats& s) {
    return json{{"n", s.n}, {"mean_abs", s.mean_abs}, {"rms", s.rms}, {"max_abs", s.max_abs},
                {"mean_difference", s.mean_difference}};
}

Config load_config(const std::string& file, const std::vector<std::string>& overrides) {
    Config c = file.empty() ? Config{} : Config::load(file);
    for (const auto& o : overrides) c.set_assignment(o);
    return c;
}

ArmBasis basis_from_flags(const std::string& vertical, const std::string& camera_y) {
    return build_arm_basis(UnitVector3::normalized(Config::parse_triple(vertical, "--vertical")),
                           UnitVector3::normalized(Config::parse_triple(camera_y, "--camera-y")));
}

SeriesOptions series_options(const std::string& gate, std::size_t smooth) {
    SeriesOptions o;
    if (gate == "contact") {
        o.gate = VelocityGate::contact_only;
    } else if (gate == "all") {
        o.gate = VelocityGate::all;
    } else {
        throw Error("--gate must be contact or all");
    }
    o.smoothing_window = smooth;
    return o;
}

// ---- segment ----

struct SegmentArgs {
    std::string scene;
    std::string output;
    std::string config;
    std::vector<std::string> overrides;
    std::string mode = "plane";
    double leaf = 0.0;
    std::string labels;
};

int run_segment(const SegmentArgs& a) {
    Config cfg = load_config(a.config, a.overrides);
    SegmentationParams params;
    apply_config(cfg, params);
    std::string mode = a.mode;
    double leaf = a.leaf;
    cfg.read("mode", mode);
    cfg.read("leaf", leaf);
    cfg.require_all_consumed();
    RemovalMode removal = RemovalMode::plane;
    if (mode == "color") {
        removal = RemovalMode::color;
    } else if (mode != "plane") {
        throw Error("mode must be plane or color");
    }
    if (leaf < 0.0) throw Error("leaf must be non-negative");
    if (leaf > 0.0 && !a.labels.empty()) throw Error("--labels cannot be combined with voxel downsampling");

    PointCloud scene = io::load_cloud(a.scene);
    if (scene.empty()) throw Error("empty cloud");
    if (leaf > 0.0) scene = voxel_downsample(scene, leaf);
    const ArmExtraction ex = extract_arm(scene, params, removal);
    io::save_cloud(a.output, ex.arm);

    json summary{{"scene_points", scene.size()}, {"arm_points", ex.arm.size()},
                 {"mean_neighbor_distance", *ex.arm.mean_neighbor_distance}};
    if (!a.labels.empty()) {
        const auto labels = io::labels_from_csv(io::read_text(a.labels));
        if (labels.size() != scene.size()) throw Error("label count differs from scene point count");
        std::size_t positives = 0;
        std::size_t hits = 0;
        for (auto l : labels) positives += l;
        for (std::size_t i : ex.scene_indices) hits += labels[i];
        summary["recall"] = positives ? static_cast<double>(hits) / static_cast<double>(positives) : 0.0;
        summary["precision"] = static_cast<double>(hits) / static_cast<double>(ex.arm.size());
    }
    std::cout << summary.dump() << "\n";
    return kExitOk;
}

// ---- analyze ----

struct AnalyzeArgs {
    std::string arm;
    std::string hand;
    std::string output;
    std::string summary;
    std::string vertical = "0,0,1";
    std::string camera_y = "0,1,0";
    std::string gate = "contact";
    std::size_t smooth = 1;
};

int run_analyze(const AnalyzeArgs& a) {
    PointCloud arm_cloud = io::load_cloud(a.arm);
    if (arm_cloud.empty()) throw Error("empty arm cloud");
    if (!arm_cloud.normals) throw Error("arm lacks normals");
    const PreparedArm arm(std::move(arm_cloud));
    const auto frames = io::load_hand_sequence(a.hand);
    if (frames.empty()) throw Error("empty hand sequence");
    const ArmBasis basis = basis_from_flags(a.vertical, a.camera_y);
    const AttributeSeries series = build_series(frames, arm, basis, series_options(a.gate, a.smooth));
    io::save_series(a.output, series);
    const json summary = io::series_summary(series);
    if (!a.summary.empty()) write_json(a.summary, summary);
    std::cout << summary.dump() << "\n";
    return kExitOk;
}

// ---- compare ----

struct CompareArgs {
    std::string a;
    std::string b;
    std::string method = "resample";
    std::string output;
};

std::vector<double> numeric_column(const io::Table& t, std::size_t c, const std::string& what) {
    std::vector<double> out;
    out.reserve(t.rows.size());
    for (const auto& row : t.rows) out.push_back(io::parse_double(row[c], what));
    return out;
}

int run_compare(const CompareArgs& args) {
    const io::Table ta = io::parse_table(io::read_text(args.a), args.a);
    const io::Table tb = io::parse_table(io::read_text(args.b), args.b);
    if (ta.header != tb.header) throw Error("column headers differ");
    if (ta.header.empty() || ta.header.front() != "t_s") throw Error("first column must be t_s");
    if (ta.rows.empty() || tb.rows.empty()) throw Error("series must not be empty");
    if (args.method != "resample" && args.method != "dtw") throw Error("--method must be resample or dtw");

    const auto t_a = numeric_column(ta, 0, args.a);
    const auto t_b = numeric_column(tb, 0, args.b);
    json report{{"method", args.method}, {"rows_a", ta.rows.size()}, {"rows_b", tb.rows.size()}};
    json columns = json::object();
    std::size_t dropped = 0;
    for (std::size_t c = 1; c < ta.header.size(); ++c) {
        const auto va = numeric_column(ta, c, args.a);
        const auto vb = numeric_column(tb, c, args.b);
        if (args.method == "resample") {
            const Resampled r = resample_to(TimeSeries{t_b, vb}, t_a);
            dropped = r.dropped;
            std::vector<double> kept;
            for (std::size_t i = 0; i < t_a.size(); ++i) {
                if (t_a[i] >= t_b.front() && t_a[i] <= t_b.back()) kept.push_back(va[i]);
            }
            columns[ta.header[c]] = stats_json(summarize_errors(kept, r.series.value));
        } else {
            const DtwAlignment d = dtw_align(va, vb);
            std::vector<double> pa;
            std::vector<double> pb;
            for (const auto& [i, j] : d.path) {
                pa.push_back(va[i]);
                pb.push_back(vb[j]);
            }
            json s = stats_json(summarize_errors(pa, pb));
            s["cost"] = d.cost;
            s["path_length"] = d.path.size();
            columns[ta.header[c]] = s;
        }
    }
    report["columns"] = columns;
    if (args.method == "resample") report["dropped"] = dropped;
    if (!args.output.empty()) write_json(args.output, report);
    if (columns.contains("v_abs_cm_s")) {
        std::cout << "mean |velocity error| v_abs_cm_s: " << io::format_double(columns["v_abs_cm_s"]["mean_abs"].get<double>())
                  << "\n";
    }
    std::cout << report.dump() << "\n";
    return kExitOk;
}

// ---- classify ----

struct ClassifyArgs {
    std::string manifest;
    std::string target = "gesture";
    std::uint64_t seed = 1;
    double split = 0.75;
    double alpha = 0.05;
    std::string features = "full";
    std::size_t repetitions = 100;
    std::size_t permutations = 10;
    std::string output;
    std::string config;
    std::vector<std::string> overrides;
    std::string vertical = "0,0,1";
    std::string camera_y = "0,1,0";
};

int run_classify(const ClassifyArgs& a) {
    Config cfg = load_config(a.config, a.overrides);
    ForestParams forest;
    apply_config(cfg, forest);
    cfg.require_all_consumed();
    forest.seed = a.seed;
    if (a.features != "full" && a.features != "mean") throw Error("--features must be full or mean");
    if (a.target != "gesture" && a.target != "message" && a.target != "toucher") {
        throw Error("--target must be gesture, message or toucher");
    }

    const auto trials = io::load_manifest(a.manifest);
    const ArmBasis basis = basis_from_flags(a.vertical, a.camera_y);
    std::map<fs::path, PreparedArm> arms;
    LabeledDataset dataset;
    std::vector<std::string> ids;
    for (const auto& trial : trials) {
        auto it = arms.find(trial.arm_file);
        if (it == arms.end()) {
            PointCloud cloud = io::load_cloud(trial.arm_file);
            if (!cloud.normals) throw Error("arm lacks normals: " + trial.arm_file.string());
            it = arms.emplace(trial.arm_file, PreparedArm(std::move(cloud))).first;
        }
        const auto frames = io::load_hand_sequence(trial.hand_seq_file);
        AttributeSeries series = build_series(frames, it->second, basis);
        series.labels = trial.labels;
        FeatureVector fv;
        try {
            fv = a.features == "full" ? extract_features(series) : extract_mean_features(series);
        } catch (const Error& e) {
            throw Error("trial " + trial.trial_id + ": " + e.what());
        }
        const std::string& label = a.target == "gesture"   ? trial.labels.gesture
                                   : a.target == "message" ? trial.labels.message
                                                           : trial.labels.toucher;
        dataset.add(fv, label);
        ids.push_back(trial.trial_id);
    }
    dataset.validate();

    const HoldoutResult holdout = evaluate_holdout(dataset, a.split, a.alpha, forest);
    const FeatureSelection& train_sel = holdout.selection;
    const EvaluationReport& eval = holdout.report;

    const FeatureSelection full_sel = select_features(dataset, a.alpha);
    const ImportanceResult importance = permutation_importance(dataset.select_columns(full_sel.indices), forest,
                                                               a.split, a.repetitions, a.permutations, a.seed);
    const AttributeImportance by_attribute = aggregate_by_attribute(importance);

    json report;
    report["target"] = a.target;
    report["classes"] = eval.classes;
    report["chance"] = 1.0 / static_cast<double>(eval.classes.size());
    report["trials"] = dataset.size();
    report["features"] = a.features;
    report["feature_count"] = dataset.feature_names.size();
    report["selected_features"] = train_sel.names;
    report["selection_fallback"] = train_sel.fallback;
    report["train_size"] = holdout.train_size;
    report["test_size"] = eval.truth.size();
    report["accuracy"] = eval.accuracy;
    report["confusion_counts"] = eval.confusion_counts;
    report["confusion_percent"] = eval.confusion_percent;
    json predictions = json::array();
    for (std::size_t i = 0; i < eval.truth.size(); ++i) {
        predictions.push_back({{"truth", eval.truth[i]}, {"predicted", eval.predictions[i]}});
    }
    report["predictions"] = predictions;
    json attr = json::object();
    for (std::size_t i = 0; i < by_attribute.attributes.size(); ++i) attr[by_attribute.attributes[i]] = by_attribute.mean[i];
    json feat = json::object();
    for (std::size_t i = 0; i < importance.feature_names.size(); ++i) feat[importance.feature_names[i]] = importance.mean[i];
    report["importance"] = {{"repetitions", a.repetitions},
                            {"permutations", a.permutations},
                            {"selected_features", full_sel.names},
                            {"by_attribute", attr},
                            {"by_feature", feat}};
    if (!a.output.empty()) write_json(a.output, report);
    std::cout << "accuracy " << io::format_double(eval.accuracy) << " (chance "
              << io::format_double(report["chance"].get<double>()) << ")\n";
    return kExitOk;
}

// ---- simulate ----

struct SimulateArgs {
    std::string spec;
    std::string out_dir;
    std::vector<std::string> overrides;
};

int run_simulate(const SimulateArgs& a) {
    Config cfg = load_config(a.spec, a.overrides);
    SyntheticArm arm;
    GestureSpec gesture;
    apply_config(cfg, arm);
    apply_config(cfg, gesture);
    SceneSpec scene_spec;
    scene_spec.arm.radius = arm.radius;
    scene_spec.arm.length = arm.length;
    scene_spec.arm.spacing = arm.spacing;
    std::string support = "table";
    cfg.read("scene_support", support);
    cfg.read("scene_noise_mm", scene_spec.noise_mm);
    cfg.read("scene_seed", scene_spec.seed);
    cfg.require_all_consumed();
    if (support == "cushion") {
        scene_spec.support = SceneSupport::cushion;
    } else if (support != "table") {
        throw Error("scene_support must be table or cushion");
    }

    const GeneratedGesture gen = generate_gesture(arm, gesture);
    const SyntheticScene scene = make_scene(scene_spec);
    const fs::path out(a.out_dir);
    fs::create_directories(out);
    io::save_cloud(out / "scene.csv", scene.cloud);
    io::write_text(out / "scene_labels.csv", io::labels_to_csv(scene.labels));
    io::save_cloud(out / "arm.csv", make_arm(arm));
    io::save_hand_sequence(out / "hand.jsonl", gen.frames);
    const AttributeSeries truth = truth_series(gen.truth, synthetic_arm_basis());
    io::save_series(out / "truth.csv", truth);

    json intervals = json::array();
    for (const auto& [begin, end] : gen.truth.contact_intervals) intervals.push_back({begin, end});
    json truth_json{{"gesture", std::string(gesture_name(gesture.kind))},
                    {"frames", gen.truth.size()},
                    {"frame_rate_hz", gen.truth.frame_rate},
                    {"duration_s", gen.truth.duration_s},
                    {"contact_intervals", intervals},
                    {"episodes", count_episodes(gen.truth.contact)},
                    {"patch_area_cm2", gen.truth.patch_area_cm2},
                    {"vertices_per_frame", gen.frames.front().vertices.size()}};
    write_json(out / "truth.json", truth_json);
    std::cout << truth_json.dump() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"touchtrack: contact attributes from hand and forearm point clouds"};
    app.require_subcommand(1);

    SegmentArgs seg;
    auto* cmd_seg = app.add_subcommand("segment", "extract the forearm from a scene cloud");
    cmd_seg->add_option("scene", seg.scene, "scene cloud CSV")->required();
    cmd_seg->add_option("-o,--output", seg.output, "arm cloud CSV to write")->required();
    cmd_seg->add_option("--config", seg.config, "key = value parameter file");
    cmd_seg->add_option("--set", seg.overrides, "key=value override")->take_all();
    cmd_seg->add_option("--mode", seg.mode, "background removal: plane or color");
    cmd_seg->add_option("--leaf", seg.leaf, "voxel size in meters, 0 disables downsampling");
    cmd_seg->add_option("--labels", seg.labels, "per-point arm labels for recall/precision");

    AnalyzeArgs ana;
    auto* cmd_ana = app.add_subcommand("analyze", "per-frame contact attributes for one trial");
    cmd_ana->add_option("arm", ana.arm, "arm cloud CSV with normals")->required();
    cmd_ana->add_option("hand", ana.hand, "hand sequence (JSON lines)")->required();
    cmd_ana->add_option("-o,--output", ana.output, "attribute CSV to write")->required();
    cmd_ana->add_option("--summary", ana.summary, "summary JSON to write");
    cmd_ana->add_option("--vertical", ana.vertical, "vertical sample normal nx,ny,nz");
    cmd_ana->add_option("--camera-y", ana.camera_y, "camera y axis nx,ny,nz");
    cmd_ana->add_option("--gate", ana.gate, "velocity gate: contact or all");
    cmd_ana->add_option("--smooth", ana.smooth, "odd moving-average window for velocities");

    CompareArgs cmp;
    auto* cmd_cmp = app.add_subcommand("compare", "error report between two series files");
    cmd_cmp->add_option("a", cmp.a, "reference series CSV")->required();
    cmd_cmp->add_option("b", cmp.b, "compared series CSV")->required();
    cmd_cmp->add_option("--method", cmp.method, "resample or dtw");
    cmd_cmp->add_option("-o,--output", cmp.output, "report JSON to write");

    ClassifyArgs cls;
    auto* cmd_cls = app.add_subcommand("classify", "features, selection, forest and importance over a manifest");
    cmd_cls->add_option("manifest", cls.manifest, "trial manifest CSV")->required();
    cmd_cls->add_option("--target", cls.target, "gesture, message or toucher");
    cmd_cls->add_option("--seed", cls.seed, "random seed");
    cmd_cls->add_option("--split", cls.split, "training fraction");
    cmd_cls->add_option("--alpha", cls.alpha, "false discovery rate for feature selection");
    cmd_cls->add_option("--features", cls.features, "full or mean");
    cmd_cls->add_option("--repetitions", cls.repetitions, "importance repetitions");
    cmd_cls->add_option("--permutations", cls.permutations, "permutations per repetition");
    cmd_cls->add_option("-o,--output", cls.output, "report JSON to write");
    cmd_cls->add_option("--config", cls.config, "key = value forest parameter file");
    cmd_cls->add_option("--set", cls.overrides, "key=value override")->take_all();
    cmd_cls->add_option("--vertical", cls.vertical, "vertical sample normal nx,ny,nz");
    cmd_cls->add_option("--camera-y", cls.camera_y, "camera y axis nx,ny,nz");

    SimulateArgs sim;
    auto* cmd_sim = app.add_subcommand("simulate", "synthetic scene, arm, hand sequence and ground truth");
    cmd_sim->add_option("spec", sim.spec, "gesture spec (key = value); defaults when omitted");
    cmd_sim->add_option("-o,--output", sim.out_dir, "output directory")->required();
    cmd_sim->add_option("--set", sim.overrides, "key=value override")->take_all();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    try {
        if (*cmd_seg) return run_segment(seg);
        if (*cmd_ana) return run_analyze(ana);
        if (*cmd_cmp) return run_compare(cmp);
        if (*cmd_cls) return run_classify(cls);
        if (*cmd_sim) return run_simulate(sim);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}
