#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "touchtrack/features.hpp"

namespace touchtrack {

struct ForestParams {
    std::size_t n_trees = 100;
    std::size_t max_depth = 0;  // 0: unlimited
    std::size_t min_samples_split = 2;
    std::size_t max_features = 0;  // 0: floor(sqrt(#features)), at least 1
    bool bootstrap = true;
    std::uint64_t seed = 1;
};

// Independent stream seeds derived from a master seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

template <typename T>
void shuffle_with(std::vector<T>& v, std::mt19937_64& rng) {
    // Explicit Fisher-Yates so results do not depend on std::shuffle's
    // implementation.
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(v[i - 1], v[j]);
    }
}

class DecisionTree {
public:
    struct Node {
        int feature = -1;  // -1: leaf
        double threshold = 0.0;
        std::int32_t left = -1;
        std::int32_t right = -1;
        std::vector<double> distribution;  // class frequencies at a leaf
    };

    static DecisionTree fit(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
                            std::size_t n_classes, std::vector<std::size_t> samples, const ForestParams& params,
                            std::size_t max_features, std::mt19937_64& rng) {
        DecisionTree tree;
        tree.n_classes_ = n_classes;
        tree.grow(rows, labels, samples, 0, params, max_features, rng);
        for (const auto& n : tree.nodes_) {
            if (n.feature >= 0) tree.used_features_.push_back(static_cast<std::size_t>(n.feature));
        }
        std::sort(tree.used_features_.begin(), tree.used_features_.end());
        tree.used_features_.erase(std::unique(tree.used_features_.begin(), tree.used_features_.end()),
                                  tree.used_features_.end());
        return tree;
    }

    const std::vector<double>& distribution(const std::vector<double>& row) const {
        std::size_t id = 0;
        while (nodes_[id].feature >= 0) {
            const Node& n = nodes_[id];
            id = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
        }
        return nodes_[id].distribution;
    }

    std::size_t node_count() const { return nodes_.size(); }

    bool uses_feature(std::size_t f) const {
        return std::binary_search(used_features_.begin(), used_features_.end(), f);
    }

private:
    std::int32_t grow(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
                      std::vector<std::size_t>& samples, std::size_t depth, const ForestParams& params,
                      std::size_t max_features, std::mt19937_64& rng) {
        const auto id = static_cast<std::int32_t>(nodes_.size());
        nodes_.emplace_back();

        std::vector<double> counts(n_classes_, 0.0);
        for (std::size_t s : samples) counts[static_cast<std::size_t>(labels[s])] += 1.0;
        const double total = static_cast<double>(samples.size());
        const bool pure = std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0.0; }) <= 1;
        const bool depth_limited = params.max_depth > 0 && depth >= params.max_depth;

        auto make_leaf = [&]() {
            Node& leaf = nodes_[static_cast<std::size_t>(id)];
            leaf.distribution = counts;
            for (double& c : leaf.distribution) c /= total;
            return id;
        };
        if (pure || depth_limited || samples.size() < params.min_samples_split) {
            return make_leaf();
        }

        const std::size_t n_features = rows.front().size();
        std::vector<std::size_t> candidates(n_features);
        std::iota(candidates.begin(), candidates.end(), std::size_t{0});
        shuffle_with(candidates, rng);

        int best_feature = -1;
        double best_threshold = 0.0;
        double best_impurity = std::numeric_limits<double>::infinity();
        std::size_t evaluated = 0;
        std::vector<std::pair<double, int>> column(samples.size());
        for (std::size_t f : candidates) {
            if (evaluated >= max_features) break;
            for (std::size_t k = 0; k < samples.size(); ++k) {
                column[k] = {rows[samples[k]][f], labels[samples[k]]};
            }
            std::sort(column.begin(), column.end());
            if (column.front().first == column.back().first) continue;  // constant here
            ++evaluated;

            std::vector<double> left(n_classes_, 0.0);
            std::vector<double> right = counts;
            double left_sq = 0.0;
            double right_sq = 0.0;
            for (double c : right) right_sq += c * c;
            for (std::size_t k = 0; k + 1 < column.size(); ++k) {
                const auto c = static_cast<std::size_t>(column[k].second);
                left_sq += 2.0 * left[c] + 1.0;
                right_sq -= 2.0 * right[c] - 1.0;
                left[c] += 1.0;
                right[c] -= 1.0;
                if (column[k].first == column[k + 1].first) continue;
                const double nl = static_cast<double>(k + 1);
                const double nr = total - nl;
                // Weighted Gini: nl*(1 - sum pl^2) + nr*(1 - sum pr^2), scaled by total.
                const double impurity = (nl - left_sq / nl) + (nr - right_sq / nr);
                if (impurity < best_impurity) {
                    best_impurity = impurity;
                    best_feature = static_cast<int>(f);
                    double mid = 0.5 * (column[k].first + column[k + 1].first);
                    if (!(mid < column[k + 1].first)) mid = column[k].first;
                    best_threshold = mid;
                }
            }
        }
        if (best_feature < 0) {
            return make_leaf();
        }

        std::vector<std::size_t> left_samples;
        std::vector<std::size_t> right_samples;
        for (std::size_t s : samples) {
            (rows[s][static_cast<std::size_t>(best_feature)] <= best_threshold ? left_samples : right_samples).push_back(s);
        }
        samples.clear();
        samples.shrink_to_fit();
        const std::int32_t left_id = grow(rows, labels, left_samples, depth + 1, params, max_features, rng);
        const std::int32_t right_id = grow(rows, labels, right_samples, depth + 1, params, max_features, rng);
        Node& node = nodes_[static_cast<std::size_t>(id)];
        node.feature = best_feature;
        node.threshold = best_threshold;
        node.left = left_id;
        node.right = right_id;
        return id;
    }

    std::vector<Node> nodes_;
    std::vector<std::size_t> used_features_;
    std::size_t n_classes_ = 0;
};

// Bagged CART ensemble with Gini splits and a random feature subset per node.
class ForestModel {
public:
    static ForestModel fit(const LabeledDataset& train, const ForestParams& params) {
        train.validate();
        if (params.n_trees == 0) throw Error("forest needs at least one tree");
        ForestModel model;
        model.params_ = params;
        model.feature_names_ = train.feature_names;
        model.classes_ = train.classes();
        const std::vector<int> labels = model.encode(train.labels);
        const std::size_t n_features = train.feature_names.size();
        if (n_features == 0) throw Error("forest needs at least one feature");
        const std::size_t max_features =
            params.max_features > 0
                ? std::min(params.max_features, n_features)
                : std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n_features)))));
        model.trees_.reserve(params.n_trees);
        for (std::size_t t = 0; t < params.n_trees; ++t) {
            std::mt19937_64 rng(derive_seed(params.seed, t));
            std::vector<std::size_t> samples(train.size());
            if (params.bootstrap) {
                for (auto& s : samples) s = static_cast<std::size_t>(rng() % train.size());
            } else {
                std::iota(samples.begin(), samples.end(), std::size_t{0});
            }
            model.trees_.push_back(DecisionTree::fit(train.rows, labels, model.classes_.size(), std::move(samples),
                                                     params, max_features, rng));
        }
        return model;
    }

    // Mean of leaf class frequencies across trees.
    std::vector<double> predict_proba(const std::vector<double>& row) const {
        return proba_from_leaves(leaves(row));
    }

    // Index into classes(); ties go to the lowest index.
    std::size_t predict_index(const std::vector<double>& row) const { return index_from_leaves(leaves(row)); }

    // Leaf distribution reached in each tree, in tree order.
    std::vector<const std::vector<double>*> leaves(const std::vector<double>& row) const {
        if (row.size() != feature_names_.size()) throw Error("row width differs from training features");
        std::vector<const std::vector<double>*> out;
        out.reserve(trees_.size());
        for (const auto& tree : trees_) out.push_back(&tree.distribution(row));
        return out;
    }

    std::vector<double> proba_from_leaves(const std::vector<const std::vector<double>*>& leaves) const {
        std::vector<double> p(classes_.size(), 0.0);
        for (const auto* d : leaves) {
            for (std::size_t c = 0; c < p.size(); ++c) p[c] += (*d)[c];
        }
        for (double& v : p) v /= static_cast<double>(trees_.size());
        return p;
    }

    std::size_t index_from_leaves(const std::vector<const std::vector<double>*>& leaves) const {
        const auto p = proba_from_leaves(leaves);
        return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
    }

    const DecisionTree& tree(std::size_t t) const { return trees_.at(t); }

    const std::string& predict(const std::vector<double>& row) const { return classes_[predict_index(row)]; }

    const std::vector<std::string>& classes() const { return classes_; }
    const std::vector<std::string>& feature_names() const { return feature_names_; }
    const ForestParams& params() const { return params_; }
    std::size_t tree_count() const { return trees_.size(); }

private:
    std::vector<int> encode(const std::vector<std::string>& labels) const {
        std::vector<int> out;
        out.reserve(labels.size());
        for (const auto& l : labels) {
            out.push_back(static_cast<int>(std::lower_bound(classes_.begin(), classes_.end(), l) - classes_.begin()));
        }
        return out;
    }

    ForestParams params_;
    std::vector<std::string> feature_names_;
    std::vector<std::string> classes_;
    std::vector<DecisionTree> trees_;
};

struct EvaluationReport {
    double accuracy = 0.0;
    std::vector<std::string> classes;
    std::vector<std::vector<std::size_t>> confusion_counts;  // [true][predicted]
    std::vector<std::vector<double>> confusion_percent;      // rows sum to 100 (empty rows stay 0)
    std::vector<std::string> truth;
    std::vector<std::string> predictions;
};

inline EvaluationReport evaluate(const ForestModel& model, const LabeledDataset& test) {
    EvaluationReport report;
    report.classes = model.classes();
    const std::size_t k = report.classes.size();
    report.confusion_counts.assign(k, std::vector<std::size_t>(k, 0));
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        const auto truth_it = std::lower_bound(report.classes.begin(), report.classes.end(), test.labels[i]);
        if (truth_it == report.classes.end() || *truth_it != test.labels[i]) {
            throw Error("test label was not seen in training");
        }
        const auto t = static_cast<std::size_t>(truth_it - report.classes.begin());
        const std::size_t p = model.predict_index(test.rows[i]);
        report.confusion_counts[t][p] += 1;
        correct += t == p ? 1 : 0;
        report.truth.push_back(test.labels[i]);
        report.predictions.push_back(report.classes[p]);
    }
    report.accuracy = test.size() > 0 ? static_cast<double>(correct) / static_cast<double>(test.size()) : 0.0;
    report.confusion_percent.assign(k, std::vector<double>(k, 0.0));
    for (std::size_t t = 0; t < k; ++t) {
        const double row_total = static_cast<double>(
            std::accumulate(report.confusion_counts[t].begin(), report.confusion_counts[t].end(), std::size_t{0}));
        if (row_total == 0.0) continue;
        for (std::size_t p = 0; p < k; ++p) {
            report.confusion_percent[t][p] = 100.0 * static_cast<double>(report.confusion_counts[t][p]) / row_total;
        }
    }
    return report;
}

struct DatasetSplit {
    LabeledDataset train;
    LabeledDataset test;
};

// Stratified split: round(fraction * n_c) of each class trains, at least one
// instance on each side.
inline DatasetSplit stratified_split(const LabeledDataset& dataset, double fraction, std::uint64_t seed) {
    dataset.validate();
    if (!(fraction > 0.0 && fraction < 1.0)) throw Error("split fraction must lie in (0, 1)");
    const auto classes = dataset.classes();
    std::map<std::string, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < dataset.size(); ++i) members[dataset.labels[i]].push_back(i);
    for (const auto& [label, idx] : members) {
        if (idx.size() < 2) throw Error("class '" + label + "' has fewer than two instances");
    }
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;
    for (const auto& label : classes) {
        std::vector<std::size_t> idx = members[label];
        shuffle_with(idx, rng);
        auto n_train = static_cast<std::size_t>(std::lround(fraction * static_cast<double>(idx.size())));
        n_train = std::clamp<std::size_t>(n_train, 1, idx.size() - 1);
        train_idx.insert(train_idx.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
        test_idx.insert(test_idx.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    auto take = [&](const std::vector<std::size_t>& idx) {
        LabeledDataset d;
        d.feature_names = dataset.feature_names;
        for (std::size_t i : idx) {
            d.rows.push_back(dataset.rows[i]);
            d.labels.push_back(dataset.labels[i]);
        }
        return d;
    };
    return DatasetSplit{take(train_idx), take(test_idx)};
}

struct TrainResult {
    ForestModel model;
    EvaluationReport report;
};

inline TrainResult train_forest(const LabeledDataset& dataset, double split_fraction, const ForestParams& params) {
    const DatasetSplit split = stratified_split(dataset, split_fraction, derive_seed(params.seed, 0xD1CEull));
    ForestModel model = ForestModel::fit(split.train, params);
    EvaluationReport report = evaluate(model, split.test);
    return TrainResult{std::move(model), std::move(report)};
}

struct HoldoutResult {
    FeatureSelection selection;  // chosen on the training part only
    EvaluationReport report;
    std::size_t train_size = 0;
};

// Stratified split, feature selection on the training part, forest fit and
// evaluation on the held-out part.
inline HoldoutResult evaluate_holdout(const LabeledDataset& dataset, double split_fraction, double alpha,
                                      const ForestParams& params) {
    const DatasetSplit split = stratified_split(dataset, split_fraction, derive_seed(params.seed, 0xD1CEull));
    HoldoutResult out;
    out.selection = select_features(split.train, alpha);
    const ForestModel model = ForestModel::fit(split.train.select_columns(out.selection.indices), params);
    out.report = evaluate(model, split.test.select_columns(out.selection.indices));
    out.train_size = split.train.size();
    return out;
}

inline double accuracy_of(const ForestModel& model, const LabeledDataset& test) {
    if (test.size() == 0) return 0.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test.size(); ++i) correct += model.predict(test.rows[i]) == test.labels[i] ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(test.size());
}

struct ImportanceResult {
    std::vector<std::string> feature_names;
    std::vector<std::vector<double>> per_repetition;  // [repetition][feature]: mean accuracy drop
    std::vector<double> mean;                         // per feature
    std::vector<double> baseline_accuracy;            // per repetition
};

// Each repetition draws a fresh stratified split and forest; every feature
// column of the held-out set is permuted permutations_per_rep times and the
// mean accuracy drop is recorded.
inline ImportanceResult permutation_importance(const LabeledDataset& dataset, const ForestParams& params,
                                               double split_fraction, std::size_t repetitions,
                                               std::size_t permutations_per_rep, std::uint64_t seed) {
    dataset.validate();
    if (repetitions == 0 || permutations_per_rep == 0) throw Error("importance needs repetitions and permutations");
    const std::size_t n_features = dataset.feature_names.size();
    ImportanceResult result;
    result.feature_names = dataset.feature_names;
    result.mean.assign(n_features, 0.0);
    for (std::size_t r = 0; r < repetitions; ++r) {
        const std::uint64_t rep_seed = derive_seed(seed, r);
        const DatasetSplit split = stratified_split(dataset, split_fraction, rep_seed);
        ForestParams rep_params = params;
        rep_params.seed = derive_seed(rep_seed, 1);
        const ForestModel model = ForestModel::fit(split.train, rep_params);
        const double base = accuracy_of(model, split.test);
        result.baseline_accuracy.push_back(base);

        // Trees that never split on feature j keep their leaf when j is
        // permuted, so only the others are re-evaluated.
        const std::size_t n_test = split.test.size();
        std::vector<std::vector<const std::vector<double>*>> base_leaves;
        base_leaves.reserve(n_test);
        for (const auto& row : split.test.rows) base_leaves.push_back(model.leaves(row));

        std::vector<double> drops(n_features, 0.0);
        std::vector<double> row;
        for (std::size_t j = 0; j < n_features; ++j) {
            std::vector<std::size_t> affected;
            for (std::size_t t = 0; t < model.tree_count(); ++t) {
                if (model.tree(t).uses_feature(j)) affected.push_back(t);
            }
            double acc_sum = 0.0;
            const std::vector<double> original = split.test.column(j);
            for (std::size_t p = 0; p < permutations_per_rep; ++p) {
                std::mt19937_64 rng(derive_seed(rep_seed, 1000 + j * permutations_per_rep + p));
                std::vector<double> shuffled = original;
                shuffle_with(shuffled, rng);
                std::size_t correct = 0;
                for (std::size_t i = 0; i < n_test; ++i) {
                    std::size_t predicted = 0;
                    if (affected.empty()) {
                        predicted = model.index_from_leaves(base_leaves[i]);
                    } else {
                        row = split.test.rows[i];
                        row[j] = shuffled[i];
                        auto leaves = base_leaves[i];
                        for (std::size_t t : affected) leaves[t] = &model.tree(t).distribution(row);
                        predicted = model.index_from_leaves(leaves);
                    }
                    correct += model.classes()[predicted] == split.test.labels[i] ? 1 : 0;
                }
                acc_sum += static_cast<double>(correct) / static_cast<double>(n_test);
            }
            drops[j] = base - acc_sum / static_cast<double>(permutations_per_rep);
            result.mean[j] += drops[j];
        }
        result.per_repetition.push_back(std::move(drops));
    }
    for (double& m : result.mean) m /= static_cast<double>(repetitions);
    return result;
}

struct AttributeImportance {
    std::vector<std::string> attributes;               // first-appearance order
    std::vector<std::vector<double>> per_repetition;   // [repetition][attribute]
    std::vector<double> mean;
};

// Sums feature importances within each attribute.
inline AttributeImportance aggregate_by_attribute(const ImportanceResult& importance) {
    AttributeImportance out;
    std::vector<std::size_t> owner;
    for (const auto& name : importance.feature_names) {
        const std::string attr = feature_attribute(name);
        auto it = std::find(out.attributes.begin(), out.attributes.end(), attr);
        if (it == out.attributes.end()) {
            out.attributes.push_back(attr);
            it = out.attributes.end() - 1;
        }
        owner.push_back(static_cast<std::size_t>(it - out.attributes.begin()));
    }
    out.mean.assign(out.attributes.size(), 0.0);
    for (const auto& rep : importance.per_repetition) {
        std::vector<double> sums(out.attributes.size(), 0.0);
        for (std::size_t j = 0; j < rep.size(); ++j) sums[owner[j]] += rep[j];
        out.per_repetition.push_back(sums);
    }
    for (std::size_t j = 0; j < importance.mean.size(); ++j) out.mean[owner[j]] += importance.mean[j];
    return out;
}

}  // namespace touchtrack
