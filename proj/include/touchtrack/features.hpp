#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "touchtrack/kinematics.hpp"
#include "touchtrack/stats.hpp"

namespace touchtrack {

struct FeatureVector {
    std::vector<std::string> names;
    std::vector<double> values;
};

// Summary statistics of one contact-gated attribute sequence.
namespace feature {

inline constexpr std::array<std::size_t, 4> kAutocorrelationLags{1, 2, 5, 10};
inline constexpr std::size_t kEntropyBins = 10;

inline double mean(const std::vector<double>& x) {
    if (x.empty()) return 0.0;
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

inline bool is_constant(const std::vector<double>& x) {
    if (x.empty()) return true;
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    return *lo == *hi;
}

// Population variance; exactly 0 for constant input.
inline double variance(const std::vector<double>& x) {
    if (is_constant(x)) return 0.0;
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size());
}

// Linear-interpolated quantile (numpy default).
inline double quantile(std::vector<double> x, double q) {
    if (x.empty()) return 0.0;
    std::sort(x.begin(), x.end());
    const double pos = q * static_cast<double>(x.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, x.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return x[lo] + (x[hi] - x[lo]) * frac;
}

// Least-squares slope against the sample index.
inline double slope(const std::vector<double>& x) {
    if (x.size() < 2 || is_constant(x)) return 0.0;
    const double n = static_cast<double>(x.size());
    const double mean_i = (n - 1.0) / 2.0;
    const double mean_x = mean(x);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double di = static_cast<double>(i) - mean_i;
        num += di * (x[i] - mean_x);
        den += di * di;
    }
    return num / den;
}

inline double skewness(const std::vector<double>& x) {
    const double var = variance(x);
    if (!(var > 0.0)) return 0.0;
    const double m = mean(x);
    double m3 = 0.0;
    for (double v : x) m3 += (v - m) * (v - m) * (v - m);
    m3 /= static_cast<double>(x.size());
    return m3 / std::pow(var, 1.5);
}

// Shannon entropy (nats) of a 10-bin equal-width histogram over the range.
inline double entropy(const std::vector<double>& x) {
    if (is_constant(x)) return 0.0;
    const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
    const double lo = *lo_it;
    const double width = (*hi_it - lo) / static_cast<double>(kEntropyBins);
    std::array<std::size_t, kEntropyBins> counts{};
    for (double v : x) {
        auto bin = static_cast<std::size_t>((v - lo) / width);
        counts[std::min(bin, kEntropyBins - 1)] += 1;
    }
    double h = 0.0;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(x.size());
        h -= p * std::log(p);
    }
    return h;
}

inline double energy(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

// Zero when the lag does not fit or the series has no variance.
inline double autocorrelation(const std::vector<double>& x, std::size_t lag) {
    if (lag >= x.size()) return 0.0;
    const double var = variance(x);
    if (!(var > 0.0)) return 0.0;
    const double m = mean(x);
    double s = 0.0;
    for (std::size_t t = 0; t + lag < x.size(); ++t) s += (x[t] - m) * (x[t + lag] - m);
    return s / (static_cast<double>(x.size() - lag) * var);
}

// |DFT| for bins 0..floor(n/2).
inline std::vector<double> magnitude_spectrum(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<double> mag(n / 2 + 1, 0.0);
    for (std::size_t k = 0; k < mag.size(); ++k) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t t = 0; t < n; ++t) {
            const double angle = -2.0 * std::numbers::pi * static_cast<double>(k * t % n) / static_cast<double>(n);
            acc += x[t] * std::complex<double>(std::cos(angle), std::sin(angle));
        }
        mag[k] = std::abs(acc);
    }
    return mag;
}

struct SpectrumMoments {
    double mean = 0.0;  // centroid in bin units
    double variance = 0.0;
    double skewness = 0.0;
};

// Moments of the bin index weighted by spectral magnitude.
inline SpectrumMoments spectrum_moments(const std::vector<double>& x) {
    SpectrumMoments m;
    if (is_constant(x)) return m;  // DC only
    const auto mag = magnitude_spectrum(x);
    double total = 0.0;
    for (double w : mag) total += w;
    if (!(total > 0.0)) return m;
    for (std::size_t k = 0; k < mag.size(); ++k) m.mean += static_cast<double>(k) * mag[k];
    m.mean /= total;
    double m3 = 0.0;
    for (std::size_t k = 0; k < mag.size(); ++k) {
        const double d = static_cast<double>(k) - m.mean;
        m.variance += d * d * mag[k];
        m3 += d * d * d * mag[k];
    }
    m.variance /= total;
    m3 /= total;
    // Leakage at the 1e-15 level would otherwise make the skew pure noise.
    if (m.variance > 1e-12 * (1.0 + m.mean * m.mean)) {
        m.skewness = m3 / std::pow(m.variance, 1.5);
    } else {
        m.variance = 0.0;
    }
    return m;
}

}  // namespace feature

inline const std::vector<std::string>& statistic_names() {
    static const std::vector<std::string> names{
        "mean",     "max",    "min",   "q1",    "median", "q3",           "std",
        "slope",    "skewness", "entropy", "energy", "acf_1", "acf_2", "acf_5",
        "acf_10",   "spectrum_mean", "spectrum_variance", "spectrum_skewness"};
    return names;
}

// Same order as statistic_names(). The mean uses |x| when signed is set.
inline std::vector<double> series_statistics(const std::vector<double>& x, bool signed_values) {
    using namespace feature;
    std::vector<double> out;
    out.reserve(statistic_names().size());
    if (signed_values) {
        double s = 0.0;
        for (double v : x) s += std::abs(v);
        out.push_back(x.empty() ? 0.0 : s / static_cast<double>(x.size()));
    } else {
        out.push_back(mean(x));
    }
    out.push_back(x.empty() ? 0.0 : *std::max_element(x.begin(), x.end()));
    out.push_back(x.empty() ? 0.0 : *std::min_element(x.begin(), x.end()));
    out.push_back(quantile(x, 0.25));
    out.push_back(quantile(x, 0.5));
    out.push_back(quantile(x, 0.75));
    out.push_back(std::sqrt(variance(x)));
    out.push_back(slope(x));
    out.push_back(skewness(x));
    out.push_back(entropy(x));
    out.push_back(energy(x));
    for (std::size_t lag : kAutocorrelationLags) out.push_back(autocorrelation(x, lag));
    const SpectrumMoments spectrum = spectrum_moments(x);
    out.push_back(spectrum.mean);
    out.push_back(spectrum.variance);
    out.push_back(spectrum.skewness);
    return out;
}

inline std::string feature_name(Attribute a, const std::string& statistic) {
    return std::string(attribute_name(a)) + "__" + statistic;
}

// Attribute a feature belongs to: text before "__", or the whole name.
inline std::string feature_attribute(const std::string& name) {
    const auto pos = name.find("__");
    return pos == std::string::npos ? name : name.substr(0, pos);
}

inline void require_contact_frames(const AttributeSeries& series) {
    if (series.contact_frames() < 2) {
        throw Error("insufficient contact");
    }
}

// Full feature set: every statistic of every attribute over contact frames,
// then duration.
inline FeatureVector extract_features(const AttributeSeries& series) {
    require_contact_frames(series);
    FeatureVector fv;
    for (Attribute a : kAllAttributes) {
        const auto stats = series_statistics(series.contact_values(a), is_signed(a));
        for (std::size_t k = 0; k < stats.size(); ++k) {
            fv.names.push_back(feature_name(a, statistic_names()[k]));
            fv.values.push_back(stats[k]);
        }
    }
    fv.names.emplace_back("duration");
    fv.values.push_back(series.duration);
    return fv;
}

// Mean of each attribute (|x| for signed velocities) plus duration.
inline FeatureVector extract_mean_features(const AttributeSeries& series) {
    require_contact_frames(series);
    FeatureVector fv;
    const auto means = attribute_means(series);
    for (std::size_t k = 0; k < kAllAttributes.size(); ++k) {
        fv.names.push_back(feature_name(kAllAttributes[k], "mean"));
        fv.values.push_back(means[k]);
    }
    fv.names.emplace_back("duration");
    fv.values.push_back(series.duration);
    return fv;
}

struct LabeledDataset {
    std::vector<std::string> feature_names;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;

    std::size_t size() const { return rows.size(); }

    void add(const FeatureVector& fv, const std::string& label) {
        if (rows.empty() && feature_names.empty()) {
            feature_names = fv.names;
        } else if (fv.names != feature_names) {
            throw Error("feature names differ across vectors");
        }
        rows.push_back(fv.values);
        labels.push_back(label);
    }

    // Sorted distinct labels.
    std::vector<std::string> classes() const {
        std::vector<std::string> c = labels;
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
        return c;
    }

    void validate() const {
        if (rows.size() != labels.size()) throw Error("rows and labels differ in length");
        for (const auto& r : rows) {
            if (r.size() != feature_names.size()) throw Error("row width differs from feature count");
            for (double v : r) {
                if (!std::isfinite(v)) throw Error("non-finite feature value");
            }
        }
        if (classes().size() < 2) throw Error("dataset needs at least two classes");
    }

    std::vector<double> column(std::size_t j) const {
        std::vector<double> c;
        c.reserve(rows.size());
        for (const auto& r : rows) c.push_back(r[j]);
        return c;
    }

    LabeledDataset select_columns(const std::vector<std::size_t>& columns) const {
        LabeledDataset out;
        for (std::size_t j : columns) out.feature_names.push_back(feature_names.at(j));
        out.labels = labels;
        out.rows.reserve(rows.size());
        for (const auto& r : rows) {
            std::vector<double> row;
            row.reserve(columns.size());
            for (std::size_t j : columns) row.push_back(r[j]);
            out.rows.push_back(std::move(row));
        }
        return out;
    }
};

struct FeatureSelection {
    std::vector<std::size_t> indices;
    std::vector<std::string> names;
    std::vector<double> p_values;  // one per input feature
    bool fallback = false;         // nothing passed; every feature kept
};

// Rank-based relevance per feature (Mann-Whitney U for two classes,
// Kruskal-Wallis otherwise), then Benjamini-Hochberg at alpha.
inline FeatureSelection select_features(const LabeledDataset& dataset, double alpha) {
    dataset.validate();
    const auto classes = dataset.classes();
    FeatureSelection sel;
    sel.p_values.reserve(dataset.feature_names.size());
    for (std::size_t j = 0; j < dataset.feature_names.size(); ++j) {
        std::vector<std::vector<double>> groups(classes.size());
        for (std::size_t i = 0; i < dataset.size(); ++i) {
            const auto c = static_cast<std::size_t>(
                std::lower_bound(classes.begin(), classes.end(), dataset.labels[i]) - classes.begin());
            groups[c].push_back(dataset.rows[i][j]);
        }
        double p = 1.0;
        if (classes.size() == 2) {
            p = mann_whitney_u(groups[0], groups[1]).p_value;
        } else {
            p = kruskal_wallis(groups).p_value;
        }
        sel.p_values.push_back(p);
    }
    sel.indices = benjamini_hochberg(sel.p_values, alpha);
    if (sel.indices.empty()) {
        sel.fallback = true;
        sel.indices.resize(dataset.feature_names.size());
        std::iota(sel.indices.begin(), sel.indices.end(), std::size_t{0});
    }
    for (std::size_t j : sel.indices) sel.names.push_back(dataset.feature_names[j]);
    return sel;
}

}  // namespace touchtrack
