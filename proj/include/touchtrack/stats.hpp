#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "touchtrack/error.hpp"

namespace touchtrack {

// 1-based midranks of values (ties share the average rank).
inline std::vector<double> midranks(const std::vector<double>& values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

// Sum over tie groups of (t^3 - t).
inline double tie_term(const std::vector<double>& values) {
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    double term = 0.0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        term += t * t * t - t;
        i = j + 1;
    }
    return term;
}

struct MannWhitneyResult {
    double u = 0.0;        // U of sample_a: pairs with a > b, ties counted 1/2
    double p_value = 1.0;  // two-sided
    bool exact = false;
};

inline constexpr std::size_t kMannWhitneyNormalMinSize = 8;

// Unpaired Mann-Whitney U. The p-value is exact (permutation distribution of
// the rank sum, ties included) when the smaller sample has fewer than 8
// values, otherwise a tie-corrected normal approximation with continuity
// correction.
inline MannWhitneyResult mann_whitney_u(const std::vector<double>& sample_a, const std::vector<double>& sample_b) {
    if (sample_a.empty() || sample_b.empty()) {
        throw Error("mann-whitney needs non-empty samples");
    }
    const std::size_t na = sample_a.size();
    const std::size_t nb = sample_b.size();
    const std::size_t n = na + nb;
    std::vector<double> pooled = sample_a;
    pooled.insert(pooled.end(), sample_b.begin(), sample_b.end());
    const std::vector<double> ranks = midranks(pooled);
    double rank_sum_a = 0.0;
    for (std::size_t i = 0; i < na; ++i) rank_sum_a += ranks[i];

    MannWhitneyResult result;
    result.u = rank_sum_a - static_cast<double>(na * (na + 1)) / 2.0;
    const double mean_u = static_cast<double>(na * nb) / 2.0;

    if (std::min(na, nb) < kMannWhitneyNormalMinSize) {
        result.exact = true;
        // Doubled midranks are integers; count subsets of the smaller sample's
        // size by doubled rank sum.
        const bool a_small = na <= nb;
        const std::size_t k = a_small ? na : nb;
        std::vector<std::int64_t> doubled(n);
        for (std::size_t i = 0; i < n; ++i) doubled[i] = std::llround(2.0 * ranks[i]);
        std::int64_t observed = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if ((i < na) == a_small) observed += doubled[i];
        }
        const auto max_sum = static_cast<std::size_t>(2 * n * k);
        std::vector<double> ways((k + 1) * (max_sum + 1), 0.0);
        auto cell = [&](std::size_t j, std::size_t s) -> double& { return ways[j * (max_sum + 1) + s]; };
        cell(0, 0) = 1.0;
        for (std::size_t item = 0; item < n; ++item) {
            const auto r = static_cast<std::size_t>(doubled[item]);
            for (std::size_t j = std::min(k, item + 1); j >= 1; --j) {
                for (std::size_t s = max_sum; s >= r; --s) {
                    cell(j, s) += cell(j - 1, s - r);
                    if (s == r) break;
                }
            }
        }
        const auto expected2 = static_cast<std::int64_t>(k * (n + 1));  // doubled mean rank sum
        const std::int64_t observed_dev = std::llabs(observed - expected2);
        double total = 0.0;
        double extreme = 0.0;
        for (std::size_t s = 0; s <= max_sum; ++s) {
            const double w = cell(k, s);
            if (w == 0.0) continue;
            total += w;
            if (std::llabs(static_cast<std::int64_t>(s) - expected2) >= observed_dev) extreme += w;
        }
        result.p_value = std::clamp(extreme / total, 0.0, 1.0);
        return result;
    }

    const double nd = static_cast<double>(n);
    const double variance =
        static_cast<double>(na * nb) / 12.0 * ((nd + 1.0) - tie_term(pooled) / (nd * (nd - 1.0)));
    if (!(variance > 0.0)) {
        result.p_value = 1.0;
        return result;
    }
    const double z = std::max(0.0, std::abs(result.u - mean_u) - 0.5) / std::sqrt(variance);
    result.p_value = std::clamp(std::erfc(z / std::sqrt(2.0)), 0.0, 1.0);
    return result;
}

struct KruskalWallisResult {
    double h = 0.0;
    double p_value = 1.0;
};

// Tie-corrected Kruskal-Wallis H with a chi-square(k - 1) p-value.
inline KruskalWallisResult kruskal_wallis(const std::vector<std::vector<double>>& groups) {
    std::vector<double> pooled;
    std::size_t non_empty = 0;
    for (const auto& g : groups) {
        pooled.insert(pooled.end(), g.begin(), g.end());
        non_empty += g.empty() ? 0 : 1;
    }
    if (non_empty < 2) {
        throw Error("kruskal-wallis needs at least two non-empty groups");
    }
    const std::vector<double> ranks = midranks(pooled);
    const double n = static_cast<double>(pooled.size());
    double h = 0.0;
    std::size_t offset = 0;
    for (const auto& g : groups) {
        if (g.empty()) continue;
        double rank_sum = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) rank_sum += ranks[offset + i];
        offset += g.size();
        h += rank_sum * rank_sum / static_cast<double>(g.size());
    }
    h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);
    const double correction = 1.0 - tie_term(pooled) / (n * n * n - n);
    KruskalWallisResult result;
    if (!(correction > 0.0)) {
        return result;
    }
    result.h = std::max(0.0, h / correction);
    const double df = static_cast<double>(non_empty - 1);
    result.p_value = std::clamp(boost::math::gamma_q(df / 2.0, result.h / 2.0), 0.0, 1.0);
    return result;
}

// Benjamini-Hochberg step-up; returns selected indices in ascending order.
inline std::vector<std::size_t> benjamini_hochberg(const std::vector<double>& p_values, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw Error("alpha must lie in (0, 1)");
    }
    for (double p : p_values) {
        if (!(p >= 0.0 && p <= 1.0)) throw Error("p-values must lie in [0, 1]");
    }
    const std::size_t m = p_values.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
    std::size_t k = 0;
    for (std::size_t rank = 1; rank <= m; ++rank) {
        if (p_values[order[rank - 1]] <= static_cast<double>(rank) * alpha / static_cast<double>(m)) k = rank;
    }
    std::vector<std::size_t> selected(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(selected.begin(), selected.end());
    return selected;
}

}  // namespace touchtrack
