#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "touchtrack/error.hpp"

namespace touchtrack {

// Scalar time series: parallel timestamp/value arrays.
struct TimeSeries {
    std::vector<double> t;
    std::vector<double> value;

    std::size_t size() const { return t.size(); }
};

struct Resampled {
    TimeSeries series;
    std::size_t dropped = 0;  // queries outside the reference span
};

// Linear interpolation of the reference at each query time. Queries that hit a
// stored timestamp return the stored value unchanged.
inline Resampled resample_to(const TimeSeries& reference, const std::vector<double>& query) {
    if (reference.t.size() != reference.value.size()) {
        throw Error("reference timestamps and values differ in length");
    }
    if (reference.size() < 2) {
        throw Error("resampling needs at least two reference samples");
    }
    for (std::size_t i = 1; i < reference.size(); ++i) {
        if (!(reference.t[i] > reference.t[i - 1])) {
            throw Error("reference timestamps must be strictly increasing");
        }
    }
    Resampled out;
    for (double q : query) {
        if (q < reference.t.front() || q > reference.t.back()) {
            ++out.dropped;
            continue;
        }
        const auto upper = std::lower_bound(reference.t.begin(), reference.t.end(), q);
        const auto i = static_cast<std::size_t>(upper - reference.t.begin());
        double v = 0.0;
        if (reference.t[i] == q) {
            v = reference.value[i];
        } else {
            const double t0 = reference.t[i - 1];
            const double t1 = reference.t[i];
            const double v0 = reference.value[i - 1];
            const double v1 = reference.value[i];
            v = v0 + (v1 - v0) * ((q - t0) / (t1 - t0));
        }
        out.series.t.push_back(q);
        out.series.value.push_back(v);
    }
    return out;
}

struct ErrorStats {
    std::size_t n = 0;
    double mean_abs = 0.0;
    double rms = 0.0;
    double max_abs = 0.0;
    // Per-trial framing: |mean(a) - mean(b)|.
    double mean_difference = 0.0;
};

inline ErrorStats summarize_errors(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        throw Error("series lengths differ");
    }
    ErrorStats s;
    s.n = a.size();
    if (a.empty()) return s;
    double sum_abs = 0.0;
    double sum_sq = 0.0;
    double sum_a = 0.0;
    double sum_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double e = std::abs(a[i] - b[i]);
        sum_abs += e;
        sum_sq += e * e;
        s.max_abs = std::max(s.max_abs, e);
        sum_a += a[i];
        sum_b += b[i];
    }
    const double n = static_cast<double>(a.size());
    s.mean_abs = sum_abs / n;
    s.rms = std::sqrt(sum_sq / n);
    s.mean_difference = std::abs(sum_a - sum_b) / n;
    return s;
}

struct PointwiseError {
    std::vector<double> errors;  // b - a per time point
    ErrorStats stats;
};

inline PointwiseError pointwise_error(const TimeSeries& a, const TimeSeries& b) {
    if (a.size() != b.size() || a.value.size() != b.value.size() || a.size() != a.value.size()) {
        throw Error("series lengths differ");
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.t[i] != b.t[i]) {
            throw Error("series timestamps differ");
        }
    }
    PointwiseError out;
    out.errors.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out.errors.push_back(b.value[i] - a.value[i]);
    out.stats = summarize_errors(a.value, b.value);
    return out;
}

struct DtwAlignment {
    std::vector<std::pair<std::size_t, std::size_t>> path;  // (index in a, index in b), monotone
    double cost = 0.0;
    std::vector<double> pair_errors;  // |a_i - b_j| along the path
};

// Classic DTW: local cost |a_i - b_j|, steps (1,0), (0,1), (1,1), no window.
// Backtracking prefers the diagonal, then a-advance, then b-advance on ties.
inline DtwAlignment dtw_align(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) {
        throw Error("dtw needs non-empty series");
    }
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> acc((n + 1) * (m + 1), inf);
    auto at = [&](std::size_t i, std::size_t j) -> double& { return acc[i * (m + 1) + j]; };
    at(0, 0) = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= m; ++j) {
            const double local = std::abs(a[i - 1] - b[j - 1]);
            at(i, j) = local + std::min({at(i - 1, j - 1), at(i - 1, j), at(i, j - 1)});
        }
    }

    DtwAlignment out;
    out.cost = at(n, m);
    std::size_t i = n;
    std::size_t j = m;
    while (true) {
        out.path.emplace_back(i - 1, j - 1);
        if (i == 1 && j == 1) break;
        const double diag = at(i - 1, j - 1);
        const double up = at(i - 1, j);
        const double left = at(i, j - 1);
        if (diag <= up && diag <= left) {
            --i;
            --j;
        } else if (up <= left) {
            --i;
        } else {
            --j;
        }
    }
    std::reverse(out.path.begin(), out.path.end());
    out.pair_errors.reserve(out.path.size());
    for (const auto& [pi, pj] : out.path) out.pair_errors.push_back(std::abs(a[pi] - b[pj]));
    return out;
}

}  // namespace touchtrack
