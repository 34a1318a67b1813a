#pragma once

// Similarity and correlation measures over dense numeric vectors.

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

namespace newstopics::stats {

namespace detail {

inline void check_pair(std::span<const double> x, std::span<const double> y, std::size_t min_len) {
    if (x.size() != y.size()) throw ArgumentError("vectors differ in length");
    if (x.size() < min_len) throw ArgumentError("vectors need at least " + std::to_string(min_len) + " entries");
    auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(x.begin(), x.end(), finite) || !std::all_of(y.begin(), y.end(), finite))
        throw ArgumentError("vectors must be finite");
}

}  // namespace detail

/// dot(x, y) / (|x| |y|).
inline double cosine_similarity(std::span<const double> x, std::span<const double> y) {
    detail::check_pair(x, y, 1);
    double dot = 0.0, xx = 0.0, yy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        dot += x[i] * y[i];
        xx += x[i] * x[i];
        yy += y[i] * y[i];
    }
    if (xx == 0.0 || yy == 0.0) throw DataError("undefined similarity: zero vector");
    return dot / (std::sqrt(xx) * std::sqrt(yy));
}

/// Sample Pearson correlation, computed on mean-centred values.
inline double pearson(std::span<const double> x, std::span<const double> y) {
    detail::check_pair(x, y, 2);
    const auto n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw DataError("zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// 1-based ranks; tied values share the average of their positions.
inline std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
        i = j + 1;
    }
    return ranks;
}

inline double spearman(std::span<const double> x, std::span<const double> y) {
    detail::check_pair(x, y, 2);
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return pearson(rx, ry);
}

/// Kendall tau-a: (concordant - discordant) / (n (n - 1) / 2). A pair tied in
/// either vector counts as neither.
inline double kendall_tau(std::span<const double> x, std::span<const double> y) {
    detail::check_pair(x, y, 2);
    long long concordant = 0, discordant = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            const int sx = (x[i] > x[j]) - (x[i] < x[j]);
            const int sy = (y[i] > y[j]) - (y[i] < y[j]);
            if (sx * sy > 0)
                ++concordant;
            else if (sx * sy < 0)
                ++discordant;
        }
    }
    const double pairs = static_cast<double>(x.size()) * static_cast<double>(x.size() - 1) / 2.0;
    return static_cast<double>(concordant - discordant) / pairs;
}

}  // namespace newstopics::stats
