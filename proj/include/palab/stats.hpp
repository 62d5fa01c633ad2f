#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "palab/errors.hpp"

namespace palab::stats {

inline double mean(std::span<const double> xs) {
    if (xs.empty()) throw DataError("mean of an empty sample");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

/// Unbiased (n - 1) sample variance.
inline double sample_variance(std::span<const double> xs) {
    if (xs.size() < 2) throw DataError("sample variance needs at least two values");
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return ss / static_cast<double>(xs.size() - 1);
}

inline double median_sorted(std::span<const double> sorted) {
    if (sorted.empty()) throw DataError("median of an empty sample");
    const std::size_t m = sorted.size();
    return m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
}

inline double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    return median_sorted(xs);
}

struct Quartiles {
    double q1, median, q3;
};

/// Median-of-halves quartiles: Q1 and Q3 are the medians of the lower and
/// upper halves, the middle element excluded when the count is odd.
inline Quartiles quartiles(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t m = xs.size();
    const double med = median_sorted(xs);
    if (m == 1) return {med, med, med};
    const std::size_t half = m / 2;
    const std::span<const double> all(xs);
    return {median_sorted(all.first(half)), med, median_sorted(all.last(half))};
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw DataError("correlation needs paired samples");
    const double mx = mean(x), my = mean(y);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

inline double normal_quantile(double p) {
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

struct QQPoint {
    double normal_quantile;
    double sample;  // studentized, sorted
};

/// Studentizes the sample, sorts it and pairs it with standard normal
/// quantiles at Blom plotting positions (i - 3/8) / (m + 1/4).
inline std::vector<QQPoint> normal_qq(std::vector<double> xs) {
    const double m = mean(xs);
    const double sd = std::sqrt(sample_variance(xs));
    std::sort(xs.begin(), xs.end());
    std::vector<QQPoint> out;
    out.reserve(xs.size());
    const double count = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double p = (static_cast<double>(i + 1) - 0.375) / (count + 0.25);
        out.push_back({normal_quantile(p), sd > 0.0 ? (xs[i] - m) / sd : 0.0});
    }
    return out;
}

inline double qq_correlation(const std::vector<QQPoint>& qq) {
    std::vector<double> a, b;
    for (const auto& p : qq) {
        a.push_back(p.normal_quantile);
        b.push_back(p.sample);
    }
    return pearson(a, b);
}

}  // namespace palab::stats
