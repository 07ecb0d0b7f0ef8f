#pragma once

// Shared oracles and statistics helpers for the test suite. Everything here
// is deliberately independent of the library implementation paths it checks:
// beam indices come from angles, serving sites from brute-force distance
// scans, and distributions from direct sampling.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "hwbeam/random.hpp"

namespace testing_support {

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
    std::size_t count = 0;
};

inline Moments moments(const std::vector<double>& xs) {
    Moments m;
    m.count = xs.size();
    if (xs.empty()) return m;
    double s = 0.0;
    for (double x : xs) s += x;
    m.mean = s / static_cast<double>(xs.size());
    double q = 0.0;
    for (double x : xs) q += (x - m.mean) * (x - m.mean);
    m.variance = xs.size() > 1 ? q / static_cast<double>(xs.size() - 1) : 0.0;
    return m;
}

/// One-sample Kolmogorov-Smirnov statistic against an exact cdf.
template <class Cdf>
double ks_statistic(std::vector<double> samples, const Cdf& cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

/// Asymptotic 5% critical value for the one-sample KS test.
inline double ks_critical_5pct(std::size_t n) { return 1.3581 / std::sqrt(static_cast<double>(n)); }

/// Angle-based beam index: sector of atan((x - site)/w) in a codebook of n_c
/// sectors, sector 0 centered on broadside. Independent of the library's
/// tangent-threshold route.
inline int beam_index_by_angle(double vu_x, double site_x, double w, int n_c) {
    const double theta = std::atan2(vu_x - site_x, w);
    const double sector = 2.0 * std::numbers::pi / n_c;
    return static_cast<int>(std::floor((theta + 0.5 * sector) / sector));
}

/// Exact beam-switch count for a traversal from site1 (at 0) to site2 (at d),
/// both at lateral distance w, handover at the midpoint. Counts changes of
/// the (serving site, angle-based beam) pair at probe points placed between
/// consecutive candidate boundaries, so no step resolution is involved.
inline int ray_trace_pair_switches(double d, double w, int n_c) {
    std::vector<double> candidates{0.0, d};
    for (int k = 0; k < n_c / 4; ++k) {
        const double a = std::tan(std::numbers::pi / n_c + 2.0 * k * std::numbers::pi / n_c);
        for (double site : {0.0, d})
            for (double sign : {-1.0, 1.0}) {
                const double pos = site + sign * w * a;
                if (pos > 0.0 && pos < d) candidates.push_back(pos);
            }
    }
    candidates.push_back(d / 2.0);
    std::sort(candidates.begin(), candidates.end());
    int switches = 0;
    int prev_site = -1, prev_beam = 0;
    for (std::size_t i = 0; i + 1 < candidates.size(); ++i) {
        if (candidates[i + 1] - candidates[i] <= 0.0) continue;
        const double probe = 0.5 * (candidates[i] + candidates[i + 1]);
        const int site = probe < d / 2.0 ? 0 : 1;
        const double site_x = site == 0 ? 0.0 : d;
        const int beam = beam_index_by_angle(probe, site_x, w, n_c);
        if (prev_site == site && prev_beam != beam) ++switches;
        prev_site = site;
        prev_beam = beam;
    }
    return switches;
}

}  // namespace testing_support
