#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hwbeam/random.hpp"

namespace hwbeam {

enum class Side { Top, Bottom };

inline const char* to_string(Side s) { return s == Side::Top ? "top" : "bottom"; }

/// One-dimensional point pattern on [0, length]: strictly increasing
/// coordinates in meters plus the generating density (points per meter).
struct PointProcess1D {
    std::vector<double> points;
    double density = 0.0;
    Side side = Side::Top;
};

/// Blockage model: blockages of length tau0 at rate lambda_block per meter on
/// each side. A link survives (line of sight) with probability
/// exp(-tau0 * lambda_block_side).
struct LosModel {
    double tau0 = 0.0;
    double lambda_block_top = 0.0;
    double lambda_block_bottom = 0.0;

    double los_probability(Side s) const {
        const double lb = (s == Side::Top) ? lambda_block_top : lambda_block_bottom;
        return std::exp(-tau0 * lb);
    }

    void validate() const {
        if (!(tau0 >= 0.0) || !(lambda_block_top >= 0.0) || !(lambda_block_bottom >= 0.0))
            throw std::invalid_argument("LosModel: tau0 and blockage densities must be >= 0");
    }
};

/// Sample a homogeneous Poisson point process of the given density on
/// [0, length] via exponential gaps. Count is Poisson(density * length) and,
/// given the count, points are i.i.d. uniform.
inline PointProcess1D sample_ppp(double density, double length, Seed seed,
                                 Side side = Side::Top) {
    if (!std::isfinite(density) || density < 0.0)
        throw std::invalid_argument("sample_ppp: density must be finite and >= 0");
    if (!std::isfinite(length) || length <= 0.0)
        throw std::invalid_argument("sample_ppp: length must be finite and > 0");

    PointProcess1D pp;
    pp.density = density;
    pp.side = side;
    if (density == 0.0) return pp;

    Rng rng(seed);
    double x = rng.exponential(density);
    while (x < length) {
        if (pp.points.empty() || x > pp.points.back()) pp.points.push_back(x);
        x += rng.exponential(density);
    }
    return pp;
}

/// Independent thinning: each point survives with the side's line-of-sight
/// probability. The resulting process has density density * P_los.
inline PointProcess1D thin_los(const PointProcess1D& pp, const LosModel& los, Seed seed) {
    los.validate();
    const double p = los.los_probability(pp.side);
    PointProcess1D out;
    out.side = pp.side;
    out.density = pp.density * p;
    if (p >= 1.0) {
        out.points = pp.points;
        return out;
    }
    Rng rng(seed);
    out.points.reserve(pp.points.size());
    for (double x : pp.points)
        if (rng.bernoulli(p)) out.points.push_back(x);
    return out;
}

/// Empirical statistics of the gaps between consecutive points. count == 0
/// signals that fewer than two points were available.
struct GapStats {
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0;
};

inline GapStats gap_distribution_check(const PointProcess1D& pp) {
    GapStats st;
    if (pp.points.size() < 2) return st;
    // Welford over consecutive gaps
    double mean = 0.0, m2 = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 1; i < pp.points.size(); ++i) {
        const double gap = pp.points[i] - pp.points[i - 1];
        ++n;
        const double d = gap - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (gap - mean);
    }
    st.count = n;
    st.mean = mean;
    st.variance = (n > 1) ? m2 / static_cast<double>(n - 1) : 0.0;
    return st;
}

}  // namespace hwbeam
