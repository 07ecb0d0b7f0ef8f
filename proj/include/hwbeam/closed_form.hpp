#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "hwbeam/codebook.hpp"
#include "hwbeam/numerics.hpp"

namespace hwbeam {

/// Inputs for the one-side deployment analysis.
struct SingleSideParams {
    double lambda_los = 0.0;  // line-of-sight site density, per meter
    double w = 0.0;           // lateral distance to the site line, meters
    Codebook codebook{4};
    double l_h = 0.0;  // highway length, meters

    void validate() const {
        if (!(lambda_los > 0.0)) throw std::invalid_argument("SingleSideParams: lambda_los must be > 0");
        if (!(w > 0.0)) throw std::invalid_argument("SingleSideParams: w must be > 0");
        if (!(l_h > 0.0)) throw std::invalid_argument("SingleSideParams: l_h must be > 0");
    }
};

/// Inputs for the two-side deployment analysis. The vehicle drives on the top
/// side, so w_t <= w_b. The combined density lambda_tb is always derived.
struct DoubleSideParams {
    double lambda_t_los = 0.0;
    double lambda_b_los = 0.0;
    double w_t = 0.0;
    double w_b = 0.0;
    Codebook codebook{4};
    double l_h = 0.0;

    double lambda_tb() const { return lambda_t_los + lambda_b_los; }
    /// Squared-lateral-distance excess of the far side.
    double c() const { return w_b * w_b - w_t * w_t; }

    void validate() const {
        if (!(lambda_t_los > 0.0))
            throw std::invalid_argument("DoubleSideParams: lambda_t_los must be > 0");
        if (!(lambda_b_los >= 0.0))
            throw std::invalid_argument("DoubleSideParams: lambda_b_los must be >= 0");
        if (!(w_t > 0.0) || !(w_b > 0.0))
            throw std::invalid_argument("DoubleSideParams: lateral distances must be > 0");
        if (!(w_t <= w_b))
            throw std::invalid_argument("DoubleSideParams: vehicle must be on the top side (w_t <= w_b)");
        if (!(l_h > 0.0)) throw std::invalid_argument("DoubleSideParams: l_h must be > 0");
    }

    SingleSideParams top() const { return {lambda_t_los, w_t, codebook, l_h}; }
    SingleSideParams bottom() const { return {lambda_b_los, w_b, codebook, l_h}; }
};

/// Truncation control for the infinite series over the interloper count.
struct SeriesControl {
    double rel_tol = 1e-10;
    int n_max = 512;

    void validate() const {
        if (!(rel_tol > 0.0) || !(rel_tol <= 1e-3))
            throw std::invalid_argument("SeriesControl: rel_tol must be in (0, 1e-3]");
        if (n_max < 16) throw std::invalid_argument("SeriesControl: n_max must be >= 16");
    }
};

/// A value that had to be clamped to stay meaningful (e.g. a negative
/// expected count forced to zero).
struct ClampedValue {
    double value = 0.0;
    bool clamped = false;
};

/// Series result with convergence metadata.
struct BoxExpectation {
    double value = 0.0;
    int terms_used = 0;
    double tail_bound = 0.0;
};

class SeriesNonConvergence : public std::runtime_error {
  public:
    SeriesNonConvergence(double partial, double tail, int terms)
        : std::runtime_error("box series did not converge within n_max terms (partial=" +
                             std::to_string(partial) + ", tail bound=" + std::to_string(tail) + ")"),
          partial_value(partial),
          tail_bound(tail),
          terms_used(terms) {}

    double partial_value;
    double tail_bound;
    int terms_used;
};

// ---------------------------------------------------------------------------
// Single-side deployment
// ---------------------------------------------------------------------------

/// Beam switches experienced while traversing between two neighboring
/// same-side sites at distance d, with the handover at the midpoint: a step
/// function jumping by 2 at each d = 2*w*a_k, capped at n_c/2.
inline int conditional_switches(double d, const SingleSideParams& p) {
    if (!(d >= 0.0)) throw std::invalid_argument("conditional_switches: d must be >= 0");
    return 2 * p.codebook.tangents_below(d / (2.0 * p.w));
}

/// Expected beam switches between two neighboring same-side sites, averaged
/// over the exponential gap: 2 * sum_k exp(-2 w lambda a_k).
inline double expected_switches_neighbor(const SingleSideParams& p) {
    p.validate();
    double sum = 0.0;
    for (double a : p.codebook.boundary_tangents())
        sum += std::exp(-2.0 * p.w * p.lambda_los * a);
    return 2.0 * sum;
}

/// Average beam-switch count along the whole highway.
inline double bsn_single_side(const SingleSideParams& p) {
    return p.lambda_los * p.l_h * expected_switches_neighbor(p);
}

/// Average handover count along the whole highway: lambda*L - 1, clamped at
/// zero for deployments too sparse for even one site on average.
inline ClampedValue hon_single_side(const SingleSideParams& p) {
    p.validate();
    const double raw = p.lambda_los * p.l_h - 1.0;
    if (raw < 0.0) return {0.0, true};
    return {raw, false};
}

// ---------------------------------------------------------------------------
// Two-side deployment: handover probabilities
// ---------------------------------------------------------------------------

/// Probability that the vehicle hands over to the first far-side site while
/// traversing between two near-side sites:
///   P = int_0^inf lambda e^{-lambda (x + c/x)} dx,  c = w_b^2 - w_t^2.
/// Evaluated by adaptive quadrature after substituting x = sqrt(c) e^{+-t},
/// which folds the two halves around the symmetry point x = sqrt(c) into
///   P = int_0^inf z cosh t e^{-z cosh t} dt,  z = 2 lambda sqrt(c).
inline double prob_handover_tb(const DoubleSideParams& p) {
    p.validate();
    const double c = p.c();
    if (c == 0.0) return 1.0;
    const double z = 2.0 * p.lambda_tb() * std::sqrt(c);
    if (!std::isfinite(z)) throw std::invalid_argument("prob_handover_tb: non-finite integrand");
    // beyond cosh t = 745/z the integrand underflows
    const double t_max = std::acosh(std::max(1.0, 745.0 / z)) + 1.0;
    const auto integrand = [z](double t) {
        const double ch = std::cosh(t);
        return z * ch * std::exp(-z * ch);
    };
    const QuadratureResult q = integrate_adaptive(integrand, 0.0, t_max, 1e-10);
    double v = q.value;
    if (v < 0.0) v = 0.0;
    if (v > 1.0) v = 1.0;
    return v;
}

/// Complement: probability of handing back to a near-side site while
/// traversing between two far-side sites.
inline double prob_handover_bt(const DoubleSideParams& p) { return 1.0 - prob_handover_tb(p); }

/// The four transition probabilities of the handover chain.
struct HandoverProbabilities {
    double p_tb = 0.0;
    double p_bt = 0.0;
    double p_tt = 0.0;  // 1 - p_tb
    double p_bb = 0.0;  // 1 - p_bt
};

inline HandoverProbabilities handover_probabilities(const DoubleSideParams& p) {
    HandoverProbabilities h;
    h.p_tb = prob_handover_tb(p);
    h.p_bt = 1.0 - h.p_tb;
    h.p_tt = 1.0 - h.p_tb;
    h.p_bb = 1.0 - h.p_bt;
    return h;
}

// ---------------------------------------------------------------------------
// Two-side deployment: cross-side switch expectations
// ---------------------------------------------------------------------------

/// Expected beam switches over a cross-side traversal, split at the handover
/// point into the near-side leg and the far-side leg.
struct CrossSwitchExpectation {
    double e_ntb = 0.0;      // top -> bottom traversal
    double e_nbt = 0.0;      // bottom -> top traversal (same value by symmetry)
    double e_near_leg = 0.0; // serving-site side of the handover point
    double e_far_leg = 0.0;  // target-site side of the handover point
};

inline CrossSwitchExpectation expected_switches_cross(const DoubleSideParams& p) {
    p.validate();
    const double lambda = p.lambda_tb();
    const double c = p.c();
    const int q = p.codebook.quarter();
    const auto& tang = p.codebook.boundary_tangents();

    // far leg: sum_k exp(-lambda (w_b a_k + sqrt(w_b^2 a_k^2 + c)))
    double e_far = 0.0;
    for (int k = 0; k < q; ++k) {
        const double y = p.w_b * tang[k];
        e_far += std::exp(-lambda * (y + std::sqrt(y * y + c)));
    }

    // near leg: q - sum_{k >= M} 2 e^{-lambda w_t a_k} sinh(lambda s_k),
    // s_k = sqrt(w_t^2 a_k^2 - c); M = first k with w_t^2 a_k^2 >= c.
    // Branch selection compares squares so no square root can flip it.
    double e_near = static_cast<double>(q);
    for (int k = 0; k < q; ++k) {
        const double y = p.w_t * tang[k];
        const double y2 = y * y;
        if (y2 < c) continue;
        const double s = std::sqrt(y2 - c);
        // 2 e^{-lambda y} sinh(lambda s), written to avoid sinh overflow
        e_near -= std::exp(lambda * (s - y)) - std::exp(-lambda * (s + y));
    }

    CrossSwitchExpectation out;
    out.e_near_leg = e_near;
    out.e_far_leg = e_far;
    out.e_ntb = e_near + e_far;
    out.e_nbt = out.e_ntb;
    return out;
}

// ---------------------------------------------------------------------------
// Handover-offset densities (distance from the serving site to the
// cross-side handover point, and from that point to the target site)
// ---------------------------------------------------------------------------

struct OffsetDensities {
    double f_near = 0.0;  // density of (handover point - serving near-side site)
    double f_far = 0.0;   // density of (far-side site - handover point)
};

/// Densities of the two legs of a cross-side traversal, as functions of the
/// gap x ~ Exp(lambda_tb) between the sites. The near leg lives on
/// [sqrt(c), inf) with two branches (two gap values map to each offset); the
/// far leg is supported on the whole line, negative offsets meaning the
/// handover completes past the target site.
inline OffsetDensities handover_offset_densities(const DoubleSideParams& p, double y) {
    p.validate();
    if (!std::isfinite(y)) throw std::invalid_argument("handover_offset_densities: y must be finite");
    const double lambda = p.lambda_tb();
    const double c = p.c();
    OffsetDensities out;

    if (c == 0.0) {
        // both legs collapse to half the exponential gap
        if (y > 0.0) {
            out.f_near = 2.0 * lambda * std::exp(-2.0 * lambda * y);
            out.f_far = out.f_near;
        } else if (y == 0.0) {
            out.f_far = 2.0 * lambda;
        }
        return out;
    }

    if (y > 0.0 && y * y > c) {
        const double s = std::sqrt(y * y - c);
        out.f_near = lambda * ((y / s + 1.0) * std::exp(-lambda * (y + s)) +
                               (y / s - 1.0) * std::exp(-lambda * (y - s)));
    } else if (y > 0.0 && y * y == c) {
        out.f_near = std::numeric_limits<double>::infinity();  // integrable edge singularity
    }

    const double sb = std::sqrt(y * y + c);
    out.f_far = lambda * (1.0 + y / sb) * std::exp(-lambda * (y + sb));
    return out;
}

/// Matching cumulative distributions (closed form, used for goodness-of-fit).
inline double offset_cdf_near(const DoubleSideParams& p, double y) {
    const double lambda = p.lambda_tb();
    const double c = p.c();
    if (y * y <= c || y <= 0.0) return 0.0;
    const double s = std::sqrt(y * y - c);
    return std::exp(-lambda * (y - s)) - std::exp(-lambda * (y + s));
}

inline double offset_cdf_far(const DoubleSideParams& p, double y) {
    const double lambda = p.lambda_tb();
    const double c = p.c();
    const double arg = y + std::sqrt(y * y + c);
    if (arg <= 0.0) return 0.0;
    return 1.0 - std::exp(-lambda * arg);
}

// ---------------------------------------------------------------------------
// Conditional law of the number of serving far-side sites per box
// ---------------------------------------------------------------------------

/// P{n_bv = v | n_b} for v = 0..n_b: the absorbing handover chain over the
/// n_b far-side sites inside one near-side gap.
inline std::vector<double> conditional_pmf_nbv(int n_b, const HandoverProbabilities& h) {
    if (n_b < 0) throw std::invalid_argument("conditional_pmf_nbv: n_b must be >= 0");
    std::vector<double> pmf(static_cast<std::size_t>(n_b) + 1, 0.0);
    if (n_b == 0) {
        pmf[0] = 1.0;
        return pmf;
    }
    if (h.p_tb == 0.0) {
        pmf[0] = 1.0;
        return pmf;
    }
    pmf[0] = std::pow(h.p_tt, n_b);
    for (int v = 1; v <= n_b; ++v) {
        const double skip_all = std::pow(h.p_tt, n_b - v);
        // enter at any of the first n_b - v + 1 opportunities, ride v sites
        const double enter_mass = (1.0 - skip_all) * h.p_bt + skip_all * h.p_tb;
        pmf[v] = std::pow(h.p_bb, v - 1) * enter_mass;
    }
    return pmf;
}

inline std::vector<double> conditional_pmf_nbv(int n_b, const DoubleSideParams& p) {
    return conditional_pmf_nbv(n_b, handover_probabilities(p));
}

// ---------------------------------------------------------------------------
// Box expectations (events per near-side gap)
// ---------------------------------------------------------------------------

namespace detail {

/// Weight configuration for the box series. Unit weights count handovers;
/// step/cross weights count beam switches.
struct BoxWeights {
    bool unit = false;
    double e_cross_pair = 0.0;  // expected switches of one cross + one return traversal
    double e_bottom_gap = 0.0;  // expected switches between consecutive far-side sites
};

/// Evaluate the box series
///   sum_n g_n [ p_tt^n A_n + sum_{v>=1} w(v) pmf(v|n) ],   g_n = (l_t/l_tb) rho^n,
/// truncated once the geometric tail bound drops below ctl.rel_tol.
inline BoxExpectation evaluate_box_series(const DoubleSideParams& p, const SeriesControl& ctl,
                                          const HandoverProbabilities& h, const BoxWeights& w) {
    p.validate();
    ctl.validate();
    const double lambda_tb = p.lambda_tb();
    const double rho = p.lambda_b_los / lambda_tb;
    const double base = p.lambda_t_los / lambda_tb;
    const int q = p.codebook.quarter();

    // per-threshold Poisson cdf state for the within-gap integrals
    std::vector<double> x_k(q), term_k(q), cdf_k(q);
    for (int k = 0; k < q; ++k) {
        x_k[k] = lambda_tb * 2.0 * p.w_t * p.codebook.boundary_tangents()[k];
        term_k[k] = std::exp(-x_k[k]);
        cdf_k[k] = term_k[k];
    }

    double accum = 0.0;
    double g = base;
    double tail = std::numeric_limits<double>::infinity();
    for (int n = 0; n <= ctl.n_max; ++n) {
        if (n > 0) {
            for (int k = 0; k < q; ++k) {
                term_k[k] *= x_k[k] / n;
                cdf_k[k] += term_k[k];
            }
        }
        double gap_term;  // A_n
        if (w.unit) {
            gap_term = 1.0;
        } else {
            double s = 0.0;
            for (int k = 0; k < q; ++k) s += cdf_k[k];
            gap_term = 2.0 * s;
        }
        double cross_term = 0.0;  // B_n
        if (n >= 1 && h.p_tb > 0.0) {
            const std::vector<double> pmf = conditional_pmf_nbv(n, h);
            for (int v = 1; v <= n; ++v) {
                const double wv = w.unit ? (1.0 + v)
                                         : (w.e_cross_pair + (v - 1) * w.e_bottom_gap);
                cross_term += wv * pmf[static_cast<std::size_t>(v)];
            }
        }
        const double t_n = g * (std::pow(h.p_tt, n) * gap_term + cross_term);
        accum += t_n;

        if (rho == 0.0 || g < 1e-300) return {accum, n + 1, 0.0};
        if (n >= 2) {
            // t_m grows at most linearly under the geometric factor, so
            // tail <= t_n * rho/(1-rho) * (1 + 1/(n (1-rho)))
            tail = t_n * rho / (1.0 - rho) * (1.0 + 1.0 / (n * (1.0 - rho)));
            if (tail <= ctl.rel_tol * std::max(accum, 1e-300)) return {accum, n + 1, tail};
        }
        g *= rho;
    }
    throw SeriesNonConvergence(accum, tail, ctl.n_max + 1);
}

}  // namespace detail

/// Expected beam-switch count while the vehicle crosses one near-side gap.
inline BoxExpectation expected_switches_box(const DoubleSideParams& p, const SeriesControl& ctl) {
    const HandoverProbabilities h = handover_probabilities(p);
    detail::BoxWeights w;
    w.unit = false;
    const CrossSwitchExpectation cross = expected_switches_cross(p);
    w.e_cross_pair = cross.e_ntb + cross.e_nbt;
    w.e_bottom_gap = (p.lambda_b_los > 0.0) ? expected_switches_neighbor(p.bottom()) : 0.0;
    return detail::evaluate_box_series(p, ctl, h, w);
}

/// Same series with unit event weights (exposed for structural checks).
inline BoxExpectation expected_events_box_unit_weights(const DoubleSideParams& p,
                                                       const SeriesControl& ctl) {
    const HandoverProbabilities h = handover_probabilities(p);
    detail::BoxWeights w;
    w.unit = true;
    return detail::evaluate_box_series(p, ctl, h, w);
}

/// Expected handover count while the vehicle crosses one near-side gap,
/// written out term by term: the direct gap term, the one-interloper terms,
/// and the two interloper series with their chain-probability brackets.
inline BoxExpectation expected_handovers_box(const DoubleSideParams& p, const SeriesControl& ctl) {
    p.validate();
    ctl.validate();
    const HandoverProbabilities h = handover_probabilities(p);
    const double lambda_tb = p.lambda_tb();
    const double rho = p.lambda_b_los / lambda_tb;
    const double base = p.lambda_t_los / lambda_tb;

    double accum = base;  // no interloper: the one midpoint handover
    if (rho == 0.0) return {accum, 1, 0.0};

    const double g1 = base * rho;
    accum += g1 * h.p_tt + 2.0 * g1 * h.p_tb;  // one interloper: skipped / served

    double g = g1;
    double tail = std::numeric_limits<double>::infinity();
    for (int n = 2; n <= ctl.n_max; ++n) {
        g *= rho;
        double bracket = std::pow(h.p_tt, n);  // all n interlopers skipped
        // served exactly one
        {
            double geo = 0.0;
            for (int j = 1; j <= n - 1; ++j) geo += std::pow(h.p_tt, j - 1);
            bracket += 2.0 * (geo * h.p_tb * h.p_bt + std::pow(h.p_tt, n - 1) * h.p_tb);
        }
        // served a run of ns in the middle
        for (int ns = 2; ns <= n - 1; ++ns) {
            double geo = 0.0;
            for (int j = 1; j <= n - ns; ++j) geo += std::pow(h.p_tt, j - 1);
            bracket += (1.0 + ns) * (geo * h.p_tb * std::pow(h.p_bb, ns - 1) * h.p_bt +
                                     std::pow(h.p_tt, n - ns) * h.p_tb * std::pow(h.p_bb, ns - 1));
        }
        // served through to the last interloper
        bracket += (n + 1.0) * h.p_tb * std::pow(h.p_bb, n - 1);

        const double t_n = g * bracket;
        accum += t_n;
        if (g < 1e-300) return {accum, n + 1, 0.0};
        tail = t_n * rho / (1.0 - rho) * (1.0 + 1.0 / (n * (1.0 - rho)));
        if (tail <= ctl.rel_tol * std::max(accum, 1e-300)) return {accum, n + 1, tail};
    }
    throw SeriesNonConvergence(accum, tail, ctl.n_max + 1);
}

/// Highway aggregates for the two-side deployment.
inline BoxExpectation bsn_double_side(const DoubleSideParams& p, const SeriesControl& ctl) {
    BoxExpectation box = expected_switches_box(p, ctl);
    box.value *= p.lambda_t_los * p.l_h;
    return box;
}

inline ClampedValue hon_double_side(const DoubleSideParams& p, const SeriesControl& ctl) {
    p.validate();
    const double gaps = p.lambda_t_los * p.l_h - 1.0;
    if (gaps < 0.0) return {0.0, true};  // too sparse for even one near-side gap
    return {gaps * expected_handovers_box(p, ctl).value, false};
}

}  // namespace hwbeam
