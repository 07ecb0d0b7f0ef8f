#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

#include "hwbeam/codebook.hpp"
#include "hwbeam/point_process.hpp"
#include "hwbeam/random.hpp"

namespace hwbeam {

/// One sampled world: line-of-sight site sets per side plus the lane and
/// codebook geometry shared by both engines.
struct Realization {
    PointProcess1D bs_top;
    PointProcess1D bs_bottom;
    LaneGeometry geometry;
    Codebook codebook{4};
    double l_h = 0.0;
};

struct HandoverEvent {
    double x = 0.0;
    Side from = Side::Top;
    Side to = Side::Top;
};

struct BeamSwitchEvent {
    double x = 0.0;
    Side bs_side = Side::Top;
    int old_index = 0;
    int new_index = 0;
};

/// Event counts inside one gap between consecutive top-side sites.
struct BoxCount {
    double ns = 0.0;
    double nh = 0.0;
};

struct TraceResult {
    std::vector<HandoverEvent> handovers;
    std::vector<BeamSwitchEvent> beam_switches;
    std::vector<double> sojourn_intervals;  // meters, partition [0, l_h]
    std::vector<BoxCount> boxes;
    bool empty_flagged = false;  // no site anywhere: zero-event run
};

namespace detail {

struct Site {
    double x = 0.0;
    double w = 0.0;
    Side side = Side::Top;
};

/// Merge the two per-side processes into one site list sorted by x.
/// Coincident coordinates keep the nearer site (deterministic tie-break:
/// top side first, then sampling order).
inline std::vector<Site> merge_sites(const Realization& r) {
    std::vector<Site> sites;
    sites.reserve(r.bs_top.points.size() + r.bs_bottom.points.size());
    for (double x : r.bs_top.points) sites.push_back({x, r.geometry.w_top, Side::Top});
    for (double x : r.bs_bottom.points) sites.push_back({x, r.geometry.w_bottom, Side::Bottom});
    std::stable_sort(sites.begin(), sites.end(), [](const Site& a, const Site& b) {
        if (a.x != b.x) return a.x < b.x;
        return a.side == Side::Top && b.side == Side::Bottom;
    });
    // drop exact-duplicate coordinates, keeping the laterally nearer site
    std::vector<Site> out;
    out.reserve(sites.size());
    for (const Site& s : sites) {
        if (!out.empty() && out.back().x == s.x) {
            if (s.w < out.back().w) out.back() = s;
            continue;
        }
        out.push_back(s);
    }
    return out;
}

struct Cell {
    std::size_t site = 0;
    double start = 0.0;  // x where this site becomes the serving one
};

/// Serving regions under nearest-site association. The squared distance to
/// site i is (x - x_i)^2 + w_i^2; subtracting x^2 turns the comparison into a
/// lower envelope of lines, built with a monotone convex-hull sweep. Cell
/// boundaries are exactly the equal-distance handover points.
inline std::vector<Cell> serving_cells(const std::vector<Site>& sites) {
    std::vector<Cell> cells;
    const auto intercept = [&](std::size_t i) {
        return sites[i].x * sites[i].x + sites[i].w * sites[i].w;
    };
    const auto crossover = [&](std::size_t i, std::size_t j) {
        // x where site j (x_j > x_i) becomes nearer than site i
        return (intercept(j) - intercept(i)) / (2.0 * (sites[j].x - sites[i].x));
    };
    for (std::size_t j = 0; j < sites.size(); ++j) {
        double start = -std::numeric_limits<double>::infinity();
        while (!cells.empty()) {
            start = crossover(cells.back().site, j);
            if (start <= cells.back().start) {
                cells.pop_back();
                start = -std::numeric_limits<double>::infinity();
            } else {
                break;
            }
        }
        cells.push_back({j, start});
    }
    return cells;
}

/// Walk the serving cells across [0, l_h] and report every event in order.
/// Visitor interface:
///   void handover(double x, Side from, Side to);
///   void beam_switch(double x, Side side, int old_index, int new_index);
///   void interval(double length);           // constant-(site, beam) stretch
template <class Visitor>
void walk_segments(const Realization& r, const std::vector<Site>& sites,
                   const std::vector<Cell>& cells, Visitor& vis) {
    const Codebook& cb = r.codebook;
    const double l_h = r.l_h;
    // first cell visible at x = 0
    std::size_t ci = 0;
    while (ci + 1 < cells.size() && cells[ci + 1].start <= 0.0) ++ci;

    double prev_x = 0.0;
    for (; ci < cells.size(); ++ci) {
        const Site& s = sites[cells[ci].site];
        const double seg_end =
            (ci + 1 < cells.size()) ? std::min(cells[ci + 1].start, l_h) : l_h;
        if (seg_end <= prev_x) continue;
        const double u = prev_x;
        const double v = seg_end;

        // beam boundaries of the serving site strictly inside (u, v):
        // left of the site at s.x - w*a_k, right at s.x + w*a_k.
        // The range search divides while positions multiply, so a boundary
        // landing on a cell edge within rounding is dropped explicitly.
        const int left_lo = cb.tangents_at_or_below((s.x - v) / s.w);
        const int left_hi = cb.tangents_below((s.x - u) / s.w);
        for (int k = left_hi - 1; k >= left_lo; --k) {
            const double pos = s.x - s.w * cb.boundary_tangents()[k];
            if (pos <= prev_x || pos >= v) continue;
            vis.interval(pos - prev_x);
            vis.beam_switch(pos, s.side, -(k + 1), -k);
            prev_x = pos;
        }
        const int right_lo = cb.tangents_at_or_below((u - s.x) / s.w);
        const int right_hi = cb.tangents_below((v - s.x) / s.w);
        for (int k = right_lo; k < right_hi; ++k) {
            const double pos = s.x + s.w * cb.boundary_tangents()[k];
            if (pos <= prev_x || pos >= v) continue;
            vis.interval(pos - prev_x);
            vis.beam_switch(pos, s.side, k, k + 1);
            prev_x = pos;
        }

        if (seg_end >= l_h) break;
        const Side to = sites[cells[ci + 1].site].side;
        vis.interval(seg_end - prev_x);
        vis.handover(seg_end, s.side, to);
        prev_x = seg_end;
    }
    vis.interval(l_h - prev_x);
}

/// Forward-only serving walk: the vehicle never hands over to a site it has
/// already passed. Quadratic scan; meant for sensitivity studies, not for
/// large ensembles.
template <class Visitor>
void walk_forward_only(const Realization& r, const std::vector<Site>& sites, Visitor& vis) {
    const Codebook& cb = r.codebook;
    const double l_h = r.l_h;
    const auto dist2 = [&](std::size_t i, double x) {
        const double dx = x - sites[i].x;
        return dx * dx + sites[i].w * sites[i].w;
    };
    // start with the globally nearest site at x = 0
    std::size_t cur = 0;
    for (std::size_t i = 1; i < sites.size(); ++i)
        if (dist2(i, 0.0) < dist2(cur, 0.0)) cur = i;

    double pos = 0.0;
    double prev_x = 0.0;
    while (true) {
        // earliest crossover to a site that is still ahead of the vehicle
        double next_x = l_h;
        bool have_candidate = false;
        for (std::size_t j = 0; j < sites.size(); ++j) {
            if (j == cur || sites[j].x <= sites[cur].x) continue;
            const double num = (sites[j].x * sites[j].x + sites[j].w * sites[j].w) -
                               (sites[cur].x * sites[cur].x + sites[cur].w * sites[cur].w);
            const double x_star = num / (2.0 * (sites[j].x - sites[cur].x));
            if (x_star > pos && x_star < next_x && x_star <= sites[j].x) {
                next_x = x_star;
                have_candidate = true;
            }
        }
        const double seg_end = std::min(next_x, l_h);
        const Site& s = sites[cur];
        const int left_lo = cb.tangents_at_or_below((s.x - seg_end) / s.w);
        const int left_hi = cb.tangents_below((s.x - pos) / s.w);
        for (int k = left_hi - 1; k >= left_lo; --k) {
            const double bpos = s.x - s.w * cb.boundary_tangents()[k];
            if (bpos <= prev_x || bpos >= seg_end) continue;
            vis.interval(bpos - prev_x);
            vis.beam_switch(bpos, s.side, -(k + 1), -k);
            prev_x = bpos;
        }
        const int right_lo = cb.tangents_at_or_below((pos - s.x) / s.w);
        const int right_hi = cb.tangents_below((seg_end - s.x) / s.w);
        for (int k = right_lo; k < right_hi; ++k) {
            const double bpos = s.x + s.w * cb.boundary_tangents()[k];
            if (bpos <= prev_x || bpos >= seg_end) continue;
            vis.interval(bpos - prev_x);
            vis.beam_switch(bpos, s.side, k, k + 1);
            prev_x = bpos;
        }
        if (!have_candidate || seg_end >= l_h) break;
        // re-resolve among sites not yet passed (plus the incumbent)
        pos = seg_end;
        std::size_t best = cur;
        for (std::size_t j = 0; j < sites.size(); ++j) {
            if (j != cur && sites[j].x < pos) continue;
            if (dist2(j, pos) < dist2(best, pos)) best = j;
        }
        if (best != cur) {
            vis.interval(pos - prev_x);
            vis.handover(pos, sites[cur].side, sites[best].side);
            prev_x = pos;
            cur = best;
        }
    }
    vis.interval(l_h - prev_x);
}

}  // namespace detail

/// Drive a visitor through the exact event sequence of one realization.
/// Returns false (with no events emitted) when the realization has no site.
template <class Visitor>
bool trace_visit(const Realization& r, Visitor& vis, bool forward_only = false) {
    if (!(r.l_h > 0.0)) throw std::invalid_argument("trace_visit: l_h must be > 0");
    r.geometry.validate();
    const std::vector<detail::Site> sites = detail::merge_sites(r);
    if (sites.empty()) return false;
    if (forward_only) {
        detail::walk_forward_only(r, sites, vis);
    } else {
        const std::vector<detail::Cell> cells = detail::serving_cells(sites);
        detail::walk_segments(r, sites, cells, vis);
    }
    return true;
}

namespace detail {

/// Visitor that materializes the full event log.
struct CollectingVisitor {
    TraceResult* out = nullptr;
    void handover(double x, Side from, Side to) { out->handovers.push_back({x, from, to}); }
    void beam_switch(double x, Side side, int oldi, int newi) {
        out->beam_switches.push_back({x, side, oldi, newi});
    }
    void interval(double length) { out->sojourn_intervals.push_back(length); }
};

}  // namespace detail

/// Events strictly inside each gap between consecutive top-side sites.
inline std::vector<BoxCount> count_box_events(const TraceResult& t,
                                              const std::vector<double>& top_points) {
    std::vector<BoxCount> boxes;
    if (top_points.size() < 2) return boxes;
    boxes.resize(top_points.size() - 1);
    const auto box_of = [&](double x) -> long {
        if (x <= top_points.front() || x >= top_points.back()) return -1;
        const auto it = std::upper_bound(top_points.begin(), top_points.end(), x);
        const long idx = static_cast<long>(it - top_points.begin()) - 1;
        if (top_points[static_cast<std::size_t>(idx)] == x) return -1;  // exactly on a site
        return idx;
    };
    for (const auto& e : t.beam_switches) {
        const long b = box_of(e.x);
        if (b >= 0) boxes[static_cast<std::size_t>(b)].ns += 1.0;
    }
    for (const auto& e : t.handovers) {
        const long b = box_of(e.x);
        if (b >= 0) boxes[static_cast<std::size_t>(b)].nh += 1.0;
    }
    return boxes;
}

namespace detail {

/// Top-side sites inside the measurement window (margin sites excluded);
/// only gaps between these define boxes.
inline std::vector<double> window_top_points(const Realization& r) {
    std::vector<double> out;
    for (double x : r.bs_top.points)
        if (x >= 0.0 && x <= r.l_h) out.push_back(x);
    return out;
}

}  // namespace detail

/// Exact event-driven trace of one realization.
inline TraceResult trace_realization(const Realization& r, bool forward_only = false) {
    TraceResult out;
    detail::CollectingVisitor vis{&out};
    if (!trace_visit(r, vis, forward_only)) {
        out.empty_flagged = true;
        return out;
    }
    out.boxes = count_box_events(out, detail::window_top_points(r));
    return out;
}

/// Sojourn durations in seconds at the given constant speed.
inline std::vector<double> sojourn_times(const TraceResult& t, double speed) {
    if (!(speed > 0.0)) throw std::invalid_argument("sojourn_times: speed must be > 0");
    std::vector<double> out;
    out.reserve(t.sojourn_intervals.size());
    for (double len : t.sojourn_intervals) out.push_back(len / speed);
    return out;
}

// ---------------------------------------------------------------------------
// Ensembles
// ---------------------------------------------------------------------------

struct MetricStats {
    double mean = 0.0;
    double variance = 0.0;
    double ci_half = 0.0;  // 1.96 * sqrt(variance / count)
    long long count = 0;
};

struct EnsembleStats {
    MetricStats bsn;         // beam switches per realization
    MetricStats hon;         // steady-state handovers per realization
                             // (the initial association is not billed)
    MetricStats box_ns;      // beam switches per top-side gap, pooled
    MetricStats box_nh;      // handovers per top-side gap, pooled
    MetricStats sojourn_s;   // sojourn durations in seconds, pooled
    long long realizations = 0;
    long long empty_realizations = 0;   // no site at all (excluded from means)
    long long no_box_realizations = 0;  // fewer than two top-side sites
};

struct EnsembleConfig {
    double l_h = 0.0;
    double lambda_bs_top = 0.0;     // deployment density per meter (0 = side absent)
    double lambda_bs_bottom = 0.0;
    LosModel los;
    LaneGeometry geometry;
    int n_c = 4;
    double speed = 30.0;  // m/s, used for sojourn durations
    bool forward_only = false;
    int threads = 0;  // 0 = hardware concurrency
};

/// Sampling margin added on both sides of the measurement window so the
/// serving process is stationary across [0, l_h]: events counted inside the
/// window are then free of window-edge bias. The margin covers the deepest
/// boundary reach plus enough expected line-of-sight gaps (25 of them) that
/// an out-of-margin site can never matter in practice; a cap keeps the raw
/// sample budget bounded under heavy blockage.
inline double sampling_margin(const EnsembleConfig& cfg) {
    const double lambda_los = cfg.lambda_bs_top * cfg.los.los_probability(Side::Top) +
                              cfg.lambda_bs_bottom * cfg.los.los_probability(Side::Bottom);
    const double lambda_raw = cfg.lambda_bs_top + cfg.lambda_bs_bottom;
    if (!(lambda_los > 0.0) || !(lambda_raw > 0.0)) return 0.0;
    const Codebook cb(cfg.n_c);
    const double reach =
        std::max(cfg.geometry.w_top, cfg.geometry.w_bottom) * cb.boundary_tangents().back();
    return reach + std::min(25.0 / lambda_los, 1e5 / lambda_raw);
}

/// Sample realization `index` of the ensemble. Stream indices are derived
/// from the realization index, so any subset can be regenerated
/// independently and in any order. Site coordinates may extend beyond
/// [0, l_h] by the sampling margin.
inline Realization sample_realization(const EnsembleConfig& cfg, std::uint64_t master_seed,
                                      long index) {
    const std::uint64_t base = 4ULL * static_cast<std::uint64_t>(index);
    const double margin = sampling_margin(cfg);
    Realization r;
    r.l_h = cfg.l_h;
    r.geometry = cfg.geometry;
    r.codebook = Codebook(cfg.n_c);
    const auto sample_side = [&](double density, Side side, std::uint64_t s0,
                                 std::uint64_t s1) {
        PointProcess1D raw = sample_ppp(density, cfg.l_h + 2.0 * margin, {master_seed, s0}, side);
        for (double& x : raw.points) x -= margin;
        return thin_los(raw, cfg.los, {master_seed, s1});
    };
    r.bs_top = sample_side(cfg.lambda_bs_top, Side::Top, base + 0, base + 1);
    r.bs_bottom = sample_side(cfg.lambda_bs_bottom, Side::Bottom, base + 2, base + 3);
    return r;
}

namespace detail {

struct PerRealization {
    double n_switch = 0.0;
    double n_handover = 0.0;
    double box_count = 0.0;
    double box_ns_sum = 0.0, box_ns_sumsq = 0.0;
    double box_nh_sum = 0.0, box_nh_sumsq = 0.0;
    double soj_count = 0.0;
    double soj_sum = 0.0, soj_sumsq = 0.0;
    bool empty = false;
    bool no_box = false;
};

/// Counting visitor: no event storage, just the per-realization moments.
struct StatsVisitor {
    const std::vector<double>* top_points = nullptr;
    PerRealization* acc = nullptr;
    std::size_t box_cursor = 0;

    long box_of(double x) {
        const auto& tp = *top_points;
        if (tp.size() < 2 || x <= tp.front() || x >= tp.back()) return -1;
        while (box_cursor + 1 < tp.size() && tp[box_cursor + 1] <= x) ++box_cursor;
        if (tp[box_cursor] == x) return -1;
        return static_cast<long>(box_cursor);
    }

    std::vector<BoxCount> boxes;

    void handover(double x, Side, Side) {
        acc->n_handover += 1.0;
        const long b = box_of(x);
        if (b >= 0) boxes[static_cast<std::size_t>(b)].nh += 1.0;
    }
    void beam_switch(double x, Side, int, int) {
        acc->n_switch += 1.0;
        const long b = box_of(x);
        if (b >= 0) boxes[static_cast<std::size_t>(b)].ns += 1.0;
    }
    void interval(double length) {
        acc->soj_count += 1.0;
        acc->soj_sum += length;
        acc->soj_sumsq += length * length;
    }
};

inline void finalize_metric(MetricStats& m, double sum, double sumsq, long long count) {
    m.count = count;
    if (count <= 0) return;
    m.mean = sum / static_cast<double>(count);
    if (count > 1) {
        const double num = sumsq - sum * sum / static_cast<double>(count);
        m.variance = std::max(0.0, num / static_cast<double>(count - 1));
    }
    m.ci_half = 1.96 * std::sqrt(m.variance / static_cast<double>(count));
}

}  // namespace detail

/// Run an ensemble of independent realizations. Deterministic for a given
/// (config, n, master_seed) regardless of thread count: every realization
/// owns its seed streams, and results are reduced in realization order.
/// index_offset shifts the realization indices so a long run can be split
/// into checkpointed chunks without changing any sample.
inline EnsembleStats run_ensemble(const EnsembleConfig& cfg, long n_realizations,
                                  std::uint64_t master_seed, long index_offset = 0) {
    if (n_realizations < 1) throw std::invalid_argument("run_ensemble: need n_realizations >= 1");
    std::vector<detail::PerRealization> slots(static_cast<std::size_t>(n_realizations));

    const auto worker_body = [&](long i) {
        const Realization r = sample_realization(cfg, master_seed, index_offset + i);
        detail::PerRealization& acc = slots[static_cast<std::size_t>(i)];
        const std::vector<double> top_window = detail::window_top_points(r);
        detail::StatsVisitor vis;
        vis.top_points = &top_window;
        vis.acc = &acc;
        if (top_window.size() >= 2)
            vis.boxes.resize(top_window.size() - 1);
        else
            acc.no_box = true;
        if (!trace_visit(r, vis, cfg.forward_only)) {
            acc.empty = true;
            return;
        }
        // the first in-window cell transition completes the initial
        // association and is not billed as a steady-state handover
        acc.n_handover = std::max(0.0, acc.n_handover - 1.0);
        acc.box_count = static_cast<double>(vis.boxes.size());
        for (const BoxCount& b : vis.boxes) {
            acc.box_ns_sum += b.ns;
            acc.box_ns_sumsq += b.ns * b.ns;
            acc.box_nh_sum += b.nh;
            acc.box_nh_sumsq += b.nh * b.nh;
        }
    };

    int n_threads = cfg.threads > 0 ? cfg.threads
                                    : static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads < 1) n_threads = 1;
    if (n_threads == 1) {
        for (long i = 0; i < n_realizations; ++i) worker_body(i);
    } else {
        std::atomic<long> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t)
            pool.emplace_back([&] {
                for (long i = next.fetch_add(1); i < n_realizations; i = next.fetch_add(1))
                    worker_body(i);
            });
        for (auto& th : pool) th.join();
    }

    // deterministic reduction in realization order
    EnsembleStats out;
    out.realizations = n_realizations;
    double bsn_sum = 0.0, hon_sum = 0.0;
    long long used = 0;
    for (const auto& s : slots) {
        if (s.empty) {
            ++out.empty_realizations;
            continue;
        }
        ++used;
        bsn_sum += s.n_switch;
        hon_sum += s.n_handover;
    }
    double bsn_sq = 0.0, hon_sq = 0.0;
    const double bsn_mean = used > 0 ? bsn_sum / static_cast<double>(used) : 0.0;
    const double hon_mean = used > 0 ? hon_sum / static_cast<double>(used) : 0.0;
    double box_ns_sum = 0.0, box_ns_sumsq = 0.0, box_nh_sum = 0.0, box_nh_sumsq = 0.0;
    double box_count = 0.0;
    double soj_sum = 0.0, soj_sumsq = 0.0, soj_count = 0.0;
    for (const auto& s : slots) {
        if (s.empty) continue;
        bsn_sq += (s.n_switch - bsn_mean) * (s.n_switch - bsn_mean);
        hon_sq += (s.n_handover - hon_mean) * (s.n_handover - hon_mean);
        if (s.no_box) ++out.no_box_realizations;
        box_count += s.box_count;
        box_ns_sum += s.box_ns_sum;
        box_ns_sumsq += s.box_ns_sumsq;
        box_nh_sum += s.box_nh_sum;
        box_nh_sumsq += s.box_nh_sumsq;
        soj_count += s.soj_count;
        soj_sum += s.soj_sum;
        soj_sumsq += s.soj_sumsq;
    }
    out.bsn.count = used;
    out.bsn.mean = bsn_mean;
    if (used > 1) out.bsn.variance = bsn_sq / static_cast<double>(used - 1);
    out.bsn.ci_half = used > 0 ? 1.96 * std::sqrt(out.bsn.variance / static_cast<double>(used)) : 0.0;
    out.hon.count = used;
    out.hon.mean = hon_mean;
    if (used > 1) out.hon.variance = hon_sq / static_cast<double>(used - 1);
    out.hon.ci_half = used > 0 ? 1.96 * std::sqrt(out.hon.variance / static_cast<double>(used)) : 0.0;

    detail::finalize_metric(out.box_ns, box_ns_sum, box_ns_sumsq,
                            static_cast<long long>(box_count));
    detail::finalize_metric(out.box_nh, box_nh_sum, box_nh_sumsq,
                            static_cast<long long>(box_count));
    // sojourn reported in seconds
    const double v = cfg.speed;
    detail::finalize_metric(out.sojourn_s, soj_sum / v, soj_sumsq / (v * v),
                            static_cast<long long>(soj_count));
    return out;
}

namespace detail {

inline void merge_metric(MetricStats& a, const MetricStats& b) {
    if (b.count == 0) return;
    if (a.count == 0) {
        a = b;
        return;
    }
    const double na = static_cast<double>(a.count);
    const double nb = static_cast<double>(b.count);
    const double delta = b.mean - a.mean;
    const double m2 = a.variance * (na - 1.0) + b.variance * (nb - 1.0) +
                      delta * delta * na * nb / (na + nb);
    a.count += b.count;
    a.mean += delta * nb / (na + nb);
    a.variance = a.count > 1 ? m2 / static_cast<double>(a.count - 1) : 0.0;
    a.ci_half = 1.96 * std::sqrt(a.variance / static_cast<double>(a.count));
}

}  // namespace detail

/// Combine two chunk results (exact pooled mean/variance). Merging in a
/// fixed chunk order keeps outputs bit-identical across worker counts.
inline EnsembleStats merge_ensembles(EnsembleStats a, const EnsembleStats& b) {
    detail::merge_metric(a.bsn, b.bsn);
    detail::merge_metric(a.hon, b.hon);
    detail::merge_metric(a.box_ns, b.box_ns);
    detail::merge_metric(a.box_nh, b.box_nh);
    detail::merge_metric(a.sojourn_s, b.sojourn_s);
    a.realizations += b.realizations;
    a.empty_realizations += b.empty_realizations;
    a.no_box_realizations += b.no_box_realizations;
    return a;
}

/// Pooled per-box means over an ensemble of collected traces.
struct BoxStatistics {
    MetricStats ns;
    MetricStats nh;
    long long excluded_realizations = 0;  // fewer than two top-side sites
};

inline BoxStatistics box_statistics(const std::vector<TraceResult>& results) {
    BoxStatistics out;
    double ns_sum = 0.0, ns_sq = 0.0, nh_sum = 0.0, nh_sq = 0.0;
    long long n = 0;
    for (const TraceResult& t : results) {
        if (t.boxes.empty()) {
            ++out.excluded_realizations;
            continue;
        }
        for (const BoxCount& b : t.boxes) {
            ++n;
            ns_sum += b.ns;
            ns_sq += b.ns * b.ns;
            nh_sum += b.nh;
            nh_sq += b.nh * b.nh;
        }
    }
    detail::finalize_metric(out.ns, ns_sum, ns_sq, n);
    detail::finalize_metric(out.nh, nh_sum, nh_sq, n);
    return out;
}

}  // namespace hwbeam
