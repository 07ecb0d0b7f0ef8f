#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

namespace hwbeam {

/// Symmetric orthogonal beam codebook of n_c sectors around a site.
///
/// The sector boundaries that matter for a vehicle driving on a straight lane
/// at lateral distance w are the tangents a_k = tan(pi/n_c + 2k*pi/n_c),
/// k = 0 .. n_c/4 - 1: the boundary positions on the lane are site_x +- w*a_k.
/// Symmetry requires n_c to be a multiple of 4.
class Codebook {
  public:
    explicit Codebook(int n_c) : n_c_(n_c) {
        if (n_c < 4 || n_c % 4 != 0)
            throw std::invalid_argument("Codebook: n_c must be a multiple of 4 and >= 4");
        tangents_.reserve(n_c / 4);
        for (int k = 0; k < n_c / 4; ++k) {
            const double angle =
                std::numbers::pi / n_c + 2.0 * k * std::numbers::pi / n_c;
            tangents_.push_back(std::tan(angle));
        }
    }

    int n_c() const { return n_c_; }
    int quarter() const { return n_c_ / 4; }
    double beamwidth_deg() const { return 360.0 / n_c_; }
    const std::vector<double>& boundary_tangents() const { return tangents_; }

    /// Number of boundary tangents strictly below u (u in units of w).
    int tangents_below(double u) const {
        return static_cast<int>(std::lower_bound(tangents_.begin(), tangents_.end(), u) -
                                tangents_.begin());
    }

    /// Number of boundary tangents at or below u.
    int tangents_at_or_below(double u) const {
        return static_cast<int>(std::upper_bound(tangents_.begin(), tangents_.end(), u) -
                                tangents_.begin());
    }

  private:
    int n_c_;
    std::vector<double> tangents_;
};

/// Lane layout: lateral distances from the vehicle lane centerline to the
/// top and bottom site lines. w_top < w_bottom places the vehicle on the top
/// side of the divided highway.
struct LaneGeometry {
    double w_top = 0.0;
    double w_bottom = 0.0;
    double lane_width = 3.7;
    int n_lanes = 4;

    void validate() const {
        if (!(w_top > 0.0) || !(w_bottom > 0.0))
            throw std::invalid_argument("LaneGeometry: lateral distances must be > 0");
    }

    /// Distances for a vehicle on lane `lane` (1 = nearest the top site line),
    /// with sites set back `setback` meters from the outer lane edge.
    static LaneGeometry from_lane(int lane, int n_lanes, double lane_width, double setback) {
        if (lane < 1 || lane > n_lanes)
            throw std::invalid_argument("LaneGeometry: lane out of range");
        LaneGeometry g;
        g.lane_width = lane_width;
        g.n_lanes = n_lanes;
        g.w_top = setback + (lane - 0.5) * lane_width;
        g.w_bottom = setback + (2 * n_lanes - lane + 0.5) * lane_width;
        return g;
    }

    /// Fold an antenna height h into an effective lateral distance
    /// sqrt(w^2 + h^2) (optional planar-model extension).
    static double effective_w(double w, double height) {
        return std::sqrt(w * w + height * height);
    }
};

/// Power-law pathloss C * r^alpha. Strictly increasing in r for alpha > 0, so
/// minimum-pathloss association coincides with nearest-site association.
struct PathlossParams {
    double c_gain = 1.3772e6;
    double alpha = 2.0;

    void validate() const {
        if (!(c_gain > 0.0) || !(alpha > 0.0))
            throw std::invalid_argument("PathlossParams: c_gain and alpha must be > 0");
    }

    double pathloss(double r) const { return c_gain * std::pow(r, alpha); }
};

/// Signed beam index for a vehicle at vu_x served by the site at bs_x with
/// lateral distance w. Index 0 is the broadside beam; indices grow toward +x.
/// A vehicle exactly on a boundary belongs to the +x beam. Comparisons happen
/// in position space (against w * a_k products) so indices are consistent
/// with boundary positions computed the same way.
inline int beam_index(double vu_x, double bs_x, double w, const Codebook& cb) {
    if (!(w > 0.0)) throw std::invalid_argument("beam_index: w must be > 0");
    const double dx = vu_x - bs_x;
    int idx = 0;
    if (dx >= 0.0) {
        for (double a : cb.boundary_tangents()) {
            if (dx >= w * a)
                ++idx;
            else
                break;
        }
    } else {
        for (double a : cb.boundary_tangents()) {
            if (dx < -(w * a))
                --idx;
            else
                break;
        }
    }
    return idx;
}

/// Number of beam boundaries of the site at bs_x strictly inside
/// (x_start, x_end).
inline int switch_count_between(double x_start, double x_end, double bs_x, double w,
                                const Codebook& cb) {
    if (!(x_start <= x_end))
        throw std::invalid_argument("switch_count_between: x_start must be <= x_end");
    if (!(w > 0.0)) throw std::invalid_argument("switch_count_between: w must be > 0");
    int count = 0;
    for (double a : cb.boundary_tangents()) {
        const double offset = w * a;
        if (bs_x + offset > x_start && bs_x + offset < x_end) ++count;
        if (bs_x - offset > x_start && bs_x - offset < x_end) ++count;
        if (bs_x + offset >= x_end && bs_x - offset <= x_start) break;
    }
    return count;
}

/// Handover point between two same-side sites: the midpoint.
inline double handover_point_same_side(double b_i, double b_next) {
    if (!(b_i < b_next))
        throw std::invalid_argument("handover_point_same_side: need b_i < b_next");
    return 0.5 * (b_i + b_next);
}

/// Handover point between a top site at b_t (lateral w_t) and a bottom site
/// at b_b (lateral w_b): the x where both are equidistant from the lane.
/// Empty when b_t == b_b (no crossover along x).
inline std::optional<double> handover_point_cross_side(double b_t, double b_b, double w_t,
                                                       double w_b) {
    if (b_b == b_t) return std::nullopt;
    return (w_b * w_b - w_t * w_t + (b_b - b_t) * (b_b + b_t)) / (2.0 * (b_b - b_t));
}

}  // namespace hwbeam
