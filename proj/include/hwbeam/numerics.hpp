#pragma once

#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

namespace hwbeam {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int evaluations = 0;
};

namespace detail {

// Gauss-Kronrod 15(7) nodes and weights on [-1, 1], positive half.
inline constexpr double kGkNodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class F>
inline QuadratureResult gauss_kronrod_panel(const F& f, double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double kronrod = 0.0;
    double gauss = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double dx = half * kGkNodes[i];
        const double fp = f(mid + dx);
        const double fm = (i == 7) ? fp : f(mid - dx);
        const double pair = (i == 7) ? fp : fp + fm;
        kronrod += kKronrodWeights[i] * pair;
        // odd-indexed nodes (and the midpoint, i == 7) form the embedded Gauss-7 rule
        if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
    }
    QuadratureResult r;
    r.value = kronrod * half;
    r.error_estimate = std::abs((kronrod - gauss) * half);
    r.evaluations = 15;
    return r;
}

}  // namespace detail

/// Adaptive Gauss-Kronrod quadrature of f over the finite interval [a, b]
/// to the requested absolute tolerance. Bisects the worst panel first.
template <class F>
QuadratureResult integrate_adaptive(const F& f, double a, double b, double abs_tol,
                                    int max_panels = 1 << 16) {
    if (!(a <= b)) throw std::invalid_argument("integrate_adaptive: need a <= b");
    if (a == b) return {0.0, 0.0, 0};

    struct Panel {
        double a, b, value, error;
        bool operator<(const Panel& other) const { return error < other.error; }
    };
    std::priority_queue<Panel> queue;
    const QuadratureResult first = detail::gauss_kronrod_panel(f, a, b);
    queue.push({a, b, first.value, first.error_estimate});
    int evals = first.evaluations;
    int panels = 1;
    double total_error = first.error_estimate;
    double settled_value = 0.0;  // panels too narrow to split further
    double settled_error = 0.0;

    while (total_error + settled_error > abs_tol && panels < max_panels && !queue.empty()) {
        const Panel p = queue.top();
        queue.pop();
        const double mid = 0.5 * (p.a + p.b);
        if (mid <= p.a || mid >= p.b) {  // exhausted in double precision
            settled_value += p.value;
            settled_error += p.error;
            total_error -= p.error;
            continue;
        }
        const QuadratureResult left = detail::gauss_kronrod_panel(f, p.a, mid);
        const QuadratureResult right = detail::gauss_kronrod_panel(f, mid, p.b);
        evals += left.evaluations + right.evaluations;
        total_error += left.error_estimate + right.error_estimate - p.error;
        queue.push({p.a, mid, left.value, left.error_estimate});
        queue.push({mid, p.b, right.value, right.error_estimate});
        ++panels;
    }

    QuadratureResult out;
    out.value = settled_value;
    out.error_estimate = settled_error;
    while (!queue.empty()) {
        out.value += queue.top().value;
        out.error_estimate += queue.top().error;
        queue.pop();
    }
    out.evaluations = evals;
    return out;
}

/// Regularized upper incomplete gamma Q(n+1, x) for integer shape, i.e. the
/// probability that a Poisson(x) count is <= n. Falls back to log-space
/// accumulation when exp(-x) would underflow.
inline double poisson_cdf(int n, double x) {
    if (n < 0) return 0.0;
    if (!(x >= 0.0)) throw std::invalid_argument("poisson_cdf: x must be >= 0");
    if (x == 0.0) return 1.0;
    if (x < 700.0) {
        double term = std::exp(-x);
        double sum = term;
        for (int j = 1; j <= n; ++j) {
            term *= x / j;
            sum += term;
        }
        return sum < 1.0 ? sum : 1.0;
    }
    // log-space: scale by the largest term to avoid underflow
    const int jstar = static_cast<int>(std::min<double>(n, x));
    const double log_max = -x + jstar * std::log(x) - std::lgamma(jstar + 1.0);
    double sum = 0.0;
    for (int j = 0; j <= n; ++j) {
        const double lt = -x + j * std::log(x) - std::lgamma(j + 1.0);
        sum += std::exp(lt - log_max);
    }
    const double v = std::exp(log_max + std::log(sum));
    return v < 1.0 ? v : 1.0;
}

}  // namespace hwbeam
