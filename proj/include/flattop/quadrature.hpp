#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

#include "flattop/errors.hpp"

namespace flattop {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;  // estimated absolute error, |K15 - G7| summed over panels
    int intervals = 0;
};

struct QuadratureOptions {
    double abs_tol = 1e-12;
    int max_intervals = 20000;
};

namespace detail {

inline constexpr double kKronrodNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the nodes with odd index (1, 3, 5, 7).
inline constexpr double kGaussWeights[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                            0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gauss_kronrod_15(const F& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(mid);
    double kronrod = kKronrodWeights[7] * fc;
    double gauss = kGaussWeights[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kKronrodNodes[i];
        const double pair = f(mid - dx) + f(mid + dx);
        kronrod += kKronrodWeights[i] * pair;
        if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

/// Globally adaptive 7-15 Gauss-Kronrod integration of f over [a, b].
/// Bisects the panel with the largest error estimate until the summed
/// estimate drops below opts.abs_tol. Throws QuadratureError when the
/// interval budget runs out; never returns a truncated result.
template <class F>
QuadratureResult integrate(const F& f, double a, double b, const QuadratureOptions& opts = {}) {
    if (a == b) return {};
    if (b < a) {
        QuadratureResult r = integrate(f, b, a, opts);
        r.value = -r.value;
        return r;
    }
    std::priority_queue<detail::Panel> heap;
    heap.push(detail::gauss_kronrod_15(f, a, b));
    double total = heap.top().value;
    double error = heap.top().error;
    int intervals = 1;
    while (error > opts.abs_tol) {
        if (intervals >= opts.max_intervals) {
            std::ostringstream msg;
            msg << "adaptive quadrature on [" << a << ", " << b << "] stalled at error " << error << " > "
                << opts.abs_tol << " after " << intervals << " panels";
            throw QuadratureError(msg.str());
        }
        const detail::Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            throw QuadratureError("adaptive quadrature reached machine resolution");
        }
        const detail::Panel left = detail::gauss_kronrod_15(f, worst.a, mid);
        const detail::Panel right = detail::gauss_kronrod_15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++intervals;
    }
    // Re-sum from the panels to shed the drift of the running updates.
    double value = 0.0, err = 0.0;
    while (!heap.empty()) {
        value += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    return {value, err, intervals};
}

/// integrate() over consecutive breakpoints; the budget is split evenly.
template <class F>
QuadratureResult integrate_pieces(const F& f, const std::vector<double>& breaks, const QuadratureOptions& opts = {}) {
    QuadratureResult out;
    if (breaks.size() < 2) return out;
    QuadratureOptions piece = opts;
    piece.abs_tol = opts.abs_tol / static_cast<double>(breaks.size() - 1);
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const QuadratureResult r = integrate(f, breaks[i], breaks[i + 1], piece);
        out.value += r.value;
        out.error += r.error;
        out.intervals += r.intervals;
    }
    return out;
}

}  // namespace flattop
