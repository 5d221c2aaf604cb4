#pragma once

// Reference computations used only by the tests. Nothing here calls into the
// library, so agreement with it is evidence rather than tautology.

#include <cmath>
#include <functional>

namespace oracle {

inline constexpr double pi = 3.141592653589793238462643383279502884;

/// Composite Simpson on [a, b] with `panels` (rounded up to even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
    if (panels % 2) ++panels;
    const double h = (b - a) / panels;
    double s = f(a) + f(b);
    for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

/// Trapezoid flat-top function.
inline double kappa_trapezoid(double c, double s) {
    s = std::abs(s);
    if (s <= c) return 1.0;
    if (s >= 1.0) return 0.0;
    return (1.0 - s) / (1.0 - c);
}

/// Smooth flat-top function with edge parameter b on (c, 1).
inline double kappa_smooth(double b, double c, double s) {
    s = std::abs(s);
    if (s <= c) return 1.0;
    if (s >= 1.0) return 0.0;
    return std::exp(-b * std::exp(-b / ((s - c) * (s - c))) / ((s - 1.0) * (s - 1.0)));
}

/// K(x) = (1/pi) int_0^1 kappa(s) cos(sx) ds.
inline double kernel(const std::function<double(double)>& kappa, double x, int panels = 4000) {
    return simpson([&](double s) { return kappa(s) * std::cos(s * x); }, 0.0, 1.0, panels) / pi;
}

/// Kbar(t) = 1/2 + (1/pi) int_0^1 kappa(s) sin(st)/s ds.
inline double kbar(const std::function<double(double)>& kappa, double t, int panels = 4000) {
    return 0.5 + simpson([&](double s) { return s == 0.0 ? kappa(0.0) * t : kappa(s) * std::sin(s * t) / s; }, 0.0,
                         1.0, panels) /
                     pi;
}

/// Si(x) by Simpson on sin(u)/u.
inline double sine_integral(double x, int panels = 200000) {
    return simpson([](double u) { return u == 0.0 ? 1.0 : std::sin(u) / u; }, 0.0, x, panels);
}

/// Standard normal CDF via Simpson of the density from 0.
inline double normal_cdf(double x) {
    const double half = simpson([](double u) { return std::exp(-0.5 * u * u) / std::sqrt(2.0 * pi); }, 0.0,
                                std::abs(x), 20000);
    return x >= 0.0 ? 0.5 + half : 0.5 - half;
}

/// Bisection root of a monotone function on [lo, hi].
inline double bisect(const std::function<double(double)>& g, double lo, double hi, int iters = 200) {
    const bool lo_neg = g(lo) < 0.0;
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        if ((g(mid) < 0.0) == lo_neg) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace oracle
