#pragma once

#include <Eigen/Dense>
#include <string>

namespace flattop {

enum class SecondOrderKind { Power, LogFactor };

/// MSE(n) = c / n^r + second_const / n^{r + delta}      (Power)
///        = c / n^r + second_const / (n^r log n)        (LogFactor)
struct MseExpansion {
    double c = 1.0;
    double r = 1.0;
    double second_const = 0.0;
    SecondOrderKind kind = SecondOrderKind::Power;
    double delta = 0.5;  // Power only

    void validate() const;
    /// Evaluates the expansion with the remainder dropped, at real n > 1.
    double mse(double n) const;
};

/// Smoothness class of the target density via its characteristic function:
/// A(p) integrable |t|^p |phi|, B: |phi| <= D exp(-d|t|), C: phi = 0 beyond b.
struct AssumptionTag {
    enum class Kind { A, B, C };
    Kind kind = Kind::A;
    double p = 0.0;
    double d = 0.0;
    double D = 0.0;
    double b = 0.0;

    static AssumptionTag a(double p);
    static AssumptionTag exponential(double d, double D);
    static AssumptionTag band_limited(double b);
    void validate() const;
    std::string describe() const;
};

/// F(1-F)/n - 2 f(t) cross_moment h / n, the variance of the smoothed CDF
/// estimator without its o(h/n) remainder.
double variance_expansion(double F_t, double f_t, double h, double n, double cross_moment);

/// (1/pi) int_{|s| > 1/h} |phi(s)| / |s| ds, the uniform bias bound.
/// B: (2D/pi) E1(d/h). C: 0 for h <= 1/b, (2/pi) log(b h) above (with
/// |phi| <= 1). A(p) carries no closed form and needs the table overload.
double bias_bound(const AssumptionTag& assumption, double h);

/// Same bound from |phi| tabulated on ascending s >= 0 (trapezoid rule in
/// log s). Beyond the table the tail is extrapolated by the power law
/// through the last two positive entries; a non-decaying tail is divergent
/// and throws DomainError.
double bias_bound(const Eigen::VectorXd& s, const Eigen::VectorXd& abs_phi, double h);

/// Rate-optimal bandwidths: A(p) a n^{-1/(2p+1)}, B a / log n (needs a < 2d),
/// C min(a, 1/b).
double optimal_bandwidth_preset(const AssumptionTag& assumption, double n, double a);

struct DeficiencyRate {
    double limit = 0.0;          // (b - a) / (c r)
    double rate_exponent = 0.0;  // Power: d ~ limit * n^{1-delta}
    SecondOrderKind kind = SecondOrderKind::Power;
    std::string descriptor;  // "n^0.5", "n/log n"

    /// limit * rate(n): the leading-order deficiency at sample size n.
    double at(double n) const;
};

/// Deficiency of T relative to S when both share c, r and the kind of the
/// second-order term. Mismatched leading terms throw DomainError.
DeficiencyRate deficiency_rate(const MseExpansion& s, const MseExpansion& t);

/// Real m with MSE_T(m) = MSE_S(n), found by bisection on d = m - n in a
/// cancellation-free form. Returns d.
double matching_deficiency(const MseExpansion& s, const MseExpansion& t, double n);

/// Deficiency of the smoothed CDF estimator relative to the EDF at a point
/// t with F(t)(1 - F(t)) != 0, for the rate-optimal bandwidths above.
double edf_deficiency(const AssumptionTag& assumption, double F_t, double f_t, double cross_moment, double n,
                      double a);

}  // namespace flattop
