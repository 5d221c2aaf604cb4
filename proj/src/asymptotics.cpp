#include "flattop/asymptotics.hpp"

#include <cmath>
#include <sstream>

#include "flattop/errors.hpp"
#include "flattop/special_functions.hpp"

namespace flattop {

void MseExpansion::validate() const {
    if (!(c > 0.0)) throw DomainError("MSE expansion needs c > 0");
    if (!(r > 0.0)) throw DomainError("MSE expansion needs r > 0");
    if (kind == SecondOrderKind::Power && !(delta > 0.0)) throw DomainError("power second-order term needs delta > 0");
}

double MseExpansion::mse(double n) const {
    const double lead = c / std::pow(n, r);
    if (kind == SecondOrderKind::Power) return lead + second_const / std::pow(n, r + delta);
    return lead + second_const / (std::pow(n, r) * std::log(n));
}

AssumptionTag AssumptionTag::a(double p) {
    AssumptionTag t;
    t.kind = Kind::A;
    t.p = p;
    t.validate();
    return t;
}

AssumptionTag AssumptionTag::exponential(double d, double D) {
    AssumptionTag t;
    t.kind = Kind::B;
    t.d = d;
    t.D = D;
    t.validate();
    return t;
}

AssumptionTag AssumptionTag::band_limited(double b) {
    AssumptionTag t;
    t.kind = Kind::C;
    t.b = b;
    t.validate();
    return t;
}

void AssumptionTag::validate() const {
    switch (kind) {
        case Kind::A:
            if (!(p > 0.0)) throw DomainError("assumption A(p) needs p > 0");
            return;
        case Kind::B:
            if (!(d > 0.0 && D > 0.0)) throw DomainError("assumption B needs d > 0 and D > 0");
            return;
        case Kind::C:
            if (!(b > 0.0)) throw DomainError("assumption C needs b > 0");
            return;
    }
}

std::string AssumptionTag::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::A: os << "A(p=" << p << ")"; break;
        case Kind::B: os << "B(d=" << d << ", D=" << D << ")"; break;
        case Kind::C: os << "C(b=" << b << ")"; break;
    }
    return os.str();
}

double variance_expansion(double F_t, double f_t, double h, double n, double cross_moment) {
    if (!(F_t >= 0.0 && F_t <= 1.0)) throw DomainError("F(t) must lie in [0, 1]");
    if (!(f_t >= 0.0)) throw DomainError("f(t) must be nonnegative");
    if (!(h >= 0.0)) throw DomainError("bandwidth must be nonnegative");
    if (!(n > 0.0)) throw DomainError("sample size must be positive");
    return F_t * (1.0 - F_t) / n - 2.0 * f_t * cross_moment * h / n;
}

double bias_bound(const AssumptionTag& assumption, double h) {
    assumption.validate();
    if (!(h > 0.0)) throw DomainError("bias bound needs h > 0");
    switch (assumption.kind) {
        case AssumptionTag::Kind::B:
            return 2.0 * assumption.D / kPi * exponential_integral_e1(assumption.d / h);
        case AssumptionTag::Kind::C:
            return h * assumption.b <= 1.0 ? 0.0 : 2.0 / kPi * std::log(assumption.b * h);
        case AssumptionTag::Kind::A:
            break;
    }
    throw DomainError("assumption A(p) has no closed-form bias bound; pass a tabulated |phi|");
}

double bias_bound(const Eigen::VectorXd& s, const Eigen::VectorXd& abs_phi, double h) {
    if (!(h > 0.0)) throw DomainError("bias bound needs h > 0");
    if (s.size() != abs_phi.size() || s.size() < 2) throw DomainError("|phi| table needs matching columns, >= 2 rows");
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (!(s[i] >= 0.0) || (i > 0 && !(s[i] > s[i - 1]))) throw DomainError("|phi| table abscissae must ascend");
        if (!(abs_phi[i] >= 0.0)) throw DomainError("|phi| table values must be nonnegative");
    }
    const double lower = 1.0 / h;
    const Eigen::Index last = s.size() - 1;
    double integral = 0.0;
    // Piecewise-linear |phi| in s, integrated exactly against 1/s.
    for (Eigen::Index i = 0; i < last; ++i) {
        const double a = std::max(s[i], lower);
        const double b = s[i + 1];
        if (!(b > a)) continue;
        const double slope = (abs_phi[i + 1] - abs_phi[i]) / (s[i + 1] - s[i]);
        const double at_a = abs_phi[i] + slope * (a - s[i]);
        const double intercept = at_a - slope * a;
        integral += intercept * std::log(b / a) + slope * (b - a);
    }
    // Tail beyond the table.
    if (abs_phi[last] > 0.0) {
        Eigen::Index prev = last - 1;
        while (prev >= 0 && !(abs_phi[prev] > 0.0 && s[prev] > 0.0)) --prev;
        if (prev < 0) throw DomainError("|phi| table too short to extrapolate its tail");
        const double q = -std::log(abs_phi[last] / abs_phi[prev]) / std::log(s[last] / s[prev]);
        if (!(q > 0.0)) throw DomainError("|phi| table does not decay; the bias integral diverges");
        const double from = std::max(s[last], lower);
        // int_from^inf A s^{-q-1} ds with A = |phi|_last s_last^q
        integral += abs_phi[last] * std::pow(s[last] / from, q) / q;
    }
    return 2.0 / kPi * integral;
}

double optimal_bandwidth_preset(const AssumptionTag& assumption, double n, double a) {
    assumption.validate();
    if (!(n > 1.0)) throw DomainError("bandwidth preset needs n > 1");
    if (!(a > 0.0)) throw DomainError("bandwidth preset needs a > 0");
    switch (assumption.kind) {
        case AssumptionTag::Kind::A:
            return a * std::pow(n, -1.0 / (2.0 * assumption.p + 1.0));
        case AssumptionTag::Kind::B:
            if (!(a < 2.0 * assumption.d)) throw DomainError("assumption B preset needs a < 2d");
            return a / std::log(n);
        case AssumptionTag::Kind::C:
            return std::min(a, 1.0 / assumption.b);
    }
    return a;
}

double DeficiencyRate::at(double n) const {
    if (kind == SecondOrderKind::Power) return limit * std::pow(n, rate_exponent);
    return limit * n / std::log(n);
}

DeficiencyRate deficiency_rate(const MseExpansion& s, const MseExpansion& t) {
    s.validate();
    t.validate();
    if (s.c != t.c || s.r != t.r || s.kind != t.kind || (s.kind == SecondOrderKind::Power && s.delta != t.delta)) {
        throw DomainError("deficiency needs matching leading terms c, r and the same second-order rate");
    }
    DeficiencyRate out;
    out.limit = (t.second_const - s.second_const) / (s.c * s.r);
    out.kind = s.kind;
    if (s.kind == SecondOrderKind::Power) {
        out.rate_exponent = 1.0 - s.delta;
        std::ostringstream os;
        os << "n^" << out.rate_exponent;
        out.descriptor = os.str();
    } else {
        out.rate_exponent = 1.0;
        out.descriptor = "n/log n";
    }
    return out;
}

double matching_deficiency(const MseExpansion& s, const MseExpansion& t, double n) {
    deficiency_rate(s, t);
    if (!(n > 1.0)) throw DomainError("matching sample size needs n > 1");
    // g(d) = MSE_T(n + d) - MSE_S(n), scaled by n^r; the leading parts are
    // combined through expm1/log1p so nothing cancels.
    const auto second = [&](const MseExpansion& e, double m) {
        if (e.kind == SecondOrderKind::Power) return e.second_const * std::pow(m, -e.delta);
        return e.second_const / std::log(m);
    };
    const auto g = [&](double d) {
        const double ratio_pow = std::expm1(-t.r * std::log1p(d / n));  // (m/n)^{-r} - 1
        const double m = n + d;
        return t.c * ratio_pow + (ratio_pow + 1.0) * second(t, m) - second(s, n);
    };
    // g decreases in d for the large n of interest; bracket outward, keeping
    // m = n + d above 1.
    double lo = -0.5 * n, hi = 0.5 * n;
    for (int k = 0; k < 60 && g(lo) * g(hi) > 0.0; ++k) {
        hi *= 2.0;
        lo = 0.5 * (lo - n + 1.0);
    }
    if (g(lo) * g(hi) > 0.0) throw DomainError("could not bracket the matching sample size");
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if ((g(mid) > 0.0) == (g(lo) > 0.0)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double edf_deficiency(const AssumptionTag& assumption, double F_t, double f_t, double cross_moment, double n,
                      double a) {
    assumption.validate();
    const double var = F_t * (1.0 - F_t);
    if (!(var > 0.0)) throw DomainError("deficiency needs F(t)(1 - F(t)) != 0");
    if (!(n > 1.0)) throw DomainError("deficiency needs n > 1");
    const double base = 2.0 * f_t * cross_moment / var;
    switch (assumption.kind) {
        case AssumptionTag::Kind::A: {
            const double p = assumption.p;
            return a * base * std::pow(n, 2.0 * p / (2.0 * p + 1.0));
        }
        case AssumptionTag::Kind::B:
            return a * base * n / std::log(n);
        case AssumptionTag::Kind::C:
            return base * n;
    }
    return 0.0;
}

}  // namespace flattop
