#include "flattop/special_functions.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include "flattop/errors.hpp"

namespace flattop {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 200;

// Si(x) = sum_k (-1)^k x^{2k+1} / ((2k+1) (2k+1)!); terms stay below ~10 for
// |x| <= 4 so the alternating sum keeps ~15 digits.
double si_series(double x) {
    const double x2 = x * x;
    double term = x;  // x^{2k+1}/(2k+1)!
    double sum = x;
    for (int k = 1; k < kMaxIter; ++k) {
        term *= -x2 / ((2.0 * k) * (2.0 * k + 1.0));
        const double add = term / (2.0 * k + 1.0);
        sum += add;
        if (std::abs(add) <= kEps * std::abs(sum)) return sum;
    }
    throw QuadratureError("sine integral series did not converge");
}

double ci_series(double x) {
    const double x2 = x * x;
    double term = 1.0;  // x^{2k}/(2k)!
    double sum = 0.0;
    for (int k = 1; k < kMaxIter; ++k) {
        term *= -x2 / ((2.0 * k - 1.0) * (2.0 * k));
        const double add = term / (2.0 * k);
        sum += add;
        if (std::abs(add) < kEps * std::abs(sum)) return kEulerGamma + std::log(x) + sum;
    }
    throw QuadratureError("cosine integral series did not converge");
}

// E1(ix) by the modified Lentz continued fraction; returns e^{ix} E1(ix).
std::complex<double> e1_imaginary_cf(double x) {
    std::complex<double> b(1.0, x);
    std::complex<double> c(1.0 / kTiny, 0.0);
    std::complex<double> d = 1.0 / b;
    std::complex<double> h = d;
    for (int i = 2; i < kMaxIter; ++i) {
        const double a = -static_cast<double>((i - 1) * (i - 1));
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const std::complex<double> del = c * d;
        h *= del;
        if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < kEps) return h;
    }
    throw QuadratureError("E1(ix) continued fraction did not converge");
}

struct Auxiliary {
    double f;
    double g;
};

// Enveloping asymptotic series for the auxiliary functions f, g; the
// smallest term at x >= 40 is far below 1e-16.
Auxiliary auxiliary_asymptotic(double x) {
    const double inv2 = 1.0 / (x * x);
    double f = 0.0, g = 0.0;
    double tf = 1.0, tg = 1.0;
    for (int k = 0; k < 40; ++k) {
        f += tf;
        g += tg;
        const double nf = -tf * (2.0 * k + 1.0) * (2.0 * k + 2.0) * inv2;
        const double ng = -tg * (2.0 * k + 2.0) * (2.0 * k + 3.0) * inv2;
        if (std::abs(nf) > std::abs(tf) || std::abs(nf) < 1e-18) break;
        tf = nf;
        tg = ng;
    }
    return {f / x, g * inv2};
}

}  // namespace

double sine_integral(double x) {
    if (x < 0.0) return -sine_integral(-x);
    if (x <= 4.0) return si_series(x);
    if (x < 40.0) {
        const std::complex<double> h = std::complex<double>(std::cos(x), -std::sin(x)) * e1_imaginary_cf(x);
        return kHalfPi + h.imag();
    }
    const Auxiliary a = auxiliary_asymptotic(x);
    return kHalfPi - a.f * std::cos(x) - a.g * std::sin(x);
}

double cosine_integral(double x) {
    if (!(x > 0.0)) throw DomainError("cosine integral requires x > 0");
    if (x <= 4.0) return ci_series(x);
    if (x < 40.0) {
        const std::complex<double> h = std::complex<double>(std::cos(x), -std::sin(x)) * e1_imaginary_cf(x);
        return -h.real();
    }
    const Auxiliary a = auxiliary_asymptotic(x);
    return a.f * std::sin(x) - a.g * std::cos(x);
}

double exponential_integral_e1(double x) {
    if (!(x > 0.0)) throw DomainError("E1 requires x > 0");
    if (x <= 1.0) {
        double term = 1.0;
        double sum = 0.0;
        for (int k = 1; k < kMaxIter; ++k) {
            term *= -x / k;
            const double add = -term / k;
            sum += add;
            if (std::abs(add) < kEps * std::abs(sum)) return -kEulerGamma - std::log(x) + sum;
        }
        throw QuadratureError("E1 series did not converge");
    }
    double b = x + 1.0;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        const double a = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h * std::exp(-x);
    }
    throw QuadratureError("E1 continued fraction did not converge");
}

double sinc(double x) {
    if (std::abs(x) < 1e-3) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0));
    }
    return std::sin(x) / x;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) return -std::numeric_limits<double>::infinity();
        if (p == 1.0) return std::numeric_limits<double>::infinity();
        throw DomainError("normal_quantile requires p in [0, 1]");
    }
    const double q = p - 0.5;
    double x;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        x = q *
            (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r + 6.7265770927008700853e+4) * r +
                 4.5921953931549871457e+4) * r + 1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
              1.3314166789178437745e+2) * r + 3.3871328727963666080e0) /
            (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r + 3.9307895800092710610e+4) * r +
                 2.1213794301586595867e+4) * r + 5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
              4.2313330701600911252e+1) * r + 1.0);
    } else {
        double r = q < 0.0 ? p : 1.0 - p;
        r = std::sqrt(-std::log(r));
        if (r <= 5.0) {
            r -= 1.6;
            x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r + 2.41780725177450611770e-1) * r +
                     1.27045825245236838258e0) * r + 3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                  4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
                (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r + 1.51986665636164571966e-2) * r +
                     1.48103976427480074590e-1) * r + 6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                  2.05319162663775882187e0) * r + 1.0);
        } else {
            r -= 5.0;
            x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 1.24266094738807843860e-3) * r +
                     2.65321895265761230930e-2) * r + 2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                  5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
                (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r + 1.84631831751005468180e-5) * r +
                     7.86869131145613259100e-4) * r + 1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                  5.99832206555887937690e-1) * r + 1.0);
        }
        if (q < 0.0) x = -x;
    }
    return x;
}

}  // namespace flattop
