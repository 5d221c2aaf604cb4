#pragma once

namespace flattop {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kHalfPi = 1.57079632679489661923132169163975144;
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

/// Sine integral Si(x) = int_0^x sin(u)/u du. Absolute error below 1e-13
/// over the real line: power series for |x| <= 4, continued fraction for
/// E1(ix) on (4, 40), auxiliary-function asymptotics beyond.
double sine_integral(double x);

/// Cosine integral Ci(x) = gamma + ln x + int_0^x (cos u - 1)/u du, x > 0.
double cosine_integral(double x);

/// Exponential integral E1(x) = int_x^inf e^{-u}/u du for x > 0.
double exponential_integral_e1(double x);

/// sin(x)/x with the removable singularity filled in.
double sinc(double x);

/// Standard normal CDF and density.
double normal_cdf(double x);
double normal_pdf(double x);

/// Inverse standard normal CDF (Wichura's AS 241, relative error ~1e-16).
double normal_quantile(double p);

}  // namespace flattop
