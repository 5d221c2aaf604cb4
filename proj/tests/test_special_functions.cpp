#include <doctest.h>

#include <cmath>

#include "flattop/errors.hpp"
#include "flattop/quadrature.hpp"
#include "flattop/special_functions.hpp"
#include "oracles.hpp"

using namespace flattop;

TEST_CASE("sine integral matches Simpson quadrature across all three regimes") {
    for (double x : {0.1, 1.0, 3.9, 4.1, 10.0, 25.0, 39.9, 40.1, 75.0}) {
        CAPTURE(x);
        CHECK(sine_integral(x) == doctest::Approx(oracle::sine_integral(x)).epsilon(1e-12));
    }
}

TEST_CASE("sine integral is odd, zero at the origin and tends to pi/2") {
    CHECK(sine_integral(0.0) == 0.0);
    CHECK(sine_integral(-2.5) == -sine_integral(2.5));
    CHECK(sine_integral(1e6) == doctest::Approx(kHalfPi).epsilon(1e-6));
}

TEST_CASE("sine integral is continuous at the regime switches") {
    for (double x : {4.0, 40.0}) {
        CHECK(sine_integral(std::nextafter(x, 0.0)) == doctest::Approx(sine_integral(std::nextafter(x, 100.0))).epsilon(1e-13));
    }
}

TEST_CASE("cosine integral against quadrature of the defining integral") {
    // Ci(x) = gamma + log x + int_0^x (cos u - 1)/u du
    for (double x : {0.5, 2.0, 6.0, 30.0, 50.0}) {
        const double ref = kEulerGamma + std::log(x) +
                           oracle::simpson([](double u) { return u == 0.0 ? 0.0 : (std::cos(u) - 1.0) / u; }, 0.0, x,
                                           200000);
        CAPTURE(x);
        CHECK(cosine_integral(x) == doctest::Approx(ref).epsilon(1e-10));
    }
    CHECK_THROWS_AS(cosine_integral(0.0), DomainError);
}

TEST_CASE("E1 against quadrature") {
    for (double x : {0.2, 1.0, 2.0, 5.0}) {
        const double ref = oracle::simpson([](double s) { return std::exp(-s) / s; }, x, x + 60.0, 400000);
        CAPTURE(x);
        CHECK(exponential_integral_e1(x) == doctest::Approx(ref).epsilon(1e-10));
    }
    CHECK_THROWS_AS(exponential_integral_e1(-1.0), DomainError);
}

TEST_CASE("sinc near and away from zero") {
    CHECK(sinc(0.0) == 1.0);
    CHECK(sinc(1e-4) == doctest::Approx(std::sin(1e-4) / 1e-4).epsilon(1e-15));
    CHECK(sinc(2.0) == doctest::Approx(std::sin(2.0) / 2.0).epsilon(1e-15));
}

TEST_CASE("normal CDF, density and quantile") {
    for (double x : {-6.0, -1.5, 0.0, 0.3, 2.5}) {
        CAPTURE(x);
        CHECK(normal_cdf(x) == doctest::Approx(oracle::normal_cdf(x)).epsilon(1e-12));
        CHECK(normal_pdf(x) == doctest::Approx(std::exp(-0.5 * x * x) / std::sqrt(2.0 * oracle::pi)));
    }
    for (double p : {1e-12, 0.01, 0.3, 0.5, 0.77, 0.999}) {
        CAPTURE(p);
        CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-13));
    }
    CHECK(normal_quantile(0.0) == -INFINITY);
    CHECK(normal_quantile(1.0) == INFINITY);
    CHECK_THROWS_AS(normal_quantile(1.5), DomainError);
}

TEST_CASE("adaptive Gauss-Kronrod quadrature") {
    const auto r = integrate([](double x) { return std::cos(x); }, 0.0, kHalfPi);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-13));
    const auto osc = integrate([](double x) { return std::sin(50.0 * x) * std::sin(50.0 * x); }, 0.0, kPi);
    CHECK(osc.value == doctest::Approx(kHalfPi).epsilon(1e-12));
    const auto pieces = integrate_pieces([](double x) { return std::abs(x); }, {-1.0, 0.0, 2.0});
    CHECK(pieces.value == doctest::Approx(2.5).epsilon(1e-14));
    QuadratureOptions tight;
    tight.abs_tol = 1e-15;
    tight.max_intervals = 3;
    CHECK_THROWS_AS(integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, tight), QuadratureError);
}
