#include <doctest.h>

#include <cmath>
#include <random>

#include "flattop/errors.hpp"
#include "flattop/kernels.hpp"
#include "oracles.hpp"

using namespace flattop;

namespace {

auto trap_kappa(double c) {
    return [c](double s) { return oracle::kappa_trapezoid(c, s); };
}

}  // namespace

TEST_CASE("family names parse and print") {
    CHECK(parse_family("trapezoid") == FlatTopFamily::Trapezoid);
    CHECK(parse_family("smooth") == FlatTopFamily::SmoothTrapezoid);
    CHECK(to_string(FlatTopFamily::SmoothTrapezoid) == "smooth");
    CHECK(parse_family(to_string(FlatTopFamily::SmoothTrapezoid)) == FlatTopFamily::SmoothTrapezoid);
    CHECK_THROWS_AS(parse_family("epanechnikov"), DomainError);
}

TEST_CASE("spec validation") {
    CHECK_THROWS_AS(FlatTopSpec::trapezoid(1.0), DomainError);
    CHECK_THROWS_AS(FlatTopSpec::trapezoid(0.0), DomainError);
    CHECK_THROWS_AS(FlatTopSpec::smooth_trapezoid(0.0, 0.05), DomainError);
    CHECK(FlatTopSpec::smooth_trapezoid(1.0, 0.05).effective_c == 0.5);
    CHECK(FlatTopSpec::smooth_trapezoid(2.0, 0.3).effective_c == 0.3);
    CHECK(FlatTopSpec::trapezoid(0.75).effective_c == 0.75);
}

TEST_CASE("kappa is flat on [-c, c] and vanishes beyond 1") {
    const auto trap = FlatTopSpec::trapezoid(0.75);
    const auto smooth = FlatTopSpec::smooth_trapezoid(1.0, 0.05);
    for (const auto& spec : {trap, smooth}) {
        CHECK(eval_kappa(spec, 0.0) == 1.0);
        CHECK(eval_kappa(spec, -spec.c) == 1.0);
        CHECK(eval_kappa(spec, 1.0) == 0.0);
        CHECK(eval_kappa(spec, -1.3) == 0.0);
    }
    CHECK(eval_kappa(trap, 0.875) == doctest::Approx(0.5));
    CHECK(eval_kappa(smooth, 0.5) == doctest::Approx(oracle::kappa_smooth(1.0, 0.05, 0.5)).epsilon(1e-15));
}

TEST_CASE("trapezoid closed forms agree with Simpson quadrature of the Fourier integrals") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(-40.0, 40.0);
    for (double c : {0.0, 0.5, 0.75}) {
        for (int i = 0; i < 60; ++i) {
            const double x = u(gen);
            CAPTURE(c);
            CAPTURE(x);
            CHECK(trapezoid_kernel(c, x) == doctest::Approx(oracle::kernel(trap_kappa(c), x)).epsilon(1e-9).scale(1.0));
            CHECK(trapezoid_kbar(c, x) == doctest::Approx(oracle::kbar(trap_kappa(c), x)).epsilon(1e-9).scale(1.0));
        }
    }
}

TEST_CASE("trapezoid Kbar symmetry and centre") {
    CHECK(trapezoid_kbar(0.75, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
    for (double t : {0.3, 2.0, 17.0}) {
        CHECK(trapezoid_kbar(0.75, -t) == doctest::Approx(1.0 - trapezoid_kbar(0.75, t)).epsilon(1e-14));
    }
    // K(0) = (1 + c) / (2 pi)
    CHECK(trapezoid_kernel(0.75, 0.0) == doctest::Approx(1.75 / (2.0 * oracle::pi)).epsilon(1e-15));
}

TEST_CASE("Polya-type density is the c = 0 trapezoid kernel") {
    for (double x : {0.5, 1.0, 7.0}) {
        CHECK(trapezoid_kernel(0.0, x) == doctest::Approx((1.0 - std::cos(x)) / (oracle::pi * x * x)).epsilon(1e-13));
    }
}

TEST_CASE("kernel derivative matches a central difference") {
    for (double x : {-3.0, 0.4, 5.5}) {
        const double h = 1e-5;
        const double fd = (trapezoid_kernel(0.75, x + h) - trapezoid_kernel(0.75, x - h)) / (2.0 * h);
        CHECK(trapezoid_kernel_derivative(0.75, x) == doctest::Approx(fd).epsilon(1e-7).scale(1.0));
    }
}

TEST_CASE("generic evaluation of the smooth family agrees with Simpson quadrature") {
    const auto spec = FlatTopSpec::smooth_trapezoid(1.0, 0.05);
    const auto kappa = [](double s) { return oracle::kappa_smooth(1.0, 0.05, s); };
    for (double x : {0.0, 0.7, 3.0, 12.0, -25.0}) {
        CAPTURE(x);
        CHECK(eval_kernel(spec, x) == doctest::Approx(oracle::kernel(kappa, x, 20000)).epsilon(1e-10).scale(1.0));
        CHECK(eval_kbar(spec, x) == doctest::Approx(oracle::kbar(kappa, x, 20000)).epsilon(1e-10).scale(1.0));
    }
    CHECK(eval_kbar(spec, 0.0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("generic evaluation reproduces the trapezoid closed form") {
    const auto spec = FlatTopSpec::trapezoid(0.75);
    for (double x : {-9.0, 0.0, 1.1, 30.0}) {
        CHECK(eval_kbar(spec, x) == doctest::Approx(trapezoid_kbar(0.75, x)).epsilon(1e-12).scale(1.0));
        CHECK(eval_kernel(spec, x) == doctest::Approx(trapezoid_kernel(0.75, x)).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("tail bound holds and its cutoff is consistent") {
    for (const auto& spec : {FlatTopSpec::trapezoid(0.75), FlatTopSpec::smooth_trapezoid(1.0, 0.05)}) {
        const TailBound tb = kbar_tail_bound(spec);
        for (double t : {5.0, 20.0, 60.0, 150.0}) {
            CAPTURE(t);
            CHECK(std::abs(eval_kbar(spec, t) - 1.0) <= tb.bound_at(t));
            CHECK(std::abs(eval_kbar(spec, -t)) <= tb.bound_at(t));
        }
        const double T = tb.cutoff_for(1e-6);
        CHECK(tb.bound_at(T) <= 1e-6 * (1 + 1e-12));
    }
    // Trapezoid V2 = 1/((1-c)c) + (1+c)/c + 1/(1-c) + 1
    const double c = 0.75;
    CHECK(kbar_tail_bound(FlatTopSpec::trapezoid(c)).constants[0] ==
          doctest::Approx(1.0 / ((1 - c) * c) + (1 + c) / c + 1.0 / (1 - c) + 1.0));
}

TEST_CASE("tables interpolate the kernel to their tolerance") {
    std::mt19937_64 gen(11);
    for (const auto& spec : {FlatTopSpec::trapezoid(0.75), FlatTopSpec::smooth_trapezoid(1.0, 0.05)}) {
        const double tol = 1e-7;
        const KernelTable table = build_table(spec, tol);
        std::uniform_real_distribution<double> u(-table.tail_cutoff() * 1.1, table.tail_cutoff() * 1.1);
        for (int i = 0; i < 200; ++i) {
            const double x = i < 100 ? u(gen) / 20.0 : u(gen);
            CAPTURE(x);
            CHECK(std::abs(table.kbar(x) - eval_kbar(spec, x)) <= tol);
            CHECK(std::abs(table.density(x) - eval_kernel(spec, x)) <= tol);
        }
        CHECK(table.kbar(0.0) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(std::abs(table.integral_of_kernel() - 1.0) <= tol);
    }
}

TEST_CASE("rectified table view is a valid CDF") {
    const KernelTable table = build_table(FlatTopSpec::trapezoid(0.75), 1e-6);
    const RectifiedKernelView view{&table};
    double prev = -1.0;
    for (double x = -60.0; x <= 60.0; x += 0.01) {
        const double v = view.kbar(x);
        CHECK(v >= prev);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        prev = v;
    }
    // The raw kernel does dip below zero: the trapezoid has negative lobes.
    double raw_min = 1.0;
    for (double x = -60.0; x <= 0.0; x += 0.01) raw_min = std::min(raw_min, table.kbar(x));
    CHECK(raw_min < 0.0);
}

TEST_CASE("table construction rejects a grid beyond the budget") {
    TableOptions tiny;
    tiny.max_grid = 100;
    CHECK_THROWS_AS(build_table(FlatTopSpec::trapezoid(0.75), 1e-8, tiny), DomainError);
    CHECK_THROWS_AS(build_table(FlatTopSpec::trapezoid(0.75), 0.0), DomainError);
}

TEST_CASE("cross moment: Gaussian closed form and spectral identity for flat-top kernels") {
    CHECK(kernel_cross_moment(GaussianKernel{}) == doctest::Approx(1.0 / (2.0 * std::sqrt(oracle::pi))).epsilon(1e-10));
    // (1/2pi) int_0^inf (1 - kappa^2)/s^2 ds, with kappa = 0 beyond 1 contributing 1.
    for (const auto& spec : {FlatTopSpec::trapezoid(0.75), FlatTopSpec::trapezoid(0.3),
                             FlatTopSpec::smooth_trapezoid(1.0, 0.05)}) {
        const auto kappa = [&](double s) {
            return spec.family == FlatTopFamily::Trapezoid ? oracle::kappa_trapezoid(spec.c, s)
                                                           : oracle::kappa_smooth(spec.b, spec.c, s);
        };
        const double inner =
            oracle::simpson([&](double s) { return (1.0 - kappa(s) * kappa(s)) / (s * s); }, spec.c, 1.0, 200000);
        CHECK(kernel_cross_moment(spec) == doctest::Approx((1.0 + inner) / (2.0 * oracle::pi)).epsilon(1e-9));
    }
}

TEST_CASE("cross moment agrees with the spatial integral of Kbar (1 - Kbar) / 2") {
    // The smooth kernel decays fast enough for direct spatial quadrature.
    const auto spec = FlatTopSpec::smooth_trapezoid(1.0, 0.05);
    const KernelTable table = build_table(spec, 1e-7);
    const double U = table.tail_cutoff();
    const double spatial = oracle::simpson(
        [&](double u) {
            const double k = table.kbar(u);
            return 0.5 * k * (1.0 - k);
        },
        -U, U, 400000);
    CHECK(kernel_cross_moment(spec) == doctest::Approx(spatial).epsilon(5e-4));
}
