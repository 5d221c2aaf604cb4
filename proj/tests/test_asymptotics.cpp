#include <doctest.h>

#include <cmath>
#include <vector>

#include "flattop/asymptotics.hpp"
#include "flattop/errors.hpp"
#include "oracles.hpp"

using namespace flattop;

namespace {

struct Tuple {
    double c, r, a, b;
    SecondOrderKind kind;
    double delta;
};

MseExpansion expansion(const Tuple& p, double second) {
    MseExpansion e;
    e.c = p.c;
    e.r = p.r;
    e.second_const = second;
    e.kind = p.kind;
    e.delta = p.delta;
    return e;
}

// Direct long-double evaluation of the expansions, root in m by bisection.
long double mse_ld(const Tuple& p, long double second, long double m) {
    const long double lead = p.c / std::pow(m, (long double)p.r);
    if (p.kind == SecondOrderKind::Power) return lead + second / std::pow(m, (long double)(p.r + p.delta));
    return lead + second / (std::pow(m, (long double)p.r) * std::log(m));
}

double brute_deficiency(const Tuple& p, double n) {
    const long double target = mse_ld(p, p.a, n);
    long double lo = 1.0001L, hi = 1e4L * n;
    for (int i = 0; i < 300; ++i) {
        const long double mid = 0.5L * (lo + hi);
        if (mse_ld(p, p.b, mid) > target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return static_cast<double>(0.5L * (lo + hi) - n);
}

const std::vector<Tuple> kTuples{
    {1.0, 1.0, 0.0, 2.0, SecondOrderKind::Power, 0.5},
    {1.0, 1.0, 0.0, 0.25, SecondOrderKind::Power, 0.25},
    {2.0, 0.8, 1.0, 4.0, SecondOrderKind::Power, 0.8},
    {1.0, 1.0, 0.5, -1.5, SecondOrderKind::Power, 0.5},
    {1.0, 1.0, 0.0, 0.25, SecondOrderKind::LogFactor, 0.5},
    {1.0, 0.9, -0.05, 0.05, SecondOrderKind::LogFactor, 0.5},
};

}  // namespace

TEST_CASE("variance expansion examples") {
    CHECK(variance_expansion(0.5, 0.39894, 0.0, 15, 0.282095) == doctest::Approx(1.0 / 60.0));
    CHECK(variance_expansion(0.5, 0.39894, 0.3, 15, 0.282095) == doctest::Approx(0.012166).epsilon(1e-4));
    CHECK(variance_expansion(1.0, 0.2, 0.5, 10, 0.3) == doctest::Approx(-2.0 * 0.2 * 0.3 * 0.5 / 10));
    double prev = variance_expansion(0.3, 0.3, 0.0, 20, 0.28);
    for (double h = 0.1; h < 2.0; h += 0.1) {
        const double v = variance_expansion(0.3, 0.3, h, 20, 0.28);
        CHECK(v < prev);
        prev = v;
    }
    CHECK_THROWS_AS(variance_expansion(1.5, 0.1, 0.1, 10, 0.2), DomainError);
}

TEST_CASE("bias bound closed forms against quadrature") {
    // (1/pi) 2 int_2^inf e^{-s}/s ds, integrated on a log scale.
    const double q = 2.0 / oracle::pi *
                     oracle::simpson([](double u) { return std::exp(-std::exp(u)); }, std::log(2.0), std::log(60.0), 20000);
    const double b = bias_bound(AssumptionTag::exponential(1.0, 1.0), 0.5);
    CHECK(b == doctest::Approx(q).epsilon(1e-9));
    CHECK(std::abs(b - 0.0312) < 1e-4);
    CHECK(bias_bound(AssumptionTag::band_limited(1.0), 0.9) == 0.0);
    CHECK(bias_bound(AssumptionTag::band_limited(1.0), 1.0) == 0.0);
    CHECK(bias_bound(AssumptionTag::band_limited(1.0), 2.0) > 0.0);
    CHECK_THROWS_AS(bias_bound(AssumptionTag::a(2.0), 0.5), DomainError);
    double prev = bias_bound(AssumptionTag::exponential(1.0, 1.0), 4.0);
    for (double h = 3.5; h > 0.05; h -= 0.25) {
        const double v = bias_bound(AssumptionTag::exponential(1.0, 1.0), h);
        CHECK(v <= prev);
        prev = v;
    }
    CHECK(bias_bound(AssumptionTag::exponential(1.0, 1.0), 0.05) < 1e-9);
}

TEST_CASE("tabulated bias bound") {
    // |phi| = exp(-s) tabulated finely reproduces the B closed form.
    const Eigen::VectorXd s = Eigen::VectorXd::LinSpaced(40001, 0.0, 40.0);
    const Eigen::VectorXd phi = (-s.array()).exp();
    for (double h : {0.25, 0.5, 1.0}) {
        CHECK(bias_bound(s, phi, h) == doctest::Approx(bias_bound(AssumptionTag::exponential(1.0, 1.0), h)).epsilon(1e-5));
    }
    // Power-law tail s^{-2}: int_{1/h}^inf s^{-3} ds = h^2 / 2, table cut at 5.
    const Eigen::VectorXd s2 = Eigen::VectorXd::LinSpaced(4001, 1.0, 5.0);
    const Eigen::VectorXd phi2 = s2.array().pow(-2.0);
    CHECK(bias_bound(s2, phi2, 0.5) == doctest::Approx(2.0 / oracle::pi * 0.125).epsilon(1e-6));
    // Non-decaying tail diverges.
    const Eigen::VectorXd flat = Eigen::VectorXd::Constant(4001, 0.3);
    CHECK_THROWS_AS(bias_bound(s2, flat, 0.5), DomainError);
    CHECK_THROWS_AS(bias_bound(s2, phi2, 0.0), DomainError);
}

TEST_CASE("optimal bandwidth presets") {
    CHECK(optimal_bandwidth_preset(AssumptionTag::a(2.0), 32, 1.0) == doctest::Approx(0.5));
    CHECK(optimal_bandwidth_preset(AssumptionTag::exponential(1.0, 1.0), std::exp(2.0), 1.0) == doctest::Approx(0.5));
    CHECK(optimal_bandwidth_preset(AssumptionTag::band_limited(2.0), 100, 1.0) == 0.5);
    CHECK_THROWS_AS(optimal_bandwidth_preset(AssumptionTag::exponential(1.0, 1.0), 100, 2.0), DomainError);
    CHECK_THROWS_AS(AssumptionTag::a(-1.0), DomainError);
}

TEST_CASE("deficiency rate limits and descriptors") {
    const Tuple p = kTuples[0];
    const DeficiencyRate r = deficiency_rate(expansion(p, p.a), expansion(p, p.b));
    CHECK(r.limit == doctest::Approx(2.0));
    CHECK(r.descriptor == "n^0.5");
    CHECK(r.at(1e6) == doctest::Approx(2000.0));
    CHECK(deficiency_rate(expansion(p, 1.0), expansion(p, 1.0)).limit == 0.0);
    for (const Tuple& q : kTuples) {
        const double fwd = deficiency_rate(expansion(q, q.a), expansion(q, q.b)).limit;
        const double back = deficiency_rate(expansion(q, q.b), expansion(q, q.a)).limit;
        CHECK(fwd == -back);
    }
    CHECK(deficiency_rate(expansion(kTuples[4], 0.0), expansion(kTuples[4], 1.0)).descriptor == "n/log n");
    MseExpansion other = expansion(p, 0.0);
    other.c = 2.0;
    CHECK_THROWS_AS(deficiency_rate(expansion(p, 0.0), other), DomainError);
}

TEST_CASE("matching deficiency agrees with a brute-force long-double solve") {
    for (const Tuple& p : kTuples) {
        for (double n : {1e3, 1e4, 1e6}) {
            CAPTURE(p.delta);
            CAPTURE(n);
            const double brute = brute_deficiency(p, n);
            CHECK(matching_deficiency(expansion(p, p.a), expansion(p, p.b), n) ==
                  doctest::Approx(brute).epsilon(1e-6).scale(1e-3));
        }
    }
}

TEST_CASE("deficiency over its rate approaches the limit") {
    for (const Tuple& p : kTuples) {
        const DeficiencyRate r = deficiency_rate(expansion(p, p.a), expansion(p, p.b));
        const double brute = brute_deficiency(p, 1e6);
        CAPTURE(p.kind == SecondOrderKind::Power ? p.delta : -1.0);
        MESSAGE("d/rate = " << brute / r.at(1e6) * r.limit << " limit = " << r.limit);
        CHECK(std::abs(brute / r.at(1e6) - 1.0) <= 0.01);
    }
}

TEST_CASE("deficiency relative to the EDF") {
    const double cm = 0.25;
    const auto c = AssumptionTag::band_limited(1.0);
    const double d100 = edf_deficiency(c, 0.5, 1.0 / oracle::pi, cm, 100, 1.0);
    CHECK(d100 == doctest::Approx(2.0 / oracle::pi * cm / 0.25 * 100.0));
    CHECK(edf_deficiency(c, 0.5, 1.0 / oracle::pi, cm, 200, 1.0) == 2.0 * d100);
    CHECK(edf_deficiency(AssumptionTag::a(2.0), 0.3, 0.0, cm, 100, 1.0) == 0.0);
    CHECK(edf_deficiency(AssumptionTag::a(2.0), 0.5, 0.4, cm, 32, 1.0) ==
          doctest::Approx(2.0 * 0.4 * cm / 0.25 * std::pow(32.0, 0.8)));
    CHECK(edf_deficiency(AssumptionTag::exponential(1.0, 1.0), 0.5, 0.4, cm, 100, 1.0) ==
          doctest::Approx(2.0 * 0.4 * cm / 0.25 * 100.0 / std::log(100.0)));
    CHECK_THROWS_AS(edf_deficiency(c, 0.0, 0.1, cm, 100, 1.0), DomainError);
}

TEST_CASE("large deficiency constants converge more slowly but still converge") {
    const std::vector<Tuple> slow{{0.5, 1.0, -1.0, 3.0, SecondOrderKind::Power, 0.25},
                                  {1.0, 0.9, -2.0, 2.0, SecondOrderKind::LogFactor, 0.5}};
    for (const Tuple& p : slow) {
        const DeficiencyRate r = deficiency_rate(expansion(p, p.a), expansion(p, p.b));
        double prev_gap = INFINITY;
        for (double n : {1e4, 1e6, 1e9, 1e12}) {
            const double gap = std::abs(brute_deficiency(p, n) / r.at(n) - 1.0);
            CHECK(gap < prev_gap);
            prev_gap = gap;
        }
        CHECK(prev_gap < 0.1);
    }
}
