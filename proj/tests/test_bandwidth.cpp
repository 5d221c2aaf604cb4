#include <doctest.h>

#include <cmath>
#include <random>

#include "flattop/bandwidth.hpp"
#include "flattop/cdf_estimators.hpp"
#include "flattop/errors.hpp"
#include "flattop/survival.hpp"
#include "flattop/sample.hpp"
#include "oracles.hpp"

using namespace flattop;

namespace {

EcfCurve population_curve(Eigen::Index n, double tmax, Eigen::Index points) {
    EcfCurve c;
    c.freqs = Eigen::VectorXd::LinSpaced(points, 0.0, tmax);
    c.magnitudes = (-0.5 * c.freqs.array().square()).exp();
    c.n = n;
    return c;
}

// Root of exp(-t^2/2) = C sqrt(log10 n / n), found by bisection.
double root_bandwidth(double n, double C, double eff) {
    const double thr = C * std::sqrt(std::log10(n) / n);
    const double t = oracle::bisect([&](double s) { return std::exp(-0.5 * s * s) - thr; }, 0.0, 10.0);
    return eff / t;
}

}  // namespace

TEST_CASE("threshold rule on the population Gaussian curve") {
    for (double n : {100.0, 1e4}) {
        CAPTURE(n);
        const EcfCurve c = population_curve(static_cast<Eigen::Index>(n), 8.0, 80001);
        BandwidthRule rule;
        rule.C = 2.0;
        rule.epsilon = 1.0;
        rule.effective_c = 0.75;
        const BandwidthSelection sel = select_bandwidth(c, rule);
        CHECK(sel.bandwidth == doctest::Approx(root_bandwidth(n, 2.0, 0.75)).epsilon(1e-3));
    }
    CHECK(root_bandwidth(100.0, 2.0, 0.75) == doctest::Approx(0.472).epsilon(2e-3));
    CHECK(root_bandwidth(1e4, 2.0, 0.75) == doctest::Approx(0.2956).epsilon(2e-3));
}

TEST_CASE("defaults follow the spec") {
    const BandwidthRule r = BandwidthRule::defaults(1000, 0.5);
    CHECK(r.C == 2.0);
    CHECK(r.epsilon == doctest::Approx(3.0));
    CHECK(BandwidthRule::defaults(5, 0.5).epsilon == 1.0);
    CHECK(r.threshold(1000) == doctest::Approx(2.0 * std::sqrt(3.0 / 1000.0)));
    BandwidthRule bad = r;
    bad.C = -1.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("no plateau before the grid ends throws") {
    EcfCurve c;
    c.freqs = Eigen::VectorXd::LinSpaced(100, 0.0, 5.0);
    c.magnitudes = Eigen::VectorXd::Ones(100);
    c.n = 100;
    CHECK_THROWS_AS(select_bandwidth(c, BandwidthRule::defaults(100, 0.75)), NoPlateauError);
}

TEST_CASE("plateau mode finds a flat stretch above the threshold") {
    EcfCurve c;
    c.freqs = Eigen::VectorXd::LinSpaced(2001, 0.0, 10.0);
    c.magnitudes = (1.0 - c.freqs.array()).max(0.5);
    c.n = 1000000;
    BandwidthRule rule = BandwidthRule::defaults(c.n, 0.75, BandwidthMode::Plateau);
    rule.epsilon = 1.0;
    const BandwidthSelection sel = select_bandwidth(c, rule);
    CHECK(sel.t_star >= 0.4);
    CHECK(sel.t_star <= 0.55);
    rule.mode = BandwidthMode::Threshold;
    CHECK_THROWS_AS(select_bandwidth(c, rule), NoPlateauError);
    CHECK(parse_bandwidth_mode(to_string(BandwidthMode::Plateau)) == BandwidthMode::Plateau);
    CHECK_THROWS_AS(parse_bandwidth_mode("bogus"), DomainError);
}

TEST_CASE("ECF matches a direct complex sum") {
    const Eigen::VectorXd x = (Eigen::VectorXd(4) << -1.0, 0.3, 0.3, 2.5).finished();
    const Eigen::VectorXd f = Eigen::VectorXd::LinSpaced(7, 0.0, 3.0);
    const EcfCurve c = ecf(CensoredSample::iid(x), f);
    for (Eigen::Index k = 0; k < f.size(); ++k) {
        double re = 0, im = 0;
        for (double v : x) {
            re += std::cos(f[k] * v) / 4.0;
            im += std::sin(f[k] * v) / 4.0;
        }
        CHECK(c.magnitudes[k] == doctest::Approx(std::hypot(re, im)).epsilon(1e-14));
    }
    CHECK(c.magnitudes[0] == doctest::Approx(1.0));
    CHECK(c.n == 4);
}

TEST_CASE("KM-weighted ECF reduces to the plain ECF without censoring") {
    std::mt19937_64 gen(9);
    std::normal_distribution<double> nd;
    Eigen::VectorXd x(50);
    for (auto& v : x) v = nd(gen);
    const auto s = CensoredSample::iid(x);
    const Eigen::VectorXd f = Eigen::VectorXd::LinSpaced(33, 0.0, 6.0);
    const EcfCurve a = ecf(s, f);
    const EcfCurve b = ecf(kaplan_meier(s), 50, f);
    for (Eigen::Index k = 0; k < f.size(); ++k) CHECK(b.magnitudes[k] == doctest::Approx(a.magnitudes[k]).epsilon(1e-12));
}

TEST_CASE("selected bandwidth is scale equivariant") {
    std::mt19937_64 gen(11);
    std::normal_distribution<double> nd;
    Eigen::VectorXd x(400);
    for (auto& v : x) v = nd(gen);
    const auto s1 = CensoredSample::iid(x);
    const auto s2 = CensoredSample::iid(2.0 * x);
    const BandwidthRule rule = BandwidthRule::defaults(400, 0.75);
    const double h1 = select_bandwidth(ecf(s1, default_frequency_grid(s1)), rule).bandwidth;
    const double h2 = select_bandwidth(ecf(s2, default_frequency_grid(s2)), rule).bandwidth;
    CHECK(h2 == doctest::Approx(2.0 * h1).epsilon(1e-9));
}

TEST_CASE("Gaussian CV bandwidth") {
    const Eigen::VectorXd grid = log_spaced_grid(0.01, 1.0, 25);
    CHECK(grid[0] == doctest::Approx(0.01));
    CHECK(grid[24] == doctest::Approx(1.0));
    CHECK(grid[12] == doctest::Approx(0.1));
    // Two identical points: each leave-one-out fit is a step at the same
    // location, and the squared error of smoothing it grows linearly in h,
    // so the smallest grid h wins.
    const auto same = CensoredSample::iid(Eigen::Vector2d(0.5, 0.5));
    CHECK(cv_bandwidth_gaussian(same, grid) == grid[0]);
    // Two points a unit apart: the optimum is interior, near h = 1.
    const auto apart = CensoredSample::iid(Eigen::Vector2d(0.0, 1.0));
    const double h2 = cv_bandwidth_gaussian(apart, log_spaced_grid(0.1, 10.0, 41));
    CHECK(h2 > 0.6);
    CHECK(h2 < 1.6);

    std::mt19937_64 gen(13);
    std::normal_distribution<double> nd;
    Eigen::VectorXd x(60);
    for (auto& v : x) v = nd(gen);
    const auto s = CensoredSample::iid(x);
    const double h = cv_bandwidth_gaussian(s, grid);
    const StepEstimate f = edf(s);
    for (Eigen::Index k = 0; k < grid.size(); ++k) {
        CHECK(cv_objective_gaussian(f, h) <= cv_objective_gaussian(f, grid[k]) + 1e-15);
    }
    CHECK_THROWS_AS(log_spaced_grid(1.0, 0.5, 3), DomainError);
}
