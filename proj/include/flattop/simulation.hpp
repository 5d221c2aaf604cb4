#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flattop/bandwidth.hpp"
#include "flattop/distributions.hpp"
#include "flattop/kernels.hpp"

namespace flattop {

struct Scenario {
    std::string name;
    Distribution lifetime;
    std::optional<Distribution> censoring;
    std::optional<double> boundary;  // reflection point, applied to every smoothed estimator
    Eigen::VectorXd eval_points;
    std::vector<int> sample_sizes;
    int replications = 1000;
    std::uint64_t seed = 42;
    double bw_C = 2.0;  // threshold constant of the flat-top bandwidth rule

    /// N(0,1), t in {-1.5, 0, 1.5}, n in {15, 30}, bw_C = 1.25.
    static Scenario normal_iid();
    /// Weibull(3, 1.5) lifetimes censored by Weibull(4, 3), boundary 0,
    /// t in {0.75, 1.25, 1.75}, n in {15, 30}, bw_C = 2.
    static Scenario weibull_censored();
    /// Polya-type density, t in {0, 2, 5}, n = 200.
    static Scenario polya_bandlimited();
    /// One of "normal-iid", "weibull-censored", "polya-bandlimited".
    static Scenario by_name(const std::string& name);

    void validate() const;
    bool censored() const { return censoring.has_value(); }
};

enum class EstimatorKind { Step, GaussianCv, Trapezoid, SmoothTrapezoid };

struct EstimatorSpec {
    EstimatorKind kind = EstimatorKind::Trapezoid;
    bool standardized = false;

    /// "edf" or "km", "gauss-cv", "trapezoid", "smooth"; "-std" appended for
    /// the standardized variants.
    std::string name(bool censored) const;
    static EstimatorSpec parse(const std::string& name);
};

/// EDF/KM, then Gaussian-CV, trapezoid and smooth flat-top, each smoothed one
/// raw and standardized.
std::vector<EstimatorSpec> default_estimators();

struct HarnessOptions {
    double trapezoid_c = 0.75;
    double table_tol = 1e-6;
    BandwidthMode bw_mode = BandwidthMode::Threshold;
    std::optional<double> bw_C;        // overrides Scenario::bw_C
    std::optional<double> bw_epsilon;  // default max(1, log10 n)
    Eigen::Index freq_points = 512;
    Eigen::Index cv_grid_points = 40;
    int workers = 1;
    int max_retries = 1000;

    void validate() const;
};

struct MseCell {
    std::string estimator;
    double t = 0.0;
    int n = 0;
    double mse = 0.0;
    double bias = 0.0;
    double var = 0.0;
    double se = 0.0;  // Monte Carlo standard error of mse
    int reps = 0;
};

struct MseReport {
    std::string scenario;
    std::uint64_t seed = 0;
    std::vector<MseCell> cells;
    std::vector<int> retries;          // per sample size, bandwidth-failure redraws
    long long shape_violations = 0;   // standardized paths leaving [0,1] or decreasing
    std::vector<double> median_bandwidth;  // per (sample size, estimator), NaN for the step estimator

    const MseCell& cell(const std::string& estimator, double t, int n) const;
    /// Header `estimator,t,n,mse,bias,var,se,reps`, rows in a fixed order,
    /// values printed in shortest round-trip form.
    std::string to_csv() const;
    std::string to_json() const;
};

/// Monte Carlo MSE of every estimator at every (t, n) cell. Replications run
/// on `workers` threads; results depend only on the scenario and options.
MseReport run_scenario(const Scenario& scenario, const std::vector<EstimatorSpec>& estimators,
                       const HarnessOptions& options = {});

struct ZeroBiasReport {
    int n = 0;
    double h = 0.0;
    int reps = 0;
    std::uint64_t seed = 0;
    Eigen::VectorXd eval_points;
    Eigen::VectorXd bias;
    Eigen::VectorXd se;  // NaN when reps < 2
    bool se_defined = false;
    std::string note;

    std::string to_json() const;
};

/// Bias of the trapezoid (c = 0.75) smoothed CDF at fixed h on Polya-type
/// data; the bias vanishes for h <= 0.75.
ZeroBiasReport zero_bias_experiment(int n, double h, int reps, std::uint64_t seed,
                                    const Eigen::VectorXd& eval_points = Eigen::Vector3d(0.0, 2.0, 5.0),
                                    int workers = 1);

}  // namespace flattop
