#pragma once

#include <Eigen/Dense>
#include <string>

#include "flattop/sample.hpp"

namespace flattop {

/// |phi_hat(t)| on a frequency grid, normalised so that the value at t = 0 is
/// 1 for iid data (KM-weighted ECF under censoring keeps the raw KM mass).
struct EcfCurve {
    Eigen::VectorXd freqs;
    Eigen::VectorXd magnitudes;
    Eigen::Index n = 0;
};

/// |(1/n) sum_j exp(i t X_j)| for iid samples; |sum_j s_j exp(i t X_j)| over
/// the Kaplan-Meier jumps otherwise. Sums run in a fixed order.
EcfCurve ecf(const CensoredSample& sample, const Eigen::VectorXd& freqs);
EcfCurve ecf(const StepEstimate& jumps, Eigen::Index n, const Eigen::VectorXd& freqs);

enum class BandwidthMode { Threshold, Plateau };

std::string to_string(BandwidthMode mode);
BandwidthMode parse_bandwidth_mode(const std::string& name);

struct BandwidthRule {
    double C = 2.0;
    double epsilon = 1.0;
    double effective_c = 0.75;
    BandwidthMode mode = BandwidthMode::Threshold;

    /// C = 2, epsilon = max(1, log10 n).
    static BandwidthRule defaults(Eigen::Index n, double effective_c, BandwidthMode mode = BandwidthMode::Threshold);

    /// C sqrt(log10(n) / n)
    double threshold(Eigen::Index n) const;
    void validate() const;
};

struct BandwidthSelection {
    double bandwidth = 0.0;
    double t_star = 0.0;
    double threshold = 0.0;
};

/// Threshold: t* is the smallest positive grid frequency such that every
/// grid frequency in the open window (t*, t* + epsilon) lies below
/// C sqrt(log10 n / n). Plateau: once the least-squares slope of |phi_hat|
/// over [t, t + epsilon] has dropped below -tol (descent), t* is the first
/// later grid frequency whose window slope is within tol of zero, where
/// tol = threshold / epsilon. Both return h = effective_c / t*.
/// Throws NoPlateauError when the window runs past the grid first.
BandwidthSelection select_bandwidth(const EcfCurve& curve, const BandwidthRule& rule);

/// `points` equispaced frequencies on [0, 4 pi / scale], with scale the
/// normal-consistent IQR of the observed times (sample sd or 1 as
/// fallbacks for degenerate spreads).
Eigen::VectorXd default_frequency_grid(const CensoredSample& sample, Eigen::Index points = 512);

/// Least-squares cross-validation for the Gaussian-kernel CDF estimator:
/// CV(h) = sum_i w_i int [1{X_i <= t} - F_{h,-i}(t)]^2 dt over the range of
/// the data extended by 3h, trapezoid rule on `quad_points` nodes. For iid
/// data w_i = 1/n and F_{h,-i} is the leave-one-out estimate; under
/// censoring the KM jumps play the role of both weights and observations.
/// Returns the first minimiser over h_grid.
double cv_bandwidth_gaussian(const CensoredSample& sample, const Eigen::VectorXd& h_grid, int quad_points = 128);
double cv_bandwidth_gaussian(const StepEstimate& jumps, const Eigen::VectorXd& h_grid, int quad_points = 128);
double cv_objective_gaussian(const StepEstimate& jumps, double h, int quad_points = 128);

/// `count` log-spaced bandwidths on [lo, hi].
Eigen::VectorXd log_spaced_grid(double lo, double hi, Eigen::Index count);

}  // namespace flattop
