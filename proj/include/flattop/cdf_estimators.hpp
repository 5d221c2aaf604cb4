#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "flattop/errors.hpp"
#include "flattop/kernels.hpp"
#include "flattop/sample.hpp"

namespace flattop {

template <IntegratedKernel Kernel>
struct EstimatorConfig {
    const Kernel* kernel = nullptr;  // non-owning
    double bandwidth = 1.0;
    std::optional<double> boundary;  // left support point a for reflection
    bool standardize = false;

    void validate() const {
        if (kernel == nullptr) throw DomainError("estimator config has no kernel");
        if (!(bandwidth > 0.0 && std::isfinite(bandwidth))) throw DomainError("bandwidth must be positive and finite");
        if (boundary && !std::isfinite(*boundary)) throw DomainError("boundary must be finite");
    }

    void validate(const CensoredSample& sample) const {
        validate();
        if (boundary && sample.times.minCoeff() < *boundary) {
            throw DomainError("observations lie below the boundary point");
        }
    }
};

/// Empirical distribution function: mass 1/n per observation, ties
/// accumulated. Rejects censored observations.
StepEstimate edf(const CensoredSample& sample);

/// Running maximum over the grid order followed by clamping to [0, 1].
Eigen::VectorXd standardize_path(const Eigen::VectorXd& raw);

/// Survival counterpart: running minimum, then clamping to [0, 1].
Eigen::VectorXd standardize_survival_path(const Eigen::VectorXd& raw);

/// Ascending grid from the left end of the smoothing support up to `upto`
/// (inclusive) in steps of h/20, used to realise the running supremum of
/// a pointwise standardized estimate. Starts at the boundary when given,
/// else 30 bandwidths left of the smallest jump.
Eigen::VectorXd leading_grid(const StepEstimate& jumps, double bandwidth, std::optional<double> boundary,
                             double upto);

/// leading_grid up to max(points) with the points merged in, sorted and
/// deduplicated; index_of[k] locates points[k] in the result.
Eigen::VectorXd merged_grid(const StepEstimate& jumps, double bandwidth, std::optional<double> boundary,
                            const Eigen::VectorXd& points, std::vector<Eigen::Index>& index_of);

/// sum_j s_j Kbar((t - x_j)/h) for an arbitrary jump measure.
template <IntegratedKernel Kernel>
double smooth_jumps(const StepEstimate& jumps, const Kernel& kernel, double bandwidth, double t) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < jumps.size(); ++j) {
        sum += jumps.jump_heights[j] * kernel.kbar((t - jumps.jump_locations[j]) / bandwidth);
    }
    return sum;
}

/// Smoothed CDF of a jump measure with optional reflection at the boundary
/// a: F(t) - F(2a - t) for t >= a, exactly 0 below a. No standardization.
template <IntegratedKernel Kernel>
double smoothed_cdf_raw(const StepEstimate& jumps, const EstimatorConfig<Kernel>& cfg, double t) {
    const double h = cfg.bandwidth;
    if (!cfg.boundary) return smooth_jumps(jumps, *cfg.kernel, h, t);
    const double a = *cfg.boundary;
    if (t < a) return 0.0;
    return smooth_jumps(jumps, *cfg.kernel, h, t) - smooth_jumps(jumps, *cfg.kernel, h, 2.0 * a - t);
}

/// Vectorised smoothed CDF of a jump measure; standardize_path applied last
/// when cfg.standardize (the running maximum follows the grid order).
template <IntegratedKernel Kernel>
Eigen::VectorXd evaluate_on_grid(const StepEstimate& jumps, const EstimatorConfig<Kernel>& cfg,
                                 const Eigen::VectorXd& grid) {
    cfg.validate();
    Eigen::VectorXd out(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i) out[i] = smoothed_cdf_raw(jumps, cfg, grid[i]);
    return cfg.standardize ? standardize_path(out) : out;
}

template <IntegratedKernel Kernel>
Eigen::VectorXd evaluate_on_grid(const CensoredSample& sample, const EstimatorConfig<Kernel>& cfg,
                                 const Eigen::VectorXd& grid) {
    cfg.validate(sample);
    return evaluate_on_grid(edf(sample), cfg, grid);
}

/// Estimates at points in any order. Standardized values come from the
/// running supremum along merged_grid; the whole path is copied to `path`
/// when given.
template <IntegratedKernel Kernel>
Eigen::VectorXd smoothed_cdf_at(const StepEstimate& jumps, const EstimatorConfig<Kernel>& cfg,
                                const Eigen::VectorXd& points, Eigen::VectorXd* path = nullptr) {
    cfg.validate();
    Eigen::VectorXd out(points.size());
    if (!cfg.standardize) {
        for (Eigen::Index k = 0; k < points.size(); ++k) out[k] = smoothed_cdf_raw(jumps, cfg, points[k]);
        return out;
    }
    std::vector<Eigen::Index> index_of;
    const Eigen::VectorXd grid = merged_grid(jumps, cfg.bandwidth, cfg.boundary, points, index_of);
    const Eigen::VectorXd p = evaluate_on_grid(jumps, cfg, grid);
    for (Eigen::Index k = 0; k < points.size(); ++k) out[k] = p[index_of[static_cast<std::size_t>(k)]];
    if (path) *path = p;
    return out;
}

/// F_h(t) = (1/n) sum_j Kbar((t - X_j)/h) for iid data, with the optional
/// boundary reflection. With cfg.standardize the running supremum is taken
/// over leading_grid(...) ending at t.
template <IntegratedKernel Kernel>
double smoothed_cdf(const CensoredSample& sample, const EstimatorConfig<Kernel>& cfg, double t) {
    cfg.validate(sample);
    const StepEstimate jumps = edf(sample);
    if (!cfg.standardize) return smoothed_cdf_raw(jumps, cfg, t);
    const Eigen::VectorXd grid = leading_grid(jumps, cfg.bandwidth, cfg.boundary, t);
    return evaluate_on_grid(jumps, cfg, grid)[grid.size() - 1];
}

}  // namespace flattop
