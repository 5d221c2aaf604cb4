#pragma once

#include <Eigen/Dense>

#include "flattop/cdf_estimators.hpp"
#include "flattop/sample.hpp"

namespace flattop {

/// Product-limit estimator. The returned jumps are those of the CDF
/// estimate 1 - S(t); with no censoring they equal the EDF jumps bitwise.
/// Censorings tied with events leave the risk set after the events.
StepEstimate kaplan_meier(const CensoredSample& sample);

/// KM survival step function S(t) = 1 - sum of the jumps at or before t.
double km_survival(const StepEstimate& km, double t);

/// S_h(t) = sum_j s_j (1 - Kbar((t - X_j)/h)) = mass - F_h(t). Decreases from
/// the total KM mass to 0. With a boundary a it is the total mass below a
/// and mass - (F_h(t) - F_h(2a - t)) from a on.
template <IntegratedKernel Kernel>
double smoothed_survival_raw(const StepEstimate& km, const EstimatorConfig<Kernel>& cfg, double t) {
    return km.total_mass() - smoothed_cdf_raw(km, cfg, t);
}

template <IntegratedKernel Kernel>
Eigen::VectorXd evaluate_survival_on_grid(const StepEstimate& km, const EstimatorConfig<Kernel>& cfg,
                                          const Eigen::VectorXd& grid) {
    cfg.validate();
    Eigen::VectorXd out(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i) out[i] = smoothed_survival_raw(km, cfg, grid[i]);
    return cfg.standardize ? standardize_survival_path(out) : out;
}

template <IntegratedKernel Kernel>
Eigen::VectorXd evaluate_survival_on_grid(const CensoredSample& sample, const EstimatorConfig<Kernel>& cfg,
                                          const Eigen::VectorXd& grid) {
    cfg.validate(sample);
    return evaluate_survival_on_grid(kaplan_meier(sample), cfg, grid);
}

/// Survival counterpart of smoothed_cdf_at (running infimum).
template <IntegratedKernel Kernel>
Eigen::VectorXd smoothed_survival_at(const StepEstimate& km, const EstimatorConfig<Kernel>& cfg,
                                     const Eigen::VectorXd& points) {
    cfg.validate();
    Eigen::VectorXd out(points.size());
    if (!cfg.standardize) {
        for (Eigen::Index k = 0; k < points.size(); ++k) out[k] = smoothed_survival_raw(km, cfg, points[k]);
        return out;
    }
    std::vector<Eigen::Index> index_of;
    const Eigen::VectorXd grid = merged_grid(km, cfg.bandwidth, cfg.boundary, points, index_of);
    const Eigen::VectorXd p = evaluate_survival_on_grid(km, cfg, grid);
    for (Eigen::Index k = 0; k < points.size(); ++k) out[k] = p[index_of[static_cast<std::size_t>(k)]];
    return out;
}

template <IntegratedKernel Kernel>
double smoothed_survival(const CensoredSample& sample, const EstimatorConfig<Kernel>& cfg, double t) {
    cfg.validate(sample);
    const StepEstimate km = kaplan_meier(sample);
    if (!cfg.standardize) return smoothed_survival_raw(km, cfg, t);
    const Eigen::VectorXd grid = leading_grid(km, cfg.bandwidth, cfg.boundary, t);
    return evaluate_survival_on_grid(km, cfg, grid)[grid.size() - 1];
}

}  // namespace flattop
