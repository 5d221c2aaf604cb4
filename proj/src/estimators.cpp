#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "flattop/cdf_estimators.hpp"
#include "flattop/survival.hpp"

namespace flattop {

StepEstimate edf(const CensoredSample& sample) {
    sample.validate();
    if (!sample.all_events()) throw DomainError("the EDF is defined for uncensored samples only; use kaplan_meier");
    std::vector<double> sorted(sample.times.data(), sample.times.data() + sample.size());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    std::vector<double> locs, heights;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        locs.push_back(sorted[i]);
        heights.push_back(static_cast<double>(j - i) / n);
        i = j;
    }
    return {Eigen::Map<Eigen::VectorXd>(locs.data(), static_cast<Eigen::Index>(locs.size())),
            Eigen::Map<Eigen::VectorXd>(heights.data(), static_cast<Eigen::Index>(heights.size()))};
}

StepEstimate kaplan_meier(const CensoredSample& sample) {
    sample.validate();
    if (!sample.any_event()) throw DomainError("Kaplan-Meier needs at least one event");
    const Eigen::Index n = sample.size();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (sample.times[a] != sample.times[b]) return sample.times[a] < sample.times[b];
        return sample.event[a] && !sample.event[b];
    });
    // Redistribute-to-the-right form of the product limit: every subject still
    // at risk carries mass multiplier/n, and a censored subject's mass is
    // shared among those remaining. Without censoring the multiplier stays
    // exactly 1 and the jumps reproduce the EDF's count/n.
    double multiplier = 1.0;
    const double total = static_cast<double>(n);
    Eigen::Index at_risk = n;
    std::vector<double> locs, heights;
    for (std::size_t i = 0; i < order.size();) {
        const double t = sample.times[order[i]];
        Eigen::Index deaths = 0, censored = 0;
        std::size_t j = i;
        for (; j < order.size() && sample.times[order[j]] == t; ++j) {
            if (sample.event[order[j]]) {
                ++deaths;
            } else {
                ++censored;
            }
        }
        if (deaths > 0) {
            locs.push_back(t);
            heights.push_back(static_cast<double>(deaths) * multiplier / total);
            at_risk -= deaths;
        }
        if (censored > 0) {
            const Eigen::Index remaining = at_risk - censored;
            if (remaining > 0) multiplier *= static_cast<double>(at_risk) / static_cast<double>(remaining);
            at_risk = remaining;
        }
        i = j;
    }
    return {Eigen::Map<Eigen::VectorXd>(locs.data(), static_cast<Eigen::Index>(locs.size())),
            Eigen::Map<Eigen::VectorXd>(heights.data(), static_cast<Eigen::Index>(heights.size()))};
}

double km_survival(const StepEstimate& km, double t) { return 1.0 - km.cumulative(t); }

Eigen::VectorXd standardize_path(const Eigen::VectorXd& raw) {
    Eigen::VectorXd out(raw.size());
    double running = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < raw.size(); ++i) {
        running = std::max(running, raw[i]);
        out[i] = std::clamp(running, 0.0, 1.0);
    }
    return out;
}

Eigen::VectorXd standardize_survival_path(const Eigen::VectorXd& raw) {
    Eigen::VectorXd out(raw.size());
    double running = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < raw.size(); ++i) {
        running = std::min(running, raw[i]);
        out[i] = std::clamp(running, 0.0, 1.0);
    }
    return out;
}

Eigen::VectorXd leading_grid(const StepEstimate& jumps, double bandwidth, std::optional<double> boundary,
                             double upto) {
    if (!(bandwidth > 0.0)) throw DomainError("bandwidth must be positive");
    const double start = boundary ? *boundary : jumps.jump_locations.minCoeff() - 30.0 * bandwidth;
    if (!(start < upto)) return Eigen::VectorXd::Constant(1, upto);
    const double step = bandwidth / 20.0;
    const auto steps = static_cast<Eigen::Index>(std::ceil((upto - start) / step));
    Eigen::VectorXd grid(steps + 1);
    for (Eigen::Index k = 0; k < steps; ++k) grid[k] = start + static_cast<double>(k) * step;
    grid[steps] = upto;
    return grid;
}

Eigen::VectorXd merged_grid(const StepEstimate& jumps, double bandwidth, std::optional<double> boundary,
                            const Eigen::VectorXd& points, std::vector<Eigen::Index>& index_of) {
    if (points.size() == 0) throw DomainError("no evaluation points");
    const Eigen::VectorXd lead = leading_grid(jumps, bandwidth, boundary, points.maxCoeff());
    std::vector<double> grid(lead.data(), lead.data() + lead.size());
    grid.insert(grid.end(), points.data(), points.data() + points.size());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    index_of.resize(static_cast<std::size_t>(points.size()));
    for (Eigen::Index k = 0; k < points.size(); ++k) {
        index_of[static_cast<std::size_t>(k)] = std::lower_bound(grid.begin(), grid.end(), points[k]) - grid.begin();
    }
    return Eigen::Map<const Eigen::VectorXd>(grid.data(), static_cast<Eigen::Index>(grid.size()));
}

}  // namespace flattop
