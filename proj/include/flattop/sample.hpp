#pragma once

#include <Eigen/Dense>

namespace flattop {

using EventMask = Eigen::Array<bool, Eigen::Dynamic, 1>;

/// Observed values with event indicators. All-true encodes iid data.
struct CensoredSample {
    Eigen::VectorXd times;
    EventMask event;

    static CensoredSample iid(Eigen::VectorXd times);
    static CensoredSample censored(Eigen::VectorXd times, EventMask event);

    Eigen::Index size() const { return times.size(); }
    bool all_events() const { return event.all(); }
    bool any_event() const { return event.any(); }
    /// n >= 1, finite times, matching lengths.
    void validate() const;
};

/// Right-continuous step function given by its jumps: F(t) = sum of the
/// heights at locations <= t. Locations are strictly ascending.
struct StepEstimate {
    Eigen::VectorXd jump_locations;
    Eigen::VectorXd jump_heights;

    Eigen::Index size() const { return jump_locations.size(); }
    double total_mass() const { return jump_heights.sum(); }
    double cumulative(double t) const;
};

}  // namespace flattop
