#include "flattop/sample.hpp"

#include <algorithm>
#include <cmath>

#include "flattop/errors.hpp"

namespace flattop {

CensoredSample CensoredSample::iid(Eigen::VectorXd times) {
    CensoredSample s{std::move(times), EventMask()};
    s.event = EventMask::Constant(s.times.size(), true);
    s.validate();
    return s;
}

CensoredSample CensoredSample::censored(Eigen::VectorXd times, EventMask event) {
    CensoredSample s{std::move(times), std::move(event)};
    s.validate();
    return s;
}

void CensoredSample::validate() const {
    if (times.size() < 1) throw DomainError("sample must contain at least one observation");
    if (event.size() != times.size()) throw DomainError("event indicators and times differ in length");
    if (!times.allFinite()) throw DomainError("sample times must be finite");
}

double StepEstimate::cumulative(double t) const {
    const double* begin = jump_locations.data();
    const double* end = begin + jump_locations.size();
    const auto count = std::upper_bound(begin, end, t) - begin;
    return jump_heights.head(count).sum();
}

}  // namespace flattop
