#pragma once

#include <Eigen/Dense>
#include <string>

#include "flattop/rng.hpp"

namespace flattop {

struct Distribution {
    enum class Kind { Normal, Weibull, Polya };
    Kind kind = Kind::Normal;
    double shape = 1.0;  // Weibull shape; unused otherwise
    double scale = 1.0;  // normal sd, Weibull scale

    static Distribution normal(double sd = 1.0);
    static Distribution weibull(double shape, double scale);
    /// f(x) = (1 - cos x) / (pi x^2), characteristic function (1 - |t|)^+.
    static Distribution polya();

    void validate() const;
    double cdf(double x) const;
    double pdf(double x) const;
    std::string describe() const;
};

/// Inverse-CDF draws for normal and Weibull; rejection against a Cauchy
/// envelope of scale 2 for the Polya-type density.
Eigen::VectorXd sample_distribution(const Distribution& dist, Eigen::Index count, Stream& stream);

}  // namespace flattop
