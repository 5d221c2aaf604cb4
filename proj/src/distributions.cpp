#include "flattop/distributions.hpp"

#include <cmath>
#include <sstream>

#include "flattop/errors.hpp"
#include "flattop/kernels.hpp"
#include "flattop/special_functions.hpp"

namespace flattop {

namespace {

// sup f/g for f the Polya-type density and g the Cauchy(0, 2) density is
// about 1.478, attained near |x| = 2.571.
constexpr double kPolyaEnvelope = 1.5;
constexpr int kMaxRejections = 1000000;

double polya_over_cauchy(double x) {
    if (std::abs(x) < 1e-4) return 1.0 + x * x / 6.0;
    return (1.0 - std::cos(x)) * (4.0 + x * x) / (2.0 * x * x);
}

}  // namespace

Distribution Distribution::normal(double sd) {
    Distribution d;
    d.kind = Kind::Normal;
    d.scale = sd;
    d.validate();
    return d;
}

Distribution Distribution::weibull(double shape, double scale) {
    Distribution d;
    d.kind = Kind::Weibull;
    d.shape = shape;
    d.scale = scale;
    d.validate();
    return d;
}

Distribution Distribution::polya() {
    Distribution d;
    d.kind = Kind::Polya;
    return d;
}

void Distribution::validate() const {
    if (!(scale > 0.0)) throw DomainError("distribution scale must be positive");
    if (kind == Kind::Weibull && !(shape > 0.0)) throw DomainError("Weibull shape must be positive");
}

double Distribution::cdf(double x) const {
    switch (kind) {
        case Kind::Normal: return normal_cdf(x / scale);
        case Kind::Weibull: return x <= 0.0 ? 0.0 : -std::expm1(-std::pow(x / scale, shape));
        case Kind::Polya: return trapezoid_kbar(0.0, x);
    }
    return 0.0;
}

double Distribution::pdf(double x) const {
    switch (kind) {
        case Kind::Normal: return normal_pdf(x / scale) / scale;
        case Kind::Weibull: {
            if (x < 0.0) return 0.0;
            const double z = x / scale;
            return shape / scale * std::pow(z, shape - 1.0) * std::exp(-std::pow(z, shape));
        }
        case Kind::Polya: return trapezoid_kernel(0.0, x);
    }
    return 0.0;
}

std::string Distribution::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::Normal: os << "normal(sd=" << scale << ")"; break;
        case Kind::Weibull: os << "weibull(shape=" << shape << ", scale=" << scale << ")"; break;
        case Kind::Polya: os << "polya"; break;
    }
    return os.str();
}

Eigen::VectorXd sample_distribution(const Distribution& dist, Eigen::Index count, Stream& stream) {
    dist.validate();
    if (count < 0) throw DomainError("sample count must be nonnegative");
    Eigen::VectorXd out(count);
    for (Eigen::Index i = 0; i < count; ++i) {
        switch (dist.kind) {
            case Distribution::Kind::Normal:
                out[i] = dist.scale * normal_quantile(stream.uniform());
                break;
            case Distribution::Kind::Weibull:
                out[i] = dist.scale * std::pow(-std::log(stream.uniform()), 1.0 / dist.shape);
                break;
            case Distribution::Kind::Polya: {
                int tries = 0;
                for (;;) {
                    const double x = 2.0 * std::tan(kPi * (stream.uniform() - 0.5));
                    const double ratio = polya_over_cauchy(x);
                    if (ratio > kPolyaEnvelope) throw DomainError("Polya rejection envelope violated");
                    if (stream.uniform() * kPolyaEnvelope <= ratio) {
                        out[i] = x;
                        break;
                    }
                    if (++tries > kMaxRejections) throw DomainError("Polya rejection sampler did not accept");
                }
                break;
            }
        }
    }
    return out;
}

}  // namespace flattop
