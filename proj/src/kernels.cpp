#include "flattop/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "flattop/errors.hpp"
#include "flattop/quadrature.hpp"
#include "flattop/special_functions.hpp"

namespace flattop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// d/dy sin(y)/y
double sinc_derivative(double y) {
    if (std::abs(y) < 1e-3) {
        const double y2 = y * y;
        return -y / 3.0 * (1.0 - y2 / 10.0 * (1.0 - y2 / 28.0));
    }
    return (y * std::cos(y) - std::sin(y)) / (y * y);
}

// Smooth edge on c < s < 1 and its derivative.
double smooth_edge(double b, double c, double s) {
    const double d1 = s - c;
    const double d2 = s - 1.0;
    const double inner = b * std::exp(-b / (d1 * d1));
    return std::exp(-inner / (d2 * d2));
}

double smooth_edge_derivative(double b, double c, double s) {
    const double d1 = s - c;
    const double d2 = s - 1.0;
    const double inner = b * std::exp(-b / (d1 * d1));
    const double kappa = std::exp(-inner / (d2 * d2));
    if (kappa == 0.0) return 0.0;
    const double inner_prime = inner * 2.0 * b / (d1 * d1 * d1);
    return kappa * (-inner_prime / (d2 * d2) + 2.0 * inner / (d2 * d2 * d2));
}

QuadratureOptions quad_opts(double abs_tol) {
    QuadratureOptions o;
    o.abs_tol = abs_tol;
    o.max_intervals = 200000;
    return o;
}

// Total variation of samples padded with fixed end values.
double sampled_variation(double left, const std::vector<double>& v, double right) {
    double tv = std::abs(v.front() - left) + std::abs(right - v.back());
    for (std::size_t i = 1; i < v.size(); ++i) tv += std::abs(v[i] - v[i - 1]);
    return tv;
}

}  // namespace

std::string to_string(FlatTopFamily family) {
    return family == FlatTopFamily::Trapezoid ? "trapezoid" : "smooth";
}

FlatTopFamily parse_family(const std::string& name) {
    if (name == "trapezoid" || name == "trap") return FlatTopFamily::Trapezoid;
    if (name == "smooth" || name == "smooth-trapezoid" || name == "smooth_trapezoid") {
        return FlatTopFamily::SmoothTrapezoid;
    }
    throw DomainError("unknown kernel family '" + name + "' (expected trapezoid or smooth)");
}

FlatTopSpec FlatTopSpec::trapezoid(double c) {
    FlatTopSpec s{FlatTopFamily::Trapezoid, c, 0.0, c};
    s.validate();
    return s;
}

FlatTopSpec FlatTopSpec::smooth_trapezoid(double b, double c, std::optional<double> effective_c) {
    double eff = c;
    if (effective_c) {
        eff = *effective_c;
    } else if (b == 1.0 && c == 0.05) {
        eff = 0.5;
    }
    FlatTopSpec s{FlatTopFamily::SmoothTrapezoid, c, b, eff};
    s.validate();
    return s;
}

void FlatTopSpec::validate() const {
    std::ostringstream msg;
    if (!(c > 0.0 && c < 1.0)) {
        msg << "flat-top radius c must lie in (0, 1), got " << c;
    } else if (family == FlatTopFamily::SmoothTrapezoid && !(b > 0.0 && std::isfinite(b))) {
        msg << "smooth trapezoid needs b > 0, got " << b;
    } else if (!(effective_c >= c && effective_c <= 1.0)) {
        msg << "effective flat-top radius must lie in [c, 1], got " << effective_c;
    } else if (family == FlatTopFamily::Trapezoid && effective_c != c) {
        msg << "trapezoid effective radius must equal c";
    } else {
        return;
    }
    throw DomainError(msg.str());
}

double eval_kappa(const FlatTopSpec& spec, double s) {
    const double a = std::abs(s);
    if (a <= spec.c) return 1.0;
    if (a >= 1.0) return 0.0;
    if (spec.family == FlatTopFamily::Trapezoid) return (1.0 - a) / (1.0 - spec.c);
    return smooth_edge(spec.b, spec.c, a);
}

double trapezoid_kernel(double c, double x) {
    // cos(cx) - cos(x) = 2 sin((1+c)x/2) sin((1-c)x/2), written with sinc to
    // avoid cancellation near the origin.
    return (1.0 + c) / (2.0 * kPi) * sinc(0.5 * (1.0 + c) * x) * sinc(0.5 * (1.0 - c) * x);
}

double trapezoid_kernel_derivative(double c, double x) {
    const double a = 0.5 * (1.0 + c);
    const double b = 0.5 * (1.0 - c);
    return (1.0 + c) / (2.0 * kPi) *
           (a * sinc_derivative(a * x) * sinc(b * x) + b * sinc(a * x) * sinc_derivative(b * x));
}

double trapezoid_kbar(double c, double t) {
    const double a = 0.5 * (1.0 + c);
    const double b = 0.5 * (1.0 - c);
    // (cos t - cos ct)/t = -2 sin(at) sin(bt)/t
    const double cos_term = -2.0 * std::sin(a * t) * b * sinc(b * t);
    return 0.5 + (cos_term + sine_integral(t) - c * sine_integral(c * t)) / (kPi * (1.0 - c));
}

double eval_kernel(const FlatTopSpec& spec, double x, double abs_tol) {
    if (spec.family == FlatTopFamily::Trapezoid) return trapezoid_kernel(spec.c, x);
    const auto f = [&](double s) { return smooth_edge(spec.b, spec.c, s) * std::cos(s * x); };
    const double edge = integrate(f, spec.c, 1.0, quad_opts(abs_tol * kPi)).value;
    return (spec.c * sinc(spec.c * x) + edge) / kPi;
}

double eval_kernel_derivative(const FlatTopSpec& spec, double x, double abs_tol) {
    if (spec.family == FlatTopFamily::Trapezoid) return trapezoid_kernel_derivative(spec.c, x);
    // K'(x) = -(1/pi) int_0^1 s kappa(s) sin(sx) ds; the flat part integrates
    // to -c^2 sinc'(cx).
    const auto f = [&](double s) { return s * smooth_edge(spec.b, spec.c, s) * std::sin(s * x); };
    const double edge = integrate(f, spec.c, 1.0, quad_opts(abs_tol * kPi)).value;
    return -(-spec.c * spec.c * sinc_derivative(spec.c * x) + edge) / kPi;
}

double eval_kbar(const FlatTopSpec& spec, double t, double abs_tol) {
    if (spec.family == FlatTopFamily::Trapezoid) return trapezoid_kbar(spec.c, t);
    // sin(st)/s = t sinc(st) stays bounded at s = 0.
    const auto f = [&](double s) { return smooth_edge(spec.b, spec.c, s) * t * sinc(s * t); };
    const double edge = integrate(f, spec.c, 1.0, quad_opts(abs_tol * kPi)).value;
    return 0.5 + (sine_integral(spec.c * t) + edge) / kPi;
}

double TailBound::bound_at(double t) const {
    const double at = std::abs(t);
    double best = kInf;
    for (int k = 0; k < 3; ++k) best = std::min(best, constants[k] / (kPi * std::pow(at, k + 2)));
    return best;
}

double TailBound::cutoff_for(double tol) const {
    double best = kInf;
    for (int k = 0; k < 3; ++k) {
        if (std::isfinite(constants[k])) best = std::min(best, std::pow(constants[k] / (kPi * tol), 1.0 / (k + 2)));
    }
    return best;
}

TailBound kbar_tail_bound(const FlatTopSpec& spec) {
    spec.validate();
    const double c = spec.c;
    if (spec.family == FlatTopFamily::Trapezoid) {
        // g' = 0 on (0, c), c/((1-c) s^2) on (c, 1), -1/s^2 beyond: jumps at c
        // and 1 plus the monotone pieces.
        const double v2 = 1.0 / ((1.0 - c) * c) + (1.0 + c) / c + 1.0 / (1.0 - c) + 1.0;
        return {{v2, kInf, kInf}};
    }
    // Smooth edge: g' analytically, higher derivatives by central differences
    // on a fine grid. All derivatives vanish at c and match 1/s at 1, so only
    // the interior variation and the monotone 1/s tail ((k-1)! each) remain.
    constexpr int kSamples = 400001;
    const double ds = (1.0 - c) / (kSamples + 1);
    std::vector<double> g1(kSamples);
    for (int i = 0; i < kSamples; ++i) {
        const double s = c + (i + 1) * ds;
        const double kappa = smooth_edge(spec.b, c, s);
        g1[i] = -smooth_edge_derivative(spec.b, c, s) / s - (1.0 - kappa) / (s * s);
    }
    auto differentiate = [&](const std::vector<double>& v) {
        std::vector<double> d(v.size());
        for (std::size_t i = 1; i + 1 < v.size(); ++i) d[i] = (v[i + 1] - v[i - 1]) / (2.0 * ds);
        d.front() = (v[1] - v[0]) / ds;
        d.back() = (v[v.size() - 1] - v[v.size() - 2]) / ds;
        return d;
    };
    const std::vector<double> g2 = differentiate(g1);
    const std::vector<double> g3 = differentiate(g2);
    // Safety factor covers the finite-difference and sampling error.
    constexpr double kMargin = 1.05;
    return {{kMargin * (sampled_variation(0.0, g1, -1.0) + 1.0), kMargin * (sampled_variation(0.0, g2, 2.0) + 2.0),
             kMargin * (sampled_variation(0.0, g3, -6.0) + 6.0)}};
}

KernelTable::KernelTable(FlatTopSpec spec, double tol, double spacing, Eigen::VectorXd k_values,
                         Eigen::VectorXd dk_values, Eigen::VectorXd kbar_values)
    : spec_(spec),
      tol_(tol),
      spacing_(spacing),
      half_((kbar_values.size() - 1) / 2),
      k_(std::move(k_values)),
      dk_(std::move(dk_values)),
      kbar_(std::move(kbar_values)) {
    if (kbar_.size() % 2 != 1 || k_.size() != kbar_.size() || dk_.size() != kbar_.size()) {
        throw DomainError("kernel table arrays must share an odd length");
    }
    cutoff_ = spacing_ * static_cast<double>(half_);
    kbar_rect_.resize(kbar_.size());
    double running = -kInf;
    for (Eigen::Index i = 0; i < kbar_.size(); ++i) {
        running = std::max(running, kbar_[i]);
        kbar_rect_[i] = std::clamp(running, 0.0, 1.0);
    }
}

Eigen::VectorXd KernelTable::grid() const {
    return Eigen::VectorXd::LinSpaced(kbar_.size(), -cutoff_, cutoff_);
}

namespace {

double hermite(double y0, double m0, double y1, double m1, double u, double h) {
    const double u2 = u * u;
    const double u3 = u2 * u;
    return (2.0 * u3 - 3.0 * u2 + 1.0) * y0 + (u3 - 2.0 * u2 + u) * h * m0 + (-2.0 * u3 + 3.0 * u2) * y1 +
           (u3 - u2) * h * m1;
}

}  // namespace

double KernelTable::kbar(double t) const {
    if (t <= -cutoff_) return 0.0;
    if (t >= cutoff_) return 1.0;
    const double pos = t / spacing_ + static_cast<double>(half_);
    Eigen::Index i = std::min<Eigen::Index>(static_cast<Eigen::Index>(pos), kbar_.size() - 2);
    const double u = pos - static_cast<double>(i);
    return hermite(kbar_[i], k_[i], kbar_[i + 1], k_[i + 1], u, spacing_);
}

double KernelTable::density(double x) const {
    if (x <= -cutoff_ || x >= cutoff_) return 0.0;
    const double pos = x / spacing_ + static_cast<double>(half_);
    Eigen::Index i = std::min<Eigen::Index>(static_cast<Eigen::Index>(pos), k_.size() - 2);
    const double u = pos - static_cast<double>(i);
    return hermite(k_[i], dk_[i], k_[i + 1], dk_[i + 1], u, spacing_);
}

double KernelTable::kbar_rectified(double t) const {
    if (t <= -cutoff_) return 0.0;
    if (t >= cutoff_) return 1.0;
    const double pos = t / spacing_ + static_cast<double>(half_);
    Eigen::Index i = std::min<Eigen::Index>(static_cast<Eigen::Index>(pos), kbar_.size() - 2);
    const double u = pos - static_cast<double>(i);
    return (1.0 - u) * kbar_rect_[i] + u * kbar_rect_[i + 1];
}

double KernelTable::integral_of_kernel() const {
    return spacing_ * (k_.sum() - 0.5 * (k_[0] + k_[k_.size() - 1]));
}

KernelTable build_table(const FlatTopSpec& spec, double tol, const TableOptions& opts) {
    spec.validate();
    if (!(tol > 0.0)) throw DomainError("table tolerance must be positive");
    // Hermite error: h^4/384 max|f''''|. For Kbar that is max|K'''| <= 1/(4 pi),
    // for K max|K''''| <= 1/(5 pi). Half of tol goes to interpolation.
    const double h_kbar = std::pow(384.0 * 4.0 * kPi * 0.5 * tol, 0.25);
    const double h_k = std::pow(384.0 * 5.0 * kPi * 0.5 * tol, 0.25);
    const double spacing = std::min({h_kbar, h_k, 1.0});
    const double cutoff = kbar_tail_bound(spec).cutoff_for(tol);
    const double half_d = std::ceil(cutoff / spacing);
    if (!(2.0 * half_d + 1.0 <= static_cast<double>(opts.max_grid))) {
        std::ostringstream msg;
        msg << "tolerance " << tol << " needs " << 2.0 * half_d + 1.0 << " table nodes, above the limit of "
            << opts.max_grid;
        throw DomainError(msg.str());
    }
    const auto half = static_cast<Eigen::Index>(half_d);
    const Eigen::Index n = 2 * half + 1;
    Eigen::VectorXd k(n), dk(n), kbar(n);
    // Node values to a quarter of tol; K even, K' odd, Kbar(-x) = 1 - Kbar(x).
    const double node_tol = 0.25 * tol;
    for (Eigen::Index j = 0; j <= half; ++j) {
        const double x = spacing * static_cast<double>(j);
        const double kv = eval_kernel(spec, x, node_tol);
        const double dkv = eval_kernel_derivative(spec, x, node_tol);
        const double kb = eval_kbar(spec, x, node_tol);
        k[half + j] = kv;
        k[half - j] = kv;
        dk[half + j] = dkv;
        dk[half - j] = -dkv;
        kbar[half + j] = kb;
        kbar[half - j] = 1.0 - kb;
    }
    kbar[half] = 0.5;
    return KernelTable(spec, tol, spacing, std::move(k), std::move(dk), std::move(kbar));
}

double GaussianKernel::kbar(double u) const { return normal_cdf(u); }
double GaussianKernel::density(double u) const { return normal_pdf(u); }

double kernel_cross_moment(const GaussianKernel& kernel) {
    const auto f = [&](double u) { return u * kernel.kbar(u) * kernel.density(u); };
    // Beyond |u| = 40 the integrand is below 1e-340.
    return integrate_pieces(f, {-40.0, -8.0, -2.0, 0.0, 2.0, 8.0, 40.0}, quad_opts(1e-15)).value;
}

double kernel_cross_moment(const FlatTopSpec& spec) {
    spec.validate();
    // (1/2pi) [ int_c^1 (1 - kappa^2)/s^2 ds + int_1^inf s^-2 ds ]
    const auto f = [&](double s) {
        const double k = eval_kappa(spec, s);
        return (1.0 - k * k) / (s * s);
    };
    const double edge = integrate(f, spec.c, 1.0, quad_opts(1e-15)).value;
    return (edge + 1.0) / (2.0 * kPi);
}

}  // namespace flattop
