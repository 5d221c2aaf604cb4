#pragma once

#include <Eigen/Dense>
#include <array>
#include <concepts>
#include <optional>
#include <string>

namespace flattop {

enum class FlatTopFamily { Trapezoid, SmoothTrapezoid };

std::string to_string(FlatTopFamily family);
FlatTopFamily parse_family(const std::string& name);

/// Flat-top function kappa: identically 1 on [-c, c], supported on [-1, 1],
/// completed by a trapezoid edge or by the infinitely smooth double
/// exponential edge controlled by b.
struct FlatTopSpec {
    FlatTopFamily family = FlatTopFamily::Trapezoid;
    double c = 0.75;
    double b = 0.0;            // SmoothTrapezoid only
    double effective_c = 0.75;  // radius used by the bandwidth rule h = effective_c / t*

    static FlatTopSpec trapezoid(double c);
    /// effective_c defaults to 0.5 for (b, c) = (1, 0.05) and to c otherwise.
    static FlatTopSpec smooth_trapezoid(double b, double c, std::optional<double> effective_c = std::nullopt);

    /// Throws DomainError unless 0 < c < 1, b > 0 for the smooth family and
    /// c <= effective_c <= 1 (equality for the trapezoid).
    void validate() const;

    bool operator==(const FlatTopSpec&) const = default;
};

double eval_kappa(const FlatTopSpec& spec, double s);

/// K(x) = (1/pi) int_0^1 kappa(s) cos(sx) ds. Closed form for the trapezoid,
/// adaptive quadrature to abs_tol for the smooth family.
double eval_kernel(const FlatTopSpec& spec, double x, double abs_tol = 1e-13);

/// Kbar(t) = 1/2 + (1/pi) int_0^1 kappa(s) sin(st)/s ds.
double eval_kbar(const FlatTopSpec& spec, double t, double abs_tol = 1e-13);

/// dK/dx, needed for Hermite interpolation of K on tables.
double eval_kernel_derivative(const FlatTopSpec& spec, double x, double abs_tol = 1e-13);

/// Trapezoid closed forms, valid for c in [0, 1). With c = 0 the kernel is
/// the Fejer density (1 - cos x)/(pi x^2) whose characteristic function is
/// the triangle (1 - |s|)^+.
double trapezoid_kernel(double c, double x);
double trapezoid_kbar(double c, double t);
double trapezoid_kernel_derivative(double c, double x);

/// Tail bound |Kbar(t) - 1| <= V_k / (pi t^k) for t > 0 (mirror image for
/// t < 0), from k-fold integration by parts of int g(s) sin(st) ds with
/// g(s) = (1 - kappa(s))/s, so V_k is the total variation of g^(k-1).
/// Orders 2..4 are tracked; an order whose derivative has jumps is +inf.
struct TailBound {
    std::array<double, 3> constants{};  // V_2, V_3, V_4

    double bound_at(double t) const;
    /// Smallest T over the tracked orders with bound_at(T) <= tol.
    double cutoff_for(double tol) const;
};
TailBound kbar_tail_bound(const FlatTopSpec& spec);

/// Tabulated K and Kbar on a symmetric uniform grid x_j = j * spacing,
/// |j| <= N, with cubic Hermite interpolation in between. Outside
/// [-T, T] Kbar is 0 (left) or 1 (right) and K is 0. Immutable.
class KernelTable {
public:
    KernelTable() = default;
    KernelTable(FlatTopSpec spec, double tol, double spacing, Eigen::VectorXd k_values, Eigen::VectorXd dk_values,
                Eigen::VectorXd kbar_values);

    const FlatTopSpec& spec() const { return spec_; }
    double tol() const { return tol_; }
    double spacing() const { return spacing_; }
    double tail_cutoff() const { return cutoff_; }
    Eigen::Index size() const { return kbar_.size(); }

    Eigen::VectorXd grid() const;
    const Eigen::VectorXd& k_values() const { return k_; }
    const Eigen::VectorXd& dk_values() const { return dk_; }
    /// Raw Kbar node values; these drive the estimators.
    const Eigen::VectorXd& kbar_values() const { return kbar_; }
    /// Running maximum of the raw values clipped to [0, 1].
    const Eigen::VectorXd& kbar_rectified_values() const { return kbar_rect_; }

    double kbar(double t) const;
    double density(double x) const;
    double kbar_rectified(double t) const;

    /// Trapezoidal sum of the K node values; exact for the full lattice by
    /// Poisson summation since K is band-limited to [-1, 1].
    double integral_of_kernel() const;

private:
    FlatTopSpec spec_;
    double tol_ = 0.0;
    double spacing_ = 1.0;
    double cutoff_ = 0.0;
    Eigen::Index half_ = 0;
    Eigen::VectorXd k_, dk_, kbar_, kbar_rect_;
};

struct TableOptions {
    Eigen::Index max_grid = 4'000'000;
};

/// Throws DomainError when tol needs more than opts.max_grid nodes.
KernelTable build_table(const FlatTopSpec& spec, double tol, const TableOptions& opts = {});

/// Gaussian comparator kernel: K = phi, Kbar = Phi.
struct GaussianKernel {
    double kbar(double u) const;
    double density(double u) const;
};

/// Non-owning view that smooths with the rectified Kbar of a table.
struct RectifiedKernelView {
    const KernelTable* table;
    double kbar(double u) const { return table->kbar_rectified(u); }
    double density(double u) const { return table->density(u); }
};

template <class K>
concept IntegratedKernel = requires(const K& k, double u) {
    { k.kbar(u) } -> std::convertible_to<double>;
    { k.density(u) } -> std::convertible_to<double>;
};

/// int u Kbar(u) K(u) du, the constant of the second-order variance term.
/// Gaussian: adaptive quadrature over [-40, 40]. Flat-top: the spectral
/// form (1/2pi) int_0^inf (1 - kappa(s)^2)/s^2 ds, which is absolutely
/// convergent, while the spatial integrand decays only like 1/u for
/// the trapezoid.
double kernel_cross_moment(const GaussianKernel& kernel);
double kernel_cross_moment(const FlatTopSpec& spec);
inline double kernel_cross_moment(const KernelTable& table) { return kernel_cross_moment(table.spec()); }

}  // namespace flattop
