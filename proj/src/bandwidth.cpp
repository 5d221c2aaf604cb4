#include "flattop/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "flattop/errors.hpp"
#include "flattop/special_functions.hpp"
#include "flattop/survival.hpp"

namespace flattop {

namespace {

EcfCurve weighted_ecf(const Eigen::VectorXd& locs, const Eigen::VectorXd& weights, Eigen::Index n,
                      const Eigen::VectorXd& freqs) {
    if (locs.size() == 0) throw DomainError("ECF of an empty sample");
    for (Eigen::Index k = 0; k < freqs.size(); ++k) {
        if (!(freqs[k] >= 0.0) || (k > 0 && freqs[k] < freqs[k - 1])) {
            throw DomainError("ECF frequencies must be nonnegative and ascending");
        }
    }
    EcfCurve curve{freqs, Eigen::VectorXd(freqs.size()), n};
    for (Eigen::Index k = 0; k < freqs.size(); ++k) {
        double re = 0.0, im = 0.0;
        for (Eigen::Index j = 0; j < locs.size(); ++j) {
            const double arg = freqs[k] * locs[j];
            re += weights[j] * std::cos(arg);
            im += weights[j] * std::sin(arg);
        }
        curve.magnitudes[k] = std::hypot(re, im);
    }
    return curve;
}

double quantile_sorted(const std::vector<double>& v, double p) {
    const double pos = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

EcfCurve ecf(const CensoredSample& sample, const Eigen::VectorXd& freqs) {
    sample.validate();
    if (sample.all_events()) {
        const Eigen::VectorXd w = Eigen::VectorXd::Constant(sample.size(), 1.0 / static_cast<double>(sample.size()));
        return weighted_ecf(sample.times, w, sample.size(), freqs);
    }
    return ecf(kaplan_meier(sample), sample.size(), freqs);
}

EcfCurve ecf(const StepEstimate& jumps, Eigen::Index n, const Eigen::VectorXd& freqs) {
    return weighted_ecf(jumps.jump_locations, jumps.jump_heights, n, freqs);
}

std::string to_string(BandwidthMode mode) { return mode == BandwidthMode::Threshold ? "threshold" : "plateau"; }

BandwidthMode parse_bandwidth_mode(const std::string& name) {
    if (name == "threshold") return BandwidthMode::Threshold;
    if (name == "plateau") return BandwidthMode::Plateau;
    throw DomainError("unknown bandwidth mode '" + name + "' (expected threshold or plateau)");
}

BandwidthRule BandwidthRule::defaults(Eigen::Index n, double effective_c, BandwidthMode mode) {
    BandwidthRule r;
    r.C = 2.0;
    r.epsilon = std::max(1.0, std::log10(static_cast<double>(n)));
    r.effective_c = effective_c;
    r.mode = mode;
    return r;
}

double BandwidthRule::threshold(Eigen::Index n) const {
    const double nn = static_cast<double>(n);
    return C * std::sqrt(std::log10(nn) / nn);
}

void BandwidthRule::validate() const {
    if (!(C > 0.0)) throw DomainError("bandwidth rule needs C > 0");
    if (!(epsilon > 0.0)) throw DomainError("bandwidth rule needs epsilon > 0");
    if (!(effective_c > 0.0)) throw DomainError("bandwidth rule needs a positive flat-top radius");
}

BandwidthSelection select_bandwidth(const EcfCurve& curve, const BandwidthRule& rule) {
    rule.validate();
    if (curve.n < 1) throw DomainError("ECF curve has no sample size");
    const Eigen::VectorXd& f = curve.freqs;
    const Eigen::VectorXd& m = curve.magnitudes;
    const Eigen::Index size = f.size();
    const double thr = rule.threshold(curve.n);
    const double eps = rule.epsilon;
    auto no_plateau = [&]() {
        std::ostringstream msg;
        msg << to_string(rule.mode) << " criterion (threshold " << thr << ", epsilon " << eps
            << ") never triggered on frequencies up to " << (size ? f[size - 1] : 0.0)
            << "; extend the frequency range";
        return NoPlateauError(msg.str());
    };

    if (rule.mode == BandwidthMode::Threshold) {
        // above_before[k] = number of grid points with index < k at or above the threshold.
        std::vector<Eigen::Index> above_before(static_cast<std::size_t>(size) + 1, 0);
        for (Eigen::Index k = 0; k < size; ++k) {
            above_before[k + 1] = above_before[k] + (m[k] >= thr ? 1 : 0);
        }
        Eigen::Index end = 0;  // first index with f >= f_j + eps
        for (Eigen::Index j = 0; j < size; ++j) {
            if (!(f[j] > 0.0)) continue;
            if (f[j] + eps > f[size - 1]) break;
            end = std::max(end, j + 1);
            while (end < size && f[end] < f[j] + eps) ++end;
            Eigen::Index first = j + 1;
            while (first < end && !(f[first] > f[j])) ++first;
            if (above_before[end] - above_before[first] == 0) return {rule.effective_c / f[j], f[j], thr};
        }
        throw no_plateau();
    }

    const double tol = thr / eps;
    bool descending = false;
    Eigen::Index end = 0;  // one past the last index with f <= f_j + eps
    for (Eigen::Index j = 0; j < size; ++j) {
        if (f[j] + eps > f[size - 1]) break;
        end = std::max(end, j + 1);
        while (end < size && f[end] <= f[j] + eps) ++end;
        const Eigen::Index count = end - j;
        if (count < 2) continue;
        const auto xs = f.segment(j, count).array();
        const auto ys = m.segment(j, count).array();
        const double xm = xs.mean();
        const double ym = ys.mean();
        const double sxx = (xs - xm).square().sum();
        const double slope = sxx > 0.0 ? ((xs - xm) * (ys - ym)).sum() / sxx : 0.0;
        if (!descending) {
            descending = slope <= -tol;
            continue;
        }
        if (f[j] > 0.0 && std::abs(slope) < tol) return {rule.effective_c / f[j], f[j], thr};
    }
    throw no_plateau();
}

Eigen::VectorXd default_frequency_grid(const CensoredSample& sample, Eigen::Index points) {
    sample.validate();
    if (points < 2) throw DomainError("frequency grid needs at least two points");
    std::vector<double> v(sample.times.data(), sample.times.data() + sample.size());
    std::sort(v.begin(), v.end());
    double scale = (quantile_sorted(v, 0.75) - quantile_sorted(v, 0.25)) / 1.349;
    if (!(scale > 0.0)) {
        const double mean = sample.times.mean();
        scale = v.size() > 1 ? std::sqrt((sample.times.array() - mean).square().sum() / static_cast<double>(v.size() - 1))
                             : 0.0;
    }
    if (!(scale > 0.0)) scale = 1.0;
    return Eigen::VectorXd::LinSpaced(points, 0.0, 4.0 * kPi / scale);
}

Eigen::VectorXd log_spaced_grid(double lo, double hi, Eigen::Index count) {
    if (!(lo > 0.0 && hi >= lo && count >= 1)) throw DomainError("log-spaced grid needs 0 < lo <= hi and count >= 1");
    if (count == 1) return Eigen::VectorXd::Constant(1, lo);
    return Eigen::VectorXd::LinSpaced(count, std::log(lo), std::log(hi)).array().exp();
}

namespace {

struct CvUnits {
    Eigen::VectorXd locs;
    Eigen::VectorXd weights;
};

double cv_objective(const CvUnits& units, double h, int quad_points) {
    const Eigen::Index m = units.locs.size();
    const double total = units.weights.sum();
    const double lo = units.locs.minCoeff() - 3.0 * h;
    const double hi = units.locs.maxCoeff() + 3.0 * h;
    const Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(quad_points, lo, hi);
    Eigen::VectorXd qw = Eigen::VectorXd::Constant(quad_points, (hi - lo) / (quad_points - 1));
    qw[0] *= 0.5;
    qw[quad_points - 1] *= 0.5;

    Eigen::MatrixXd phi(quad_points, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index g = 0; g < quad_points; ++g) phi(g, j) = normal_cdf((t[g] - units.locs[j]) / h);
    }
    const Eigen::VectorXd all = phi * units.weights;
    double cv = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        const double wi = units.weights[i];
        const double rest = total - wi;
        if (!(rest > 0.0)) throw DomainError("cross-validation needs at least two weighted observations");
        const Eigen::ArrayXd loo = (all - wi * phi.col(i)).array() / rest;
        const Eigen::ArrayXd indicator = (t.array() >= units.locs[i]).cast<double>();
        cv += wi / total * ((indicator - loo).square() * qw.array()).sum();
    }
    return cv;
}

double cv_argmin(const CvUnits& units, const Eigen::VectorXd& h_grid, int quad_points) {
    if (h_grid.size() == 0) throw DomainError("cross-validation bandwidth grid is empty");
    if (quad_points < 2) throw DomainError("cross-validation needs at least two quadrature nodes");
    double best_h = h_grid[0];
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < h_grid.size(); ++k) {
        if (!(h_grid[k] > 0.0)) throw DomainError("cross-validation bandwidths must be positive");
        const double v = cv_objective(units, h_grid[k], quad_points);
        if (v < best) {
            best = v;
            best_h = h_grid[k];
        }
    }
    return best_h;
}

}  // namespace

double cv_objective_gaussian(const StepEstimate& jumps, double h, int quad_points) {
    return cv_objective({jumps.jump_locations, jumps.jump_heights}, h, quad_points);
}

double cv_bandwidth_gaussian(const CensoredSample& sample, const Eigen::VectorXd& h_grid, int quad_points) {
    sample.validate();
    if (!sample.all_events()) return cv_bandwidth_gaussian(kaplan_meier(sample), h_grid, quad_points);
    const Eigen::VectorXd w = Eigen::VectorXd::Constant(sample.size(), 1.0 / static_cast<double>(sample.size()));
    return cv_argmin({sample.times, w}, h_grid, quad_points);
}

double cv_bandwidth_gaussian(const StepEstimate& jumps, const Eigen::VectorXd& h_grid, int quad_points) {
    return cv_argmin({jumps.jump_locations, jumps.jump_heights}, h_grid, quad_points);
}

}  // namespace flattop
