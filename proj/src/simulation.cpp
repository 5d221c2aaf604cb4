#include "flattop/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "flattop/cdf_estimators.hpp"
#include "flattop/errors.hpp"
#include "flattop/survival.hpp"

namespace flattop {

namespace {

enum Purpose : std::uint64_t { kLifetime = 1, kCensoring = 2, kPolya = 3 };

// Pairwise summation over a strided view, fixed split points.
template <class F>
double pairwise_sum(std::size_t lo, std::size_t hi, const F& term) {
    if (hi - lo <= 8) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        return s;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(lo, mid, term) + pairwise_sum(mid, hi, term);
}

// Runs body(r) for r in [0, count) on `workers` threads. Each r writes only
// its own slot, so the schedule cannot change the result.
template <class Body>
void parallel_for(int count, int workers, const Body& body) {
    workers = std::max(1, std::min(workers, count));
    if (workers == 1) {
        for (int r = 0; r < count; ++r) body(r);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const int r = next.fetch_add(1);
                if (r >= count) return;
                try {
                    body(r);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next.store(count);
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

// Shortest representation that round-trips.
std::string fmt_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double sample_scale(const Eigen::VectorXd& x) {
    const double mean = x.mean();
    const double sd = x.size() > 1 ? std::sqrt((x.array() - mean).square().sum() / static_cast<double>(x.size() - 1)) : 0.0;
    return sd > 0.0 ? sd : 1.0;
}

double median_of(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

struct Replicate {
    std::vector<double> errors;      // estimator-major, then eval point
    std::vector<double> bandwidths;  // per estimator, NaN for the step estimator
    long long violations = 0;
    int retries = 0;
};

struct Kernels {
    std::optional<KernelTable> trapezoid;
    std::optional<KernelTable> smooth;
    GaussianKernel gaussian;
};

// Values at the eval points; standardized paths are checked for range and
// monotonicity along the way.
template <IntegratedKernel Kernel>
Eigen::VectorXd smoothed_values(const StepEstimate& jumps, const EstimatorConfig<Kernel>& cfg,
                                const Eigen::VectorXd& eval_points, long long& violations) {
    Eigen::VectorXd path;
    const Eigen::VectorXd out = smoothed_cdf_at(jumps, cfg, eval_points, &path);
    for (Eigen::Index i = 0; i < path.size(); ++i) {
        if (path[i] < 0.0 || path[i] > 1.0 || (i > 0 && path[i] < path[i - 1])) ++violations;
    }
    return out;
}

}  // namespace

Scenario Scenario::normal_iid() {
    Scenario s;
    s.name = "normal-iid";
    s.lifetime = Distribution::normal();
    s.eval_points = Eigen::Vector3d(-1.5, 0.0, 1.5);
    s.sample_sizes = {15, 30};
    s.bw_C = 1.25;
    return s;
}

Scenario Scenario::weibull_censored() {
    Scenario s;
    s.name = "weibull-censored";
    s.lifetime = Distribution::weibull(3.0, 1.5);
    s.censoring = Distribution::weibull(4.0, 3.0);
    s.boundary = 0.0;
    s.eval_points = Eigen::Vector3d(0.75, 1.25, 1.75);
    s.sample_sizes = {15, 30};
    return s;
}

Scenario Scenario::polya_bandlimited() {
    Scenario s;
    s.name = "polya-bandlimited";
    s.lifetime = Distribution::polya();
    s.eval_points = Eigen::Vector3d(0.0, 2.0, 5.0);
    s.sample_sizes = {200};
    return s;
}

Scenario Scenario::by_name(const std::string& name) {
    if (name == "normal-iid") return normal_iid();
    if (name == "weibull-censored") return weibull_censored();
    if (name == "polya-bandlimited") return polya_bandlimited();
    throw DomainError("unknown scenario '" + name + "' (expected normal-iid, weibull-censored or polya-bandlimited)");
}

void Scenario::validate() const {
    lifetime.validate();
    if (censoring) censoring->validate();
    if (eval_points.size() == 0) throw DomainError("scenario needs at least one evaluation point");
    if (!eval_points.allFinite()) throw DomainError("evaluation points must be finite");
    if (sample_sizes.empty()) throw DomainError("scenario needs at least one sample size");
    for (int n : sample_sizes) {
        if (n < 2) throw DomainError("sample sizes must be at least 2");
    }
    if (replications < 1) throw DomainError("replications must be at least 1");
    if (boundary && !std::isfinite(*boundary)) throw DomainError("boundary must be finite");
    if (!(bw_C > 0.0)) throw DomainError("bandwidth constant C must be positive");
}

std::string EstimatorSpec::name(bool censored) const {
    std::string base;
    switch (kind) {
        case EstimatorKind::Step: return censored ? "km" : "edf";
        case EstimatorKind::GaussianCv: base = "gauss-cv"; break;
        case EstimatorKind::Trapezoid: base = "trapezoid"; break;
        case EstimatorKind::SmoothTrapezoid: base = "smooth"; break;
    }
    return standardized ? base + "-std" : base;
}

EstimatorSpec EstimatorSpec::parse(const std::string& name) {
    std::string base = name;
    EstimatorSpec spec;
    if (base.size() > 4 && base.compare(base.size() - 4, 4, "-std") == 0) {
        spec.standardized = true;
        base.resize(base.size() - 4);
    }
    if (base == "edf" || base == "km") {
        if (spec.standardized) throw DomainError("the step estimator has no standardized variant");
        spec.kind = EstimatorKind::Step;
    } else if (base == "gauss-cv") {
        spec.kind = EstimatorKind::GaussianCv;
    } else if (base == "trapezoid") {
        spec.kind = EstimatorKind::Trapezoid;
    } else if (base == "smooth") {
        spec.kind = EstimatorKind::SmoothTrapezoid;
    } else {
        throw DomainError("unknown estimator '" + name + "'");
    }
    return spec;
}

std::vector<EstimatorSpec> default_estimators() {
    std::vector<EstimatorSpec> out{{EstimatorKind::Step, false}};
    for (auto kind : {EstimatorKind::GaussianCv, EstimatorKind::Trapezoid, EstimatorKind::SmoothTrapezoid}) {
        out.push_back({kind, false});
        out.push_back({kind, true});
    }
    return out;
}

void HarnessOptions::validate() const {
    if (!(trapezoid_c > 0.0 && trapezoid_c < 1.0)) throw DomainError("trapezoid c must lie in (0, 1)");
    if (!(table_tol > 0.0)) throw DomainError("table tolerance must be positive");
    if (bw_C && !(*bw_C > 0.0)) throw DomainError("bandwidth constant C must be positive");
    if (bw_epsilon && !(*bw_epsilon > 0.0)) throw DomainError("bandwidth epsilon must be positive");
    if (freq_points < 2) throw DomainError("need at least two ECF frequencies");
    if (cv_grid_points < 1) throw DomainError("need at least one cross-validation bandwidth");
    if (workers < 1) throw DomainError("workers must be at least 1");
    if (max_retries < 0) throw DomainError("max_retries must be nonnegative");
}

const MseCell& MseReport::cell(const std::string& estimator, double t, int n) const {
    for (const auto& c : cells) {
        if (c.estimator == estimator && c.t == t && c.n == n) return c;
    }
    throw DomainError("no report cell for " + estimator + " at t=" + fmt_double(t) + ", n=" + std::to_string(n));
}

std::string MseReport::to_csv() const {
    std::string out = "estimator,t,n,mse,bias,var,se,reps\n";
    for (const auto& c : cells) {
        out += c.estimator + "," + fmt_double(c.t) + "," + std::to_string(c.n) + "," + fmt_double(c.mse) + "," + fmt_double(c.bias) +
               "," + fmt_double(c.var) + "," + fmt_double(c.se) + "," + std::to_string(c.reps) + "\n";
    }
    return out;
}

std::string MseReport::to_json() const {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["scenario"] = scenario;
    j["seed"] = seed;
    j["retries"] = retries;
    j["shape_violations"] = shape_violations;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& c : cells) {
        rows.push_back({{"estimator", c.estimator}, {"t", c.t}, {"n", c.n}, {"mse", c.mse}, {"bias", c.bias},
                        {"var", c.var}, {"se", c.se}, {"reps", c.reps}});
    }
    j["cells"] = rows;
    nlohmann::ordered_json bw = nlohmann::ordered_json::array();
    for (double v : median_bandwidth) bw.push_back(std::isnan(v) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(v));
    j["median_bandwidth"] = bw;
    return j.dump(2);
}

MseReport run_scenario(const Scenario& scenario, const std::vector<EstimatorSpec>& estimators,
                       const HarnessOptions& options) {
    scenario.validate();
    options.validate();
    if (estimators.empty()) throw DomainError("no estimators requested");

    Kernels kernels;
    for (const auto& e : estimators) {
        if (e.kind == EstimatorKind::Trapezoid && !kernels.trapezoid) {
            kernels.trapezoid = build_table(FlatTopSpec::trapezoid(options.trapezoid_c), options.table_tol);
        }
        if (e.kind == EstimatorKind::SmoothTrapezoid && !kernels.smooth) {
            kernels.smooth = build_table(FlatTopSpec::smooth_trapezoid(1.0, 0.05), options.table_tol);
        }
    }

    const bool censored = scenario.censored();
    const Eigen::VectorXd& pts = scenario.eval_points;
    const auto T = static_cast<std::size_t>(pts.size());
    const std::size_t E = estimators.size();
    const int R = scenario.replications;

    MseReport report;
    report.scenario = scenario.name;
    report.seed = scenario.seed;

    for (int n : scenario.sample_sizes) {
        std::vector<Replicate> reps(static_cast<std::size_t>(R));

        parallel_for(R, options.workers, [&](int r) {
            Replicate& out = reps[static_cast<std::size_t>(r)];
            out.errors.assign(E * T, 0.0);
            out.bandwidths.assign(E, std::numeric_limits<double>::quiet_NaN());
            const std::uint64_t rep_key = (static_cast<std::uint64_t>(n) << 32) | static_cast<std::uint64_t>(r);
            for (int attempt = 0;; ++attempt) {
                Stream life(scenario.seed, rep_key, kLifetime + 16u * static_cast<std::uint64_t>(attempt));
                Eigen::VectorXd x = sample_distribution(scenario.lifetime, n, life);
                CensoredSample sample = CensoredSample::iid(x);
                if (censored) {
                    Stream cens(scenario.seed, rep_key, kCensoring + 16u * static_cast<std::uint64_t>(attempt));
                    const Eigen::VectorXd c = sample_distribution(*scenario.censoring, n, cens);
                    sample = CensoredSample::censored(x.cwiseMin(c), (x.array() <= c.array()));
                }
                if (!sample.any_event()) {
                    if (attempt >= options.max_retries) throw DomainError("every draw was censored; retries exhausted");
                    ++out.retries;
                    continue;
                }
                const StepEstimate jumps = censored ? kaplan_meier(sample) : edf(sample);

                // Flat-top bandwidths first; a selector failure redraws the sample.
                std::optional<double> h_trap, h_smooth;
                try {
                    const EcfCurve curve = ecf(jumps, n, default_frequency_grid(sample, options.freq_points));
                    for (const auto& e : estimators) {
                        if (e.kind != EstimatorKind::Trapezoid && e.kind != EstimatorKind::SmoothTrapezoid) continue;
                        auto& slot = e.kind == EstimatorKind::Trapezoid ? h_trap : h_smooth;
                        if (slot) continue;
                        const double eff = e.kind == EstimatorKind::Trapezoid ? kernels.trapezoid->spec().effective_c
                                                                              : kernels.smooth->spec().effective_c;
                        BandwidthRule rule = BandwidthRule::defaults(n, eff, options.bw_mode);
                        rule.C = options.bw_C.value_or(scenario.bw_C);
                        if (options.bw_epsilon) rule.epsilon = *options.bw_epsilon;
                        slot = select_bandwidth(curve, rule).bandwidth;
                    }
                } catch (const NoPlateauError&) {
                    if (attempt >= options.max_retries) throw;
                    ++out.retries;
                    continue;
                }
                std::optional<double> h_cv;

                for (std::size_t e = 0; e < E; ++e) {
                    const EstimatorSpec& spec = estimators[e];
                    Eigen::VectorXd values(pts.size());
                    switch (spec.kind) {
                        case EstimatorKind::Step:
                            for (Eigen::Index k = 0; k < pts.size(); ++k) values[k] = jumps.cumulative(pts[k]);
                            break;
                        case EstimatorKind::GaussianCv: {
                            if (!h_cv) {
                                const double s = sample_scale(sample.times);
                                h_cv = cv_bandwidth_gaussian(
                                    jumps, log_spaced_grid(0.02 * s, 2.0 * s, options.cv_grid_points));
                            }
                            out.bandwidths[e] = *h_cv;
                            EstimatorConfig<GaussianKernel> cfg{&kernels.gaussian, *h_cv, scenario.boundary,
                                                                spec.standardized};
                            values = smoothed_values(jumps, cfg, pts, out.violations);
                            break;
                        }
                        case EstimatorKind::Trapezoid:
                        case EstimatorKind::SmoothTrapezoid: {
                            const bool trap = spec.kind == EstimatorKind::Trapezoid;
                            const double h = trap ? *h_trap : *h_smooth;
                            out.bandwidths[e] = h;
                            EstimatorConfig<KernelTable> cfg{trap ? &*kernels.trapezoid : &*kernels.smooth, h,
                                                             scenario.boundary, spec.standardized};
                            values = smoothed_values(jumps, cfg, pts, out.violations);
                            break;
                        }
                    }
                    for (std::size_t k = 0; k < T; ++k) {
                        const double truth = scenario.lifetime.cdf(pts[static_cast<Eigen::Index>(k)]);
                        out.errors[e * T + k] = values[static_cast<Eigen::Index>(k)] - truth;
                    }
                }
                break;
            }
        });

        int retries = 0;
        for (const auto& rep : reps) {
            retries += rep.retries;
            report.shape_violations += rep.violations;
        }
        report.retries.push_back(retries);

        const auto RR = static_cast<std::size_t>(R);
        const double dR = static_cast<double>(R);
        for (std::size_t e = 0; e < E; ++e) {
            std::vector<double> hs;
            for (const auto& rep : reps) {
                if (!std::isnan(rep.bandwidths[e])) hs.push_back(rep.bandwidths[e]);
            }
            report.median_bandwidth.push_back(median_of(hs));
            for (std::size_t k = 0; k < T; ++k) {
                const std::size_t idx = e * T + k;
                const auto err = [&](std::size_t i) { return reps[i].errors[idx]; };
                MseCell cell;
                cell.estimator = estimators[e].name(censored);
                cell.t = pts[static_cast<Eigen::Index>(k)];
                cell.n = n;
                cell.reps = R;
                cell.bias = pairwise_sum(0, RR, err) / dR;
                cell.mse = pairwise_sum(0, RR, [&](std::size_t i) { return err(i) * err(i); }) / dR;
                cell.var = pairwise_sum(0, RR, [&](std::size_t i) {
                               const double d = err(i) - cell.bias;
                               return d * d;
                           }) / dR;
                cell.se = R > 1 ? std::sqrt(pairwise_sum(0, RR,
                                                         [&](std::size_t i) {
                                                             const double d = err(i) * err(i) - cell.mse;
                                                             return d * d;
                                                         }) /
                                            (dR - 1.0) / dR)
                                : std::numeric_limits<double>::quiet_NaN();
                report.cells.push_back(cell);
            }
        }
    }
    return report;
}

std::string ZeroBiasReport::to_json() const {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["n"] = n;
    j["h"] = h;
    j["reps"] = reps;
    j["seed"] = seed;
    j["se_defined"] = se_defined;
    if (!note.empty()) j["note"] = note;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (Eigen::Index k = 0; k < eval_points.size(); ++k) {
        rows.push_back({{"t", eval_points[k]},
                        {"bias", bias[k]},
                        {"se", se_defined ? nlohmann::ordered_json(se[k]) : nlohmann::ordered_json(nullptr)}});
    }
    j["points"] = rows;
    return j.dump(2);
}

ZeroBiasReport zero_bias_experiment(int n, double h, int reps, std::uint64_t seed, const Eigen::VectorXd& eval_points,
                                    int workers) {
    if (n < 1) throw DomainError("zero-bias experiment needs n >= 1");
    if (!(h > 0.0)) throw DomainError("zero-bias experiment needs h > 0");
    if (reps < 1) throw DomainError("zero-bias experiment needs reps >= 1");
    if (eval_points.size() == 0) throw DomainError("zero-bias experiment needs evaluation points");
    if (workers < 1) throw DomainError("workers must be at least 1");

    // Closed form, so no table interpolation error enters the bias.
    struct TrapezoidClosedForm {
        double c;
        double kbar(double u) const { return trapezoid_kbar(c, u); }
        double density(double u) const { return trapezoid_kernel(c, u); }
    } kernel{0.75};
    const Distribution polya = Distribution::polya();
    const auto T = eval_points.size();
    std::vector<Eigen::VectorXd> errors(static_cast<std::size_t>(reps));

    parallel_for(reps, workers, [&](int r) {
        Stream stream(seed, static_cast<std::uint64_t>(r), kPolya);
        const StepEstimate jumps = edf(CensoredSample::iid(sample_distribution(polya, n, stream)));
        EstimatorConfig<TrapezoidClosedForm> cfg{&kernel, h, std::nullopt, false};
        Eigen::VectorXd e(T);
        for (Eigen::Index k = 0; k < T; ++k) e[k] = smoothed_cdf_raw(jumps, cfg, eval_points[k]) - polya.cdf(eval_points[k]);
        errors[static_cast<std::size_t>(r)] = e;
    });

    ZeroBiasReport out;
    out.n = n;
    out.h = h;
    out.reps = reps;
    out.seed = seed;
    out.eval_points = eval_points;
    out.bias.resize(T);
    out.se.resize(T);
    out.se_defined = reps >= 2;
    if (!out.se_defined) out.note = "insufficient replications: the standard error needs reps >= 2";
    const auto RR = static_cast<std::size_t>(reps);
    for (Eigen::Index k = 0; k < T; ++k) {
        const double mean = pairwise_sum(0, RR, [&](std::size_t i) { return errors[i][k]; }) / reps;
        out.bias[k] = mean;
        if (out.se_defined) {
            const double ss = pairwise_sum(0, RR, [&](std::size_t i) {
                const double d = errors[i][k] - mean;
                return d * d;
            });
            out.se[k] = std::sqrt(ss / (reps - 1.0) / reps);
        } else {
            out.se[k] = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return out;
}

}  // namespace flattop
