#include "flattop/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "flattop/asymptotics.hpp"
#include "flattop/bandwidth.hpp"
#include "flattop/cdf_estimators.hpp"
#include "flattop/errors.hpp"
#include "flattop/io.hpp"
#include "flattop/kernels.hpp"
#include "flattop/simulation.hpp"
#include "flattop/survival.hpp"

namespace flattop::cli {

namespace {

using json = nlohmann::ordered_json;

// Shortest representation that round-trips.
std::string num(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

struct KernelOpts {
    std::string kernel = "trapezoid";
    std::optional<double> c;
    std::optional<double> b;
    std::optional<double> effective_c;
    double table_tol = 1e-6;
    std::optional<std::string> cache;
};

struct BandwidthOpts {
    std::string bandwidth = "auto";
    std::optional<double> C;
    std::optional<double> eps;
    std::string mode = "threshold";
    int freq_points = 512;
    int cv_points = 40;
};

void add_kernel_flags(CLI::App* app, KernelOpts& o) {
    app->add_option("--kernel", o.kernel, "trapezoid | smooth | gaussian")->capture_default_str();
    app->add_option("--c", o.c, "flat-top radius (trapezoid 0.75, smooth 0.05)");
    app->add_option("--b", o.b, "smooth edge parameter (default 1)");
    app->add_option("--effective-c", o.effective_c, "radius used by the bandwidth rule");
    app->add_option("--table-tol", o.table_tol, "kernel table tolerance")->capture_default_str();
    app->add_option("--table-cache", o.cache, "JSON file caching kernel tables");
}

void add_bandwidth_flags(CLI::App* app, BandwidthOpts& o) {
    app->add_option("--bandwidth", o.bandwidth, "auto | cv | <value>")->capture_default_str();
    app->add_option("--bw-C", o.C, "threshold constant C (default 2)");
    app->add_option("--bw-eps", o.eps, "window length epsilon (default max(1, log10 n))");
    app->add_option("--bw-mode", o.mode, "threshold | plateau")->capture_default_str();
    app->add_option("--freq-points", o.freq_points, "ECF frequency grid size")->capture_default_str();
    app->add_option("--cv-points", o.cv_points, "cross-validation bandwidth grid size")->capture_default_str();
}

struct ResolvedKernel {
    bool gaussian = false;
    FlatTopSpec spec;
    std::optional<KernelTable> table;
    GaussianKernel gauss;

    json describe(double tol) const {
        if (gaussian) return {{"family", "gaussian"}};
        return {{"family", to_string(spec.family)},
                {"c", spec.c},
                {"b", spec.b},
                {"effective_c", spec.effective_c},
                {"table_tol", tol}};
    }
};

ResolvedKernel resolve_kernel(const KernelOpts& o) {
    ResolvedKernel k;
    if (o.kernel == "gaussian") {
        k.gaussian = true;
        return k;
    }
    const FlatTopFamily family = parse_family(o.kernel);
    if (family == FlatTopFamily::Trapezoid) {
        if (o.b) throw DomainError("--b applies to the smooth family only");
        k.spec = FlatTopSpec::trapezoid(o.c.value_or(0.75));
        if (o.effective_c && *o.effective_c != k.spec.c) {
            throw DomainError("the trapezoid's effective radius is its c");
        }
    } else {
        k.spec = FlatTopSpec::smooth_trapezoid(o.b.value_or(1.0), o.c.value_or(0.05), o.effective_c);
    }
    k.table = cached_table(k.spec, o.table_tol, o.cache);
    return k;
}

struct ResolvedBandwidth {
    double h = 0.0;
    json info;
};

ResolvedBandwidth resolve_bandwidth(const CensoredSample& sample, const StepEstimate& jumps, const ResolvedKernel& k,
                                    const BandwidthOpts& o) {
    ResolvedBandwidth r;
    const auto n = sample.size();
    if (o.bandwidth == "cv" || (o.bandwidth == "auto" && k.gaussian)) {
        if (!k.gaussian) throw DomainError("--bandwidth cv is the Gaussian comparator's rule; use --kernel gaussian");
        if (o.cv_points < 1) throw DomainError("--cv-points must be positive");
        const double mean = sample.times.mean();
        double sd = n > 1 ? std::sqrt((sample.times.array() - mean).square().sum() / static_cast<double>(n - 1)) : 0.0;
        if (!(sd > 0.0)) sd = 1.0;
        const Eigen::VectorXd grid = log_spaced_grid(0.02 * sd, 2.0 * sd, o.cv_points);
        r.h = cv_bandwidth_gaussian(jumps, grid);
        r.info = {{"method", "cv"}, {"h_min", grid[0]}, {"h_max", grid[grid.size() - 1]}, {"cv_points", o.cv_points}};
        return r;
    }
    if (o.bandwidth == "auto") {
        BandwidthRule rule = BandwidthRule::defaults(n, k.spec.effective_c, parse_bandwidth_mode(o.mode));
        if (o.C) rule.C = *o.C;
        if (o.eps) rule.epsilon = *o.eps;
        const EcfCurve curve = ecf(jumps, n, default_frequency_grid(sample, o.freq_points));
        const BandwidthSelection sel = select_bandwidth(curve, rule);
        r.h = sel.bandwidth;
        r.info = {{"method", "auto"},
                  {"mode", to_string(rule.mode)},
                  {"C", rule.C},
                  {"epsilon", rule.epsilon},
                  {"effective_c", rule.effective_c},
                  {"threshold", sel.threshold},
                  {"t_star", sel.t_star},
                  {"freq_points", o.freq_points},
                  {"freq_max", curve.freqs[curve.freqs.size() - 1]}};
        return r;
    }
    try {
        std::size_t used = 0;
        r.h = std::stod(o.bandwidth, &used);
        if (used != o.bandwidth.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
        throw DomainError("--bandwidth must be auto, cv or a positive number, got '" + o.bandwidth + "'");
    }
    if (!(r.h > 0.0 && std::isfinite(r.h))) throw DomainError("--bandwidth must be positive");
    r.info = {{"method", "fixed"}};
    return r;
}

std::string two_column_csv(const char* header, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    std::string out = std::string(header) + "\n";
    for (Eigen::Index i = 0; i < x.size(); ++i) out += num(x[i]) + "," + num(y[i]) + "\n";
    return out;
}

// The primary result goes to the output file when given (config then on
// stdout), else to stdout with the config on stderr.
void emit(const std::string& primary, const std::optional<std::string>& output, const json& config, std::ostream& out,
          std::ostream& err) {
    if (output) {
        write_text(*output, primary);
        out << config.dump(2) << "\n";
    } else {
        out << primary;
        err << config.dump(2) << "\n";
    }
}

json base_config(const std::string& subcommand) {
    json j;
    j["schema"] = 1;
    j["subcommand"] = subcommand;
    return j;
}

void add_kernel_replay(std::vector<std::string>& replay, const ResolvedKernel& k, const KernelOpts& o) {
    if (k.gaussian) {
        replay.insert(replay.end(), {"--kernel", "gaussian"});
        return;
    }
    replay.insert(replay.end(), {"--kernel", to_string(k.spec.family), "--c", num(k.spec.c)});
    if (k.spec.family == FlatTopFamily::SmoothTrapezoid) {
        replay.insert(replay.end(), {"--b", num(k.spec.b), "--effective-c", num(k.spec.effective_c)});
    }
    replay.insert(replay.end(), {"--table-tol", num(o.table_tol)});
}

void add_bandwidth_replay(std::vector<std::string>& replay, const ResolvedBandwidth& bw, const BandwidthOpts& o) {
    replay.insert(replay.end(), {"--bandwidth", o.bandwidth});
    if (bw.info["method"] == "auto") {
        replay.insert(replay.end(), {"--bw-mode", bw.info["mode"].get<std::string>(), "--bw-C",
                                     num(bw.info["C"].get<double>()), "--bw-eps", num(bw.info["epsilon"].get<double>()),
                                     "--freq-points", std::to_string(o.freq_points)});
    } else if (bw.info["method"] == "cv") {
        replay.insert(replay.end(), {"--cv-points", std::to_string(o.cv_points)});
    }
}

// Shared body of estimate and survival.
int run_smoother(bool survival, const std::string& input, const std::optional<std::string>& output,
                 const std::string& grid_spec, const KernelOpts& ko, const BandwidthOpts& bo,
                 const std::optional<double>& boundary, bool standardize, std::ostream& out, std::ostream& err) {
    const CensoredSample sample = read_sample(input);
    sample.validate();
    const Eigen::VectorXd grid = parse_grid_spec(grid_spec);
    if (survival && !sample.any_event()) throw DomainError("Kaplan-Meier needs at least one event");
    const StepEstimate jumps = sample.all_events() ? edf(sample) : kaplan_meier(sample);
    if (boundary && sample.times.minCoeff() < *boundary) throw DomainError("observations lie below the boundary point");
    const ResolvedKernel k = resolve_kernel(ko);
    const ResolvedBandwidth bw = resolve_bandwidth(sample, jumps, k, bo);

    Eigen::VectorXd values;
    if (k.gaussian) {
        EstimatorConfig<GaussianKernel> cfg{&k.gauss, bw.h, boundary, standardize};
        values = survival ? smoothed_survival_at(jumps, cfg, grid) : smoothed_cdf_at(jumps, cfg, grid);
    } else {
        EstimatorConfig<KernelTable> cfg{&*k.table, bw.h, boundary, standardize};
        values = survival ? smoothed_survival_at(jumps, cfg, grid) : smoothed_cdf_at(jumps, cfg, grid);
    }

    const std::string sub = survival ? "survival" : "estimate";
    json config = base_config(sub);
    config["input"] = input;
    config["n"] = sample.size();
    config["events"] = sample.event.count();
    config["estimator"] = sample.all_events() && !survival ? "edf" : "kaplan-meier";
    config["kernel"] = k.describe(ko.table_tol);
    config["bandwidth"] = bw.info;
    config["bandwidth"]["h"] = bw.h;
    config["boundary"] = boundary ? json(*boundary) : json(nullptr);
    config["standardize"] = standardize;
    config["grid"] = grid_spec;
    std::vector<std::string> replay{sub, "--input", input, "--grid", grid_spec};
    add_kernel_replay(replay, k, ko);
    add_bandwidth_replay(replay, bw, bo);
    if (boundary) replay.insert(replay.end(), {"--boundary", num(*boundary)});
    if (standardize) replay.push_back("--standardize");
    if (output) replay.insert(replay.end(), {"--output", *output});
    config["replay"] = replay;
    emit(two_column_csv("t,value", grid, values), output, config, out, err);
    return kOk;
}

int run_bandwidth(const std::string& input, const std::optional<std::string>& output,
                  const std::optional<std::string>& ecf_out, const KernelOpts& ko, const BandwidthOpts& bo,
                  std::ostream& out) {
    const CensoredSample sample = read_sample(input);
    sample.validate();
    const StepEstimate jumps = sample.all_events() ? edf(sample) : kaplan_meier(sample);
    const ResolvedKernel k = resolve_kernel(ko);
    const ResolvedBandwidth bw = resolve_bandwidth(sample, jumps, k, bo);
    json result = base_config("bandwidth");
    result["input"] = input;
    result["n"] = sample.size();
    result["kernel"] = k.describe(ko.table_tol);
    result["bandwidth"] = bw.info;
    result["bandwidth"]["h"] = bw.h;
    if (ecf_out) {
        const EcfCurve curve = ecf(jumps, sample.size(), default_frequency_grid(sample, bo.freq_points));
        write_text(*ecf_out, two_column_csv("t,abs_ecf", curve.freqs, curve.magnitudes));
        result["ecf_output"] = *ecf_out;
    }
    std::vector<std::string> replay{"bandwidth", "--input", input};
    add_kernel_replay(replay, k, ko);
    add_bandwidth_replay(replay, bw, bo);
    result["replay"] = replay;
    if (output) {
        write_text(*output, result.dump(2) + "\n");
    }
    out << result.dump(2) << "\n";
    return kOk;
}

struct DeficiencyOpts {
    std::optional<std::string> assumption;
    // expansion form
    double lead_c = 1.0, rate_r = 1.0, second_s = 0.0, second_t = 0.0, delta = 0.5;
    std::string kind = "power";
    // assumption form
    std::optional<double> p, d, D, band;
    std::optional<double> F, f, cross_moment;
    double a = 1.0;
    std::string n_list = "100,10000,1000000";
};

int run_deficiency(const DeficiencyOpts& o, const KernelOpts& ko, std::ostream& out) {
    json result = base_config("deficiency");
    std::vector<double> ns;
    for (int n : parse_int_list(o.n_list)) ns.push_back(static_cast<double>(n));
    json rows = json::array();
    if (!o.assumption) {
        MseExpansion s, t;
        s.c = t.c = o.lead_c;
        s.r = t.r = o.rate_r;
        s.second_const = o.second_s;
        t.second_const = o.second_t;
        if (o.kind == "power") {
            s.kind = t.kind = SecondOrderKind::Power;
        } else if (o.kind == "log") {
            s.kind = t.kind = SecondOrderKind::LogFactor;
        } else {
            throw DomainError("--kind must be power or log");
        }
        s.delta = t.delta = o.delta;
        const DeficiencyRate rate = deficiency_rate(s, t);
        result["expansion"] = {{"c", o.lead_c}, {"r", o.rate_r}, {"a", o.second_s}, {"b", o.second_t},
                               {"kind", o.kind}, {"delta", o.kind == "power" ? json(o.delta) : json(nullptr)}};
        result["limit"] = rate.limit;
        result["rate"] = rate.descriptor;
        for (double n : ns) {
            const double d = matching_deficiency(s, t, n);
            rows.push_back({{"n", n}, {"leading", rate.at(n)}, {"solved", d}});
        }
    } else {
        AssumptionTag tag;
        const std::string& name = *o.assumption;
        if (name == "A") {
            if (!o.p) throw DomainError("assumption A needs --p");
            tag = AssumptionTag::a(*o.p);
        } else if (name == "B") {
            if (!o.d || !o.D) throw DomainError("assumption B needs --d and --D");
            tag = AssumptionTag::exponential(*o.d, *o.D);
        } else if (name == "C") {
            if (!o.band) throw DomainError("assumption C needs --band");
            tag = AssumptionTag::band_limited(*o.band);
        } else {
            throw DomainError("--assumption must be A, B or C");
        }
        if (!o.F || !o.f) throw DomainError("the assumption form needs --F and --f");
        double cm = 0.0;
        json kernel;
        if (o.cross_moment) {
            cm = *o.cross_moment;
            kernel = "explicit";
        } else if (ko.kernel == "gaussian") {
            cm = kernel_cross_moment(GaussianKernel{});
            kernel = {{"family", "gaussian"}};
        } else {
            const FlatTopFamily family = parse_family(ko.kernel);
            const FlatTopSpec spec = family == FlatTopFamily::Trapezoid
                                         ? FlatTopSpec::trapezoid(ko.c.value_or(0.75))
                                         : FlatTopSpec::smooth_trapezoid(ko.b.value_or(1.0), ko.c.value_or(0.05),
                                                                         ko.effective_c);
            cm = kernel_cross_moment(spec);
            kernel = {{"family", to_string(spec.family)}, {"c", spec.c}, {"b", spec.b}};
        }
        result["assumption"] = tag.describe();
        result["F"] = *o.F;
        result["f"] = *o.f;
        result["a"] = o.a;
        result["kernel"] = kernel;
        result["cross_moment"] = cm;
        result["rate"] = name == "A" ? "n^" + num(2.0 * *o.p / (2.0 * *o.p + 1.0)) : (name == "B" ? "n/log n" : "n");
        for (double n : ns) {
            rows.push_back({{"n", n}, {"deficiency", edf_deficiency(tag, *o.F, *o.f, cm, n, o.a)}});
        }
    }
    result["values"] = rows;
    out << result.dump(2) << "\n";
    return kOk;
}

struct SimulateOpts {
    std::string scenario = "normal-iid";
    std::optional<std::string> n_list;
    std::optional<int> reps;
    std::uint64_t seed = 42;
    int workers = 1;
    std::optional<std::string> estimators;
    std::optional<std::string> points;
    std::optional<double> fixed_h;
    std::optional<std::string> json_out;
};

int run_simulate(const SimulateOpts& o, const BandwidthOpts& bo, const KernelOpts& ko,
                 const std::optional<std::string>& output, std::ostream& out, std::ostream& err) {
    Scenario sc = Scenario::by_name(o.scenario);
    sc.seed = o.seed;
    if (o.n_list) sc.sample_sizes = parse_int_list(*o.n_list);
    if (o.reps) sc.replications = *o.reps;
    if (o.points) sc.eval_points = parse_grid_spec(*o.points);
    if (o.workers < 1) throw DomainError("--workers must be at least 1");

    json config = base_config("simulate");
    config["scenario"] = sc.name;
    config["seed"] = sc.seed;
    config["workers"] = o.workers;
    config["replications"] = sc.replications;
    config["sample_sizes"] = sc.sample_sizes;
    config["eval_points"] = std::vector<double>(sc.eval_points.data(), sc.eval_points.data() + sc.eval_points.size());
    std::vector<std::string> replay{"simulate", "--scenario", sc.name, "--seed", std::to_string(sc.seed), "--reps",
                                    std::to_string(sc.replications)};
    std::string n_joined;
    for (int n : sc.sample_sizes) n_joined += (n_joined.empty() ? "" : ",") + std::to_string(n);
    std::string p_joined;
    for (Eigen::Index k = 0; k < sc.eval_points.size(); ++k) p_joined += (k ? "," : "") + num(sc.eval_points[k]);
    replay.insert(replay.end(), {"--n", n_joined, "--points", p_joined});

    if (o.fixed_h) {
        if (sc.name != "polya-bandlimited") throw DomainError("--fixed-h runs the zero-bias experiment; use --scenario polya-bandlimited");
        if (sc.sample_sizes.size() != 1) throw DomainError("the zero-bias experiment takes a single --n");
        const ZeroBiasReport rep =
            zero_bias_experiment(sc.sample_sizes[0], *o.fixed_h, sc.replications, sc.seed, sc.eval_points, o.workers);
        config["fixed_h"] = *o.fixed_h;
        config["kernel"] = {{"family", "trapezoid"}, {"c", 0.75}};
        replay.insert(replay.end(), {"--fixed-h", num(*o.fixed_h)});
        if (output) replay.insert(replay.end(), {"--output", *output});
        config["replay"] = replay;
        emit(rep.to_json() + "\n", output, config, out, err);
        return kOk;
    }

    HarnessOptions opts;
    opts.workers = o.workers;
    opts.bw_mode = parse_bandwidth_mode(bo.mode);
    opts.bw_C = bo.C;
    opts.bw_epsilon = bo.eps;
    opts.freq_points = bo.freq_points;
    opts.cv_grid_points = bo.cv_points;
    opts.table_tol = ko.table_tol;
    if (ko.c) opts.trapezoid_c = *ko.c;
    std::vector<EstimatorSpec> estimators;
    if (o.estimators) {
        std::stringstream ss(*o.estimators);
        std::string name;
        while (std::getline(ss, name, ',')) estimators.push_back(EstimatorSpec::parse(name));
    } else {
        estimators = default_estimators();
    }
    const MseReport report = run_scenario(sc, estimators, opts);
    const double C = opts.bw_C.value_or(sc.bw_C);
    config["bandwidth"] = {{"mode", bo.mode}, {"C", C}, {"epsilon", bo.eps ? json(*bo.eps) : json("max(1, log10 n)")},
                           {"freq_points", bo.freq_points}, {"cv_points", bo.cv_points}};
    config["trapezoid_c"] = opts.trapezoid_c;
    config["table_tol"] = opts.table_tol;
    json names = json::array();
    for (const auto& e : estimators) names.push_back(e.name(sc.censored()));
    config["estimators"] = names;
    config["retries"] = report.retries;
    config["shape_violations"] = report.shape_violations;
    std::string est_joined;
    for (const auto& e : estimators) est_joined += (est_joined.empty() ? "" : ",") + e.name(sc.censored());
    replay.insert(replay.end(), {"--estimators", est_joined, "--bw-mode", bo.mode, "--bw-C", num(C), "--freq-points",
                                 std::to_string(bo.freq_points), "--cv-points", std::to_string(bo.cv_points),
                                 "--table-tol", num(opts.table_tol), "--c", num(opts.trapezoid_c)});
    if (bo.eps) replay.insert(replay.end(), {"--bw-eps", num(*bo.eps)});
    if (output) replay.insert(replay.end(), {"--output", *output});
    if (o.json_out) {
        write_text(*o.json_out, report.to_json() + "\n");
        replay.insert(replay.end(), {"--json-out", *o.json_out});
    }
    config["replay"] = replay;
    emit(report.to_csv(), output, config, out, err);
    return kOk;
}

int run_kernel_table(const KernelOpts& ko, const std::optional<std::string>& output, std::ostream& out,
                     std::ostream& err) {
    if (ko.kernel == "gaussian") throw DomainError("kernel-table tabulates flat-top kernels only");
    const ResolvedKernel k = resolve_kernel(ko);
    const KernelTable& t = *k.table;
    const Eigen::VectorXd x = t.grid();
    std::string csv = "x,k,kbar\n";
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        csv += num(x[i]) + "," + num(t.k_values()[i]) + "," + num(t.kbar_values()[i]) + "\n";
    }
    json config = base_config("kernel-table");
    config["kernel"] = k.describe(ko.table_tol);
    config["spacing"] = t.spacing();
    config["tail_cutoff"] = t.tail_cutoff();
    config["nodes"] = t.size();
    config["integral_of_kernel"] = t.integral_of_kernel();
    config["cross_moment"] = kernel_cross_moment(t);
    std::vector<std::string> replay{"kernel-table"};
    add_kernel_replay(replay, k, ko);
    if (output) replay.insert(replay.end(), {"--output", *output});
    config["replay"] = replay;
    emit(csv, output, config, out, err);
    return kOk;
}

int report_error(std::ostream& err, int code, const std::string& kind, const std::string& message, long line = -1) {
    json j;
    j["schema"] = 1;
    j["error"] = {{"kind", kind}, {"message", message}};
    if (line >= 0) j["error"]["line"] = line;
    err << j.dump() << "\n";
    return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Flat-top kernel CDF and survival estimation"};
    app.name("flattop");
    app.require_subcommand(1);

    KernelOpts ko;
    BandwidthOpts bo;
    std::string input;
    std::optional<std::string> output;
    std::string grid;
    std::optional<double> boundary;
    bool standardize = false;

    auto* estimate = app.add_subcommand("estimate", "smoothed CDF on a grid");
    auto* survival = app.add_subcommand("survival", "smoothed survival function on a grid");
    for (auto* sub : {estimate, survival}) {
        sub->add_option("--input", input, "CSV (time[,event]) or JSON sample")->required();
        sub->add_option("--grid", grid, "min:max:count or a comma list")->required();
        sub->add_option("--output", output, "CSV output path");
        sub->add_option("--boundary", boundary, "left support point for reflection");
        sub->add_flag("--standardize", standardize, "running supremum and clamp to [0, 1]");
        add_kernel_flags(sub, ko);
        add_bandwidth_flags(sub, bo);
    }

    std::optional<std::string> ecf_out;
    auto* bandwidth = app.add_subcommand("bandwidth", "select the bandwidth for a sample");
    bandwidth->add_option("--input", input, "CSV (time[,event]) or JSON sample")->required();
    bandwidth->add_option("--output", output, "JSON output path");
    bandwidth->add_option("--ecf-out", ecf_out, "CSV of |ECF| on the frequency grid");
    add_kernel_flags(bandwidth, ko);
    add_bandwidth_flags(bandwidth, bo);

    DeficiencyOpts dopt;
    auto* deficiency = app.add_subcommand("deficiency", "deficiency limits and finite-n values");
    deficiency->add_option("--assumption", dopt.assumption, "A | B | C (omit for the expansion form)");
    deficiency->add_option("--lead-c", dopt.lead_c, "shared leading constant c")->capture_default_str();
    deficiency->add_option("--rate-r", dopt.rate_r, "shared leading rate r")->capture_default_str();
    deficiency->add_option("--second-s", dopt.second_s, "second-order constant of S")->capture_default_str();
    deficiency->add_option("--second-t", dopt.second_t, "second-order constant of T")->capture_default_str();
    deficiency->add_option("--kind", dopt.kind, "power | log")->capture_default_str();
    deficiency->add_option("--delta", dopt.delta, "power of the second-order term")->capture_default_str();
    deficiency->add_option("--p", dopt.p, "assumption A exponent");
    deficiency->add_option("--d", dopt.d, "assumption B decay rate");
    deficiency->add_option("--D", dopt.D, "assumption B constant");
    deficiency->add_option("--band", dopt.band, "assumption C band limit b");
    deficiency->add_option("--F", dopt.F, "F(t)");
    deficiency->add_option("--f", dopt.f, "f(t)");
    deficiency->add_option("--cross-moment", dopt.cross_moment, "kernel cross moment (else from --kernel)");
    deficiency->add_option("--a", dopt.a, "bandwidth constant a")->capture_default_str();
    deficiency->add_option("--n", dopt.n_list, "sample sizes")->capture_default_str();
    deficiency->add_option("--kernel", ko.kernel, "trapezoid | smooth | gaussian")->capture_default_str();
    deficiency->add_option("--c", ko.c, "flat-top radius");
    deficiency->add_option("--b", ko.b, "smooth edge parameter");

    SimulateOpts so;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo MSE study");
    simulate->add_option("--scenario", so.scenario, "normal-iid | weibull-censored | polya-bandlimited")
        ->capture_default_str();
    simulate->add_option("--n", so.n_list, "sample sizes, e.g. 15,30");
    simulate->add_option("--reps", so.reps, "replications");
    simulate->add_option("--seed", so.seed, "seed")->capture_default_str();
    simulate->add_option("--workers", so.workers, "worker threads")->capture_default_str();
    simulate->add_option("--estimators", so.estimators, "comma list, e.g. edf,trapezoid,trapezoid-std");
    simulate->add_option("--points", so.points, "evaluation points");
    simulate->add_option("--fixed-h", so.fixed_h, "zero-bias experiment at this bandwidth");
    simulate->add_option("--output", output, "MseReport CSV path");
    simulate->add_option("--json-out", so.json_out, "MseReport JSON path");
    simulate->add_option("--bw-C", bo.C, "threshold constant C (default per scenario)");
    simulate->add_option("--bw-eps", bo.eps, "window length epsilon");
    simulate->add_option("--bw-mode", bo.mode, "threshold | plateau")->capture_default_str();
    simulate->add_option("--freq-points", bo.freq_points, "ECF frequency grid size")->capture_default_str();
    simulate->add_option("--cv-points", bo.cv_points, "cross-validation grid size")->capture_default_str();
    simulate->add_option("--table-tol", ko.table_tol, "kernel table tolerance")->capture_default_str();
    simulate->add_option("--c", ko.c, "trapezoid radius");

    auto* table = app.add_subcommand("kernel-table", "tabulate K and Kbar");
    table->add_option("--output", output, "CSV output path");
    add_kernel_flags(table, ko);

    std::vector<std::string> argv_store{"flattop"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        return report_error(err, kUsage, "usage", e.what());
    }

    try {
        if (estimate->parsed()) return run_smoother(false, input, output, grid, ko, bo, boundary, standardize, out, err);
        if (survival->parsed()) return run_smoother(true, input, output, grid, ko, bo, boundary, standardize, out, err);
        if (bandwidth->parsed()) return run_bandwidth(input, output, ecf_out, ko, bo, out);
        if (deficiency->parsed()) return run_deficiency(dopt, ko, out);
        if (simulate->parsed()) return run_simulate(so, bo, ko, output, out, err);
        if (table->parsed()) return run_kernel_table(ko, output, out, err);
    } catch (const ParseError& e) {
        return report_error(err, kParse, e.kind(), e.what(), e.line());
    } catch (const IoError& e) {
        return report_error(err, kIo, e.kind(), e.what());
    } catch (const NoPlateauError& e) {
        return report_error(err, kNoPlateau, e.kind(), e.what());
    } catch (const QuadratureError& e) {
        return report_error(err, kQuadrature, e.kind(), e.what());
    } catch (const DomainError& e) {
        return report_error(err, kDomain, e.kind(), e.what());
    } catch (const std::exception& e) {
        return report_error(err, kFailure, "internal", e.what());
    }
    return report_error(err, kUsage, "usage", "no subcommand given");
}

}  // namespace flattop::cli
