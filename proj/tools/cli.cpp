#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"
#include "gradbench/bench.hpp"
#include "gradbench/objectives.hpp"
#include "gradbench/optimizers.hpp"
#include "gradbench/report.hpp"

namespace gradbench::cli {
namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double parse_real(std::string_view s, std::string_view what) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw UsageError(fmt::format("{}: '{}' is not a finite number", what, s));
    }
    return v;
}

Vec2 parse_pair(const std::string& text, std::string_view what) {
    const auto comma = text.find(',');
    if (comma == std::string::npos || text.find(',', comma + 1) != std::string::npos) {
        throw UsageError(fmt::format("{}: expected \"x,y\", got '{}'", what, text));
    }
    return {parse_real(std::string_view(text).substr(0, comma), what),
            parse_real(std::string_view(text).substr(comma + 1), what)};
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

fs::path default_out_dir() {
    if (const char* env = std::getenv("GRADBENCH_OUT"); env != nullptr && *env != '\0') return env;
    return ".";
}

std::string fmt_point(Vec2 p) { return fmt::format("({:.10g}, {:.10g})", p.x, p.y); }

void require_function(const std::string& name) {
    const auto& names = objective_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
        throw UsageError(fmt::format("unknown function '{}'", name));
    }
}

Method require_method(const std::string& name) {
    try {
        return parse_method(name);
    } catch (const Error&) {
        throw UsageError(fmt::format("unknown method '{}'", name));
    }
}

// ---------------------------------------------------------------------------

struct RunOptions {
    std::string function;
    std::string method;
    std::string x0;
    double tol = OptimizerConfig{}.grad_tol;
    int max_iter = OptimizerConfig{}.max_iter;
    std::string line_search;
    std::string out;
    std::string format = "json";
};

int cmd_run(const RunOptions& o, std::ostream& out) {
    require_function(o.function);
    OptimizerConfig cfg;
    cfg.method = require_method(o.method);
    const Vec2 x0 = parse_pair(o.x0, "--x0");
    cfg.grad_tol = o.tol;
    cfg.max_iter = o.max_iter;
    if (!o.line_search.empty()) {
        try {
            cfg.line_search = parse_line_search(o.line_search);
        } catch (const Error&) {
            throw UsageError(fmt::format("unknown line search '{}'", o.line_search));
        }
    }
    try {
        cfg.validate();
    } catch (const Error& e) {
        throw UsageError(e.what());
    }

    const ObjectiveFunction fn = make_objective(o.function);
    const Trace trace = minimize(fn, x0, cfg);

    const fs::path dir = o.out.empty() ? default_out_dir() : fs::path(o.out);
    const std::string stem = fmt::format("{}_{}", o.function, o.method);
    if (o.format == "json" || o.format == "both") write_trace_json(trace, dir / (stem + ".json"));
    if (o.format == "csv" || o.format == "both") write_csv(trace, dir / (stem + ".csv"));

    const auto& last = trace.final_record();
    fmt::print(out, "{} {} final={} f={:.10g} iterations={} termination={}\n", o.function, o.method,
               fmt_point(last.point), last.f_value, trace.iterations(), to_string(trace.termination));
    return converged(trace.termination) ? kExitOk : kExitNotConverged;
}

// ---------------------------------------------------------------------------

struct MatrixOptions {
    std::string function = "all";
    std::string methods = "all";
    std::string out;
};

int cmd_matrix(const MatrixOptions& o, std::ostream& out) {
    std::vector<std::string> functions;
    if (o.function == "all") {
        functions = objective_names();
    } else {
        require_function(o.function);
        functions.push_back(o.function);
    }
    std::vector<std::string> methods;
    if (o.methods == "all") {
        for (Method m : comparison_methods()) methods.emplace_back(method_name(m));
    } else {
        methods = split_list(o.methods);
        if (methods.empty()) throw UsageError("--methods is empty");
        for (const auto& m : methods) require_method(m);
    }

    std::vector<BenchCase> cases;
    for (const auto& f : functions) {
        for (const auto& m : methods) cases.push_back(make_case(f, m, protocol_start_point(f)));
    }
    const BenchReport report = run_matrix(cases);

    const fs::path dir = o.out.empty() ? default_out_dir() : fs::path(o.out);
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto& c = cases[i];
        write_trace_json(report.traces[i], dir / fmt::format("{}_{}.json", c.function_name, c.method_name));
        const auto& s = report.summaries[i];
        fmt::print(out, "{:<10} {:<6} final={} f={:.10g} iterations={} termination={}\n", c.function_name,
                   c.method_name, fmt_point(s.final_point), s.final_value, s.iterations, to_string(s.termination));
    }
    write_csv(report, dir / "summary.csv");
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct SweepOptions {
    std::string function;
    std::string method;
    std::string center;
    std::string size = "10,10";
    int n = 100;
    std::string sampling = "lattice";
    std::uint64_t seed = 0;
    std::string out;
    bool svg = false;
};

int cmd_sweep(const SweepOptions& o, std::ostream& out) {
    require_function(o.function);
    require_method(o.method);
    SweepSpec spec = default_sweep_spec(o.function, o.method);
    if (!o.center.empty()) spec.center = parse_pair(o.center, "--center");
    const Vec2 size = parse_pair(o.size, "--size");
    if (!(size.x > 0.0) || !(size.y > 0.0)) throw UsageError("--size: width and height must be > 0");
    spec.width = size.x;
    spec.height = size.y;
    if (o.n < 1) throw UsageError("--n must be >= 1");
    spec.n = o.n;
    if (o.sampling == "lattice") {
        spec.sampling = Sampling::Lattice;
    } else if (o.sampling == "uniform") {
        spec.sampling = Sampling::SeededUniform;
    } else {
        throw UsageError(fmt::format("--sampling: expected lattice or uniform, got '{}'", o.sampling));
    }
    spec.seed = o.seed;

    const SweepResult result = sensitivity_sweep(spec);
    const fs::path dir = o.out.empty() ? default_out_dir() : fs::path(o.out);
    const std::string stem = fmt::format("sweep_{}_{}", o.function, o.method);
    write_csv(result, dir / (stem + ".csv"));
    if (o.svg) {
        PlotSpec ps;
        ps.kind = PlotKind::SweepScatter;
        ps.title = fmt::format("{} / {}: {} starts", o.function, o.method, result.size());
        emit_svg(ps, SweepPayload{result, {}}, dir / (stem + ".svg"));
    }

    std::map<int, int> counts;
    int n_converged = 0;
    for (std::size_t i = 0; i < result.size(); ++i) {
        if (!converged(result.terminations[i])) continue;
        ++n_converged;
        ++counts[result.basin_labels[i]];
    }
    std::string labels;
    for (const auto& [label, count] : counts) labels += fmt::format(" {}:{}", label, count);
    fmt::print(out, "{} {} starts={} converged={} basins:{}\n", o.function, o.method, result.size(), n_converged,
               labels.empty() ? std::string(" none") : labels);
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct PlotOptions {
    std::vector<std::string> traces;
    std::string sweep;
    std::string kind;
    std::string out;
    std::string metric = "value";
    int resolution = 101;
    std::string title;
};

int cmd_plot(const PlotOptions& o, std::ostream& out) {
    PlotSpec spec;
    spec.title = o.title;
    if (o.kind == "scatter") {
        if (o.sweep.empty()) throw UsageError("--kind scatter needs --sweep FILE");
        if (!o.traces.empty()) throw UsageError("--kind scatter takes --sweep, not --trace");
        spec.kind = PlotKind::SweepScatter;
        emit_svg(spec, SweepPayload{read_sweep_csv(o.sweep), {}}, o.out);
    } else if (o.kind == "contour" || o.kind == "errors") {
        if (!o.sweep.empty()) throw UsageError(fmt::format("--kind {} takes --trace, not --sweep", o.kind));
        std::vector<Trace> traces;
        for (const auto& t : o.traces) traces.push_back(read_trace_json(t));
        if (o.kind == "contour") {
            if (traces.empty()) throw Error(ErrorCode::EmptyPayload, "no traces to plot");
            const std::string& fname = traces.front().function_name;
            for (const auto& t : traces) {
                if (t.function_name != fname) throw UsageError("contour traces must share one function");
            }
            if (o.resolution < 2) throw UsageError("--resolution must be >= 2");
            const ObjectiveFunction fn = make_objective(fname);
            spec.kind = PlotKind::ContourWithTrajectories;
            if (spec.title.empty()) spec.title = fmt::format("{}: trajectories", fname);
            emit_svg(spec, ContourPayload{contour_grid(fn, fn.plot_domain, o.resolution, o.resolution), traces}, o.out);
        } else {
            if (o.metric != "value" && o.metric != "distance") {
                throw UsageError(fmt::format("--metric: expected value or distance, got '{}'", o.metric));
            }
            spec.kind = PlotKind::ErrorSeries;
            spec.x_label = "iteration";
            spec.y_label = o.metric == "value" ? "|f - f_final|" : "|x - x_final|";
            ErrorSeriesPayload payload;
            for (const auto& t : traces) {
                payload.series.push_back({std::string(method_name(t.method)), method_color_index(t.method),
                                          o.metric == "value" ? value_error_series(t) : distance_error_series(t)});
            }
            if (spec.title.empty() && !traces.empty()) {
                spec.title = fmt::format("{}: {} error", traces.front().function_name, o.metric);
            }
            emit_svg(spec, payload, o.out);
        }
    } else {
        throw UsageError(fmt::format("--kind: expected contour, errors or scatter, got '{}'", o.kind));
    }
    fmt::print(out, "wrote {}\n", o.out);
    return kExitOk;
}

// ---------------------------------------------------------------------------

constexpr double kOracleGradCheck = 1e-3;

struct OracleOptions {
    std::string function;
    int resolution = 401;
    int rounds = 8;
};

int cmd_oracle(const OracleOptions& o, std::ostream& out) {
    require_function(o.function);
    if (o.resolution < 3) throw UsageError("--resolution must be >= 3");
    if (o.rounds < 0) throw UsageError("--rounds must be >= 0");
    const ObjectiveFunction fn = make_objective(o.function);
    const Vec2 best = grid_argmin_oracle(fn, fn.plot_domain, o.resolution, o.rounds);
    fmt::print(out, "argmin {:.12g} {:.12g} f={:.6e}\n", best.x, best.y, fn.value(best));
    // Grid-local minima along flat valleys are discretization artifacts; keep
    // only the ones the analytic gradient confirms as stationary.
    for (const Vec2& m : grid_local_minima_oracle(fn.value, fn.plot_domain, o.resolution, o.rounds)) {
        if (!(norm(fn.gradient(m)) < kOracleGradCheck)) continue;
        fmt::print(out, "minimum {:.12g} {:.12g} f={:.6e}\n", m.x, m.y, fn.value(m));
    }
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Benchmark gradient-based optimizers on 2-D test functions.", "gradbench"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "gradbench 0.1.0");

    const std::string functions = "rosenbrock, spring, ackley, himmelblau";
    const std::string methods = "sd, cg-fr, cg-pr, newton, dfp, bfgs, lm";

    RunOptions run_o;
    auto* run_cmd = app.add_subcommand("run", "Minimize one function from one start point.");
    run_cmd->add_option("--function", run_o.function, "Objective: " + functions)->required();
    run_cmd->add_option("--method", run_o.method, "Method: " + methods)->required();
    run_cmd->add_option("--x0", run_o.x0, "Start point as \"x,y\"")->required();
    run_cmd->add_option("--tol", run_o.tol, "Gradient-norm tolerance")->capture_default_str();
    run_cmd->add_option("--max-iter", run_o.max_iter, "Iteration cap")->capture_default_str();
    run_cmd->add_option("--line-search", run_o.line_search, "golden, armijo or fixed (default per method)");
    run_cmd->add_option("--out", run_o.out, "Output directory (default $GRADBENCH_OUT or .)");
    run_cmd->add_option("--format", run_o.format, "Trace format")
        ->check(CLI::IsMember({"json", "csv", "both"}))
        ->capture_default_str();

    MatrixOptions matrix_o;
    auto* matrix_cmd = app.add_subcommand("matrix", "Run the benchmark comparison from the protocol start points.");
    matrix_cmd->add_option("--function", matrix_o.function, "Objective name or all")->capture_default_str();
    matrix_cmd->add_option("--methods", matrix_o.methods, "Comma-separated methods or all (sd,cg-fr,cg-pr,newton,bfgs,lm)")
        ->capture_default_str();
    matrix_cmd->add_option("--out", matrix_o.out, "Output directory (default $GRADBENCH_OUT or .)");

    SweepOptions sweep_o;
    auto* sweep_cmd = app.add_subcommand("sweep", "Initial-point sensitivity sweep over a rectangle of starts.");
    sweep_cmd->add_option("--function", sweep_o.function, "Objective: " + functions)->required();
    sweep_cmd->add_option("--method", sweep_o.method, "Method: " + methods)->required();
    sweep_cmd->add_option("--center", sweep_o.center, "Rectangle center \"x,y\" (default: reference minimum)");
    sweep_cmd->add_option("--size", sweep_o.size, "Rectangle size \"w,h\"")->capture_default_str();
    sweep_cmd->add_option("--n", sweep_o.n, "Number of starts")->capture_default_str();
    sweep_cmd->add_option("--sampling", sweep_o.sampling, "lattice or uniform")->capture_default_str();
    sweep_cmd->add_option("--seed", sweep_o.seed, "Seed for uniform sampling")->capture_default_str();
    sweep_cmd->add_option("--out", sweep_o.out, "Output directory (default $GRADBENCH_OUT or .)");
    sweep_cmd->add_flag("--svg", sweep_o.svg, "Also write a scatter SVG of starts and finals");

    PlotOptions plot_o;
    auto* plot_cmd = app.add_subcommand("plot", "Render traces or a sweep as SVG.");
    auto* trace_opt = plot_cmd->add_option("--trace", plot_o.traces, "Trace JSON files");
    auto* sweep_opt = plot_cmd->add_option("--sweep", plot_o.sweep, "Sweep CSV file");
    trace_opt->excludes(sweep_opt);
    plot_cmd->add_option("--kind", plot_o.kind, "contour, errors or scatter")->required();
    plot_cmd->add_option("--out", plot_o.out, "Output SVG path")->required();
    plot_cmd->add_option("--metric", plot_o.metric, "Error metric for --kind errors: value or distance")
        ->capture_default_str();
    plot_cmd->add_option("--resolution", plot_o.resolution, "Contour grid samples per axis")->capture_default_str();
    plot_cmd->add_option("--title", plot_o.title, "Plot title");

    OracleOptions oracle_o;
    auto* oracle_cmd = app.add_subcommand("oracle", "Brute-force grid search for minima on the plot domain.");
    oracle_cmd->add_option("--function", oracle_o.function, "Objective: " + functions)->required();
    oracle_cmd->add_option("--resolution", oracle_o.resolution, "Samples per axis")->capture_default_str();
    oracle_cmd->add_option("--rounds", oracle_o.rounds, "Zoom refinement rounds")->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << app.version() << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        err << "run '" << (sub == &app ? std::string("gradbench") : "gradbench " + sub->get_name())
            << " --help' for usage\n";
        return kExitUsage;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(run_o, out);
        if (matrix_cmd->parsed()) return cmd_matrix(matrix_o, out);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_o, out);
        if (plot_cmd->parsed()) return cmd_plot(plot_o, out);
        if (oracle_cmd->parsed()) return cmd_oracle(oracle_o, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

} // namespace gradbench::cli
