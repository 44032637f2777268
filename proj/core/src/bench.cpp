#include "gradbench/bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "gradbench/optimizers.hpp"

namespace gradbench {

CaseSummary summarize(const Trace& trace) {
    trace.validate();
    const IterationRecord& last = trace.final_record();
    return {last.point, last.f_value, trace.iterations(), trace.termination, trace.counters};
}

Vec2 protocol_start_point(std::string_view function_name) {
    if (function_name == "rosenbrock") return {-2.0, 2.0};
    if (function_name == "spring") return {-1.0, 1.0};
    if (function_name == "ackley") return {-0.1, -0.45};
    if (function_name == "himmelblau") return {0.0, 6.0};
    throw Error(ErrorCode::UnknownName, "function '" + std::string(function_name) + "'");
}

const std::vector<Method>& comparison_methods() {
    static const std::vector<Method> methods{Method::SteepestDescent, Method::CgFletcherReeves,
                                             Method::CgPolakRibiere,  Method::Newton,
                                             Method::QuasiNewtonBfgs, Method::LevenbergMarquardt};
    return methods;
}

BenchCase make_case(std::string_view function_name, std::string_view method, Vec2 x0, OptimizerConfig cfg) {
    cfg.method = parse_method(method);
    (void)make_objective(function_name);
    return {std::string(function_name), std::string(method), x0, cfg};
}

BenchReport run_matrix(const std::vector<BenchCase>& cases) {
    if (cases.empty()) throw Error(ErrorCode::InvalidArgument, "run_matrix: no cases");
    BenchReport report;
    report.cases = cases;
    report.traces.reserve(cases.size());
    for (const BenchCase& c : cases) {
        OptimizerConfig cfg = c.cfg;
        cfg.method = parse_method(c.method_name);
        const ObjectiveFunction fn = make_objective(c.function_name);
        report.traces.push_back(minimize(fn, c.x0, cfg));
        report.summaries.push_back(summarize(report.traces.back()));
    }
    return report;
}

std::vector<double> distance_error_series(const Trace& trace) {
    if (trace.records.empty()) throw Error(ErrorCode::InvalidArgument, "empty trace");
    const Vec2 last = trace.final_record().point;
    std::vector<double> out;
    out.reserve(trace.records.size());
    for (const IterationRecord& r : trace.records) out.push_back(norm(r.point - last));
    return out;
}

std::vector<double> value_error_series(const Trace& trace) {
    if (trace.records.empty()) throw Error(ErrorCode::InvalidArgument, "empty trace");
    const double last = trace.final_record().f_value;
    std::vector<double> out;
    out.reserve(trace.records.size());
    for (const IterationRecord& r : trace.records) out.push_back(std::abs(r.f_value - last));
    return out;
}

SweepSpec default_sweep_spec(std::string_view function_name, std::string_view method_name) {
    SweepSpec spec;
    spec.function_name = std::string(function_name);
    spec.method_name = std::string(method_name);
    (void)parse_method(method_name);
    if (function_name == "rosenbrock") {
        spec.center = {1.0, 1.0};
    } else if (function_name == "spring") {
        spec.center = spring_force().known_minima.front();
    } else if (function_name == "ackley") {
        spec.center = {0.0, 0.0};
    } else if (function_name == "himmelblau") {
        spec.center = {3.0, 2.0};
        spec.clip_to_plot_domain = true;
    } else {
        throw Error(ErrorCode::UnknownName, "function '" + std::string(function_name) + "'");
    }
    return spec;
}

namespace {

std::vector<double> linspace(double lo, double hi, int count) {
    std::vector<double> out;
    if (count == 1) {
        out.push_back(0.5 * (lo + hi));
        return out;
    }
    for (int i = 0; i < count; ++i) out.push_back(lo + (hi - lo) * i / (count - 1));
    return out;
}

// 53 random mantissa bits; independent of the standard library's distributions.
double unit_uniform(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

Rect sweep_rect(const SweepSpec& spec, const ObjectiveFunction& fn) {
    Rect r{spec.center.x - spec.width / 2.0, spec.center.x + spec.width / 2.0, spec.center.y - spec.height / 2.0,
           spec.center.y + spec.height / 2.0};
    return spec.clip_to_plot_domain ? r.intersect(fn.plot_domain) : r;
}

} // namespace

std::vector<Vec2> sweep_starts(const SweepSpec& spec) {
    if (spec.n < 1) throw Error(ErrorCode::InvalidArgument, "sweep: n must be >= 1");
    if (!(spec.width > 0.0 && spec.height > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "sweep: width and height must be > 0");
    }
    const ObjectiveFunction fn = make_objective(spec.function_name);
    const Rect r = sweep_rect(spec, fn);
    std::vector<Vec2> starts;
    starts.reserve(static_cast<std::size_t>(spec.n));
    if (spec.sampling == Sampling::Lattice) {
        const int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(spec.n))));
        const std::vector<double> xs = linspace(r.x_lo, r.x_hi, side);
        const std::vector<double> ys = linspace(r.y_lo, r.y_hi, side);
        for (int j = 0; j < side && static_cast<int>(starts.size()) < spec.n; ++j) {
            for (int i = 0; i < side && static_cast<int>(starts.size()) < spec.n; ++i) {
                starts.push_back({xs[static_cast<std::size_t>(i)], ys[static_cast<std::size_t>(j)]});
            }
        }
    } else {
        std::mt19937_64 gen(spec.seed);
        for (int i = 0; i < spec.n; ++i) {
            const double u = unit_uniform(gen);
            const double v = unit_uniform(gen);
            starts.push_back({r.x_lo + u * r.width(), r.y_lo + v * r.height()});
        }
    }
    return starts;
}

int basin_label(Vec2 p, const std::vector<Vec2>& minima, double tol) {
    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < minima.size(); ++i) {
        const double d = norm(p - minima[i]);
        if (d < best_dist) {
            best_dist = d;
            best = static_cast<int>(i);
        }
    }
    return best_dist <= tol ? best : -1;
}

SweepResult sensitivity_sweep(const SweepSpec& spec) {
    const ObjectiveFunction fn = make_objective(spec.function_name);
    if (fn.known_minima.empty()) {
        throw Error(ErrorCode::UnknownMinima, "function '" + spec.function_name + "' has no known minima");
    }
    OptimizerConfig cfg = spec.cfg;
    cfg.method = parse_method(spec.method_name);

    SweepResult result;
    result.starts = sweep_starts(spec);
    for (const Vec2 start : result.starts) {
        const Trace trace = minimize(fn, start, cfg);
        const IterationRecord& last = trace.final_record();
        result.finals.push_back(last.point);
        result.final_values.push_back(last.f_value);
        result.iterations.push_back(trace.iterations());
        result.terminations.push_back(trace.termination);
        result.basin_labels.push_back(basin_label(last.point, fn.known_minima));
    }
    return result;
}

namespace {

struct Sample {
    Vec2 p;
    double f;
};

double safe_value(const std::function<double(Vec2)>& value, Vec2 p) {
    const double v = value(p);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

// Best sample of a resolution^2 scan; ties keep the first in row-major order.
Sample scan(const std::function<double(Vec2)>& value, const Rect& r, int resolution, Sample incumbent) {
    Sample best = incumbent;
    for (int j = 0; j < resolution; ++j) {
        const double y = r.y_lo + r.height() * j / (resolution - 1);
        for (int i = 0; i < resolution; ++i) {
            const Vec2 p{r.x_lo + r.width() * i / (resolution - 1), y};
            const double f = safe_value(value, p);
            if (f < best.f) best = {p, f};
        }
    }
    return best;
}

Sample refine(const std::function<double(Vec2)>& value, const Rect& domain, int resolution, int rounds,
              Sample incumbent) {
    double half_w = domain.width() / 2.0;
    double half_h = domain.height() / 2.0;
    for (int round = 0; round < rounds; ++round) {
        half_w /= 10.0;
        half_h /= 10.0;
        const Rect window = Rect{incumbent.p.x - half_w, incumbent.p.x + half_w, incumbent.p.y - half_h,
                                 incumbent.p.y + half_h}
                                .intersect(domain);
        incumbent = scan(value, window, resolution, incumbent);
    }
    return incumbent;
}

void check_oracle_args(const Rect& domain, int resolution, int refine_rounds) {
    if (resolution < 3) throw Error(ErrorCode::InvalidArgument, "grid oracle: resolution must be >= 3");
    if (refine_rounds < 0) throw Error(ErrorCode::InvalidArgument, "grid oracle: refine_rounds must be >= 0");
    if (!(domain.width() > 0.0 && domain.height() > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "grid oracle: empty domain");
    }
}

} // namespace

Vec2 grid_argmin_oracle(const std::function<double(Vec2)>& value, const Rect& domain, int resolution,
                        int refine_rounds) {
    check_oracle_args(domain, resolution, refine_rounds);
    const Sample none{domain.center(), std::numeric_limits<double>::infinity()};
    const Sample coarse = scan(value, domain, resolution, none);
    return refine(value, domain, resolution, refine_rounds, coarse).p;
}

Vec2 grid_argmin_oracle(const ObjectiveFunction& fn, const Rect& domain, int resolution, int refine_rounds) {
    return grid_argmin_oracle(fn.value, domain, resolution, refine_rounds);
}

std::vector<Vec2> grid_local_minima_oracle(const std::function<double(Vec2)>& value, const Rect& domain,
                                           int resolution, int refine_rounds) {
    check_oracle_args(domain, resolution, refine_rounds);
    const int n = resolution;
    std::vector<double> grid(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    auto at = [&](int i, int j) -> double& { return grid[static_cast<std::size_t>(j) * n + i]; };
    auto point = [&](int i, int j) {
        return Vec2{domain.x_lo + domain.width() * i / (n - 1), domain.y_lo + domain.height() * j / (n - 1)};
    };
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) at(i, j) = safe_value(value, point(i, j));
    }

    std::vector<Sample> seeds;
    for (int j = 1; j < n - 1; ++j) {
        for (int i = 1; i < n - 1; ++i) {
            const double c = at(i, j);
            if (!std::isfinite(c)) continue;
            bool is_min = true;
            bool strict_somewhere = false;
            for (int dj = -1; dj <= 1 && is_min; ++dj) {
                for (int di = -1; di <= 1; ++di) {
                    if (di == 0 && dj == 0) continue;
                    const double nb = at(i + di, j + dj);
                    if (nb < c) {
                        is_min = false;
                        break;
                    }
                    if (nb > c) strict_somewhere = true;
                }
            }
            if (is_min && strict_somewhere) seeds.push_back({point(i, j), c});
        }
    }
    std::sort(seeds.begin(), seeds.end(), [](const Sample& a, const Sample& b) { return a.f < b.f; });
    if (seeds.size() > 64) seeds.resize(64);

    // Each seed refines inside its own coarse cell neighbourhood.
    const double cell_w = domain.width() / (n - 1);
    const double cell_h = domain.height() / (n - 1);
    std::vector<Sample> found;
    for (const Sample& seed : seeds) {
        const Rect local =
            Rect{seed.p.x - cell_w, seed.p.x + cell_w, seed.p.y - cell_h, seed.p.y + cell_h}.intersect(domain);
        Sample s = scan(value, local, n, seed);
        s = refine(value, local, n, refine_rounds, s);
        const bool dup = std::any_of(found.begin(), found.end(), [&](const Sample& f) { return norm(f.p - s.p) < 1e-6; });
        if (!dup) found.push_back(s);
    }
    std::sort(found.begin(), found.end(), [](const Sample& a, const Sample& b) {
        if (a.f != b.f) return a.f < b.f;
        if (a.p.x != b.p.x) return a.p.x < b.p.x;
        return a.p.y < b.p.y;
    });
    std::vector<Vec2> out;
    for (const Sample& s : found) out.push_back(s.p);
    return out;
}

} // namespace gradbench
