#ifndef GRADBENCH_BENCH_HPP
#define GRADBENCH_BENCH_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "gradbench/core.hpp"
#include "gradbench/objectives.hpp"

namespace gradbench {

struct BenchCase {
    std::string function_name;
    std::string method_name;
    Vec2 x0;
    OptimizerConfig cfg;
};

struct CaseSummary {
    Vec2 final_point;
    double final_value = 0.0;
    int iterations = 0;
    Termination termination = Termination::MaxIterReached;
    EvalCounters counters;
};

CaseSummary summarize(const Trace& trace);

struct BenchReport {
    std::vector<BenchCase> cases;
    std::vector<Trace> traces;
    std::vector<CaseSummary> summaries;
};

/// Starting point used by the benchmark protocol for each registered function.
Vec2 protocol_start_point(std::string_view function_name);

/// The six methods of the benchmark comparison: sd, cg-fr, cg-pr, newton, bfgs, lm.
/// DFP is registered but not part of this list.
const std::vector<Method>& comparison_methods();

/// Builds a case with `cfg.method` set from `method_name`. Throws UnknownName.
BenchCase make_case(std::string_view function_name, std::string_view method_name, Vec2 x0,
                    OptimizerConfig cfg = {});

/// Runs each case independently; output is in input order. Throws
/// InvalidArgument on an empty list and UnknownName on unknown names.
BenchReport run_matrix(const std::vector<BenchCase>& cases);

/// e_k = |x_k - x_K| against the trace's final point.
std::vector<double> distance_error_series(const Trace& trace);
/// v_k = |f(x_k) - f(x_K)|.
std::vector<double> value_error_series(const Trace& trace);

enum class Sampling { Lattice, SeededUniform };

inline constexpr double kBasinTolerance = 1e-2;

struct SweepSpec {
    std::string function_name;
    std::string method_name;
    Vec2 center;
    double width = 10.0;
    double height = 10.0;
    int n = 100;
    Sampling sampling = Sampling::Lattice;
    std::uint64_t seed = 0;
    /// Intersect the start rectangle with the function's plot domain.
    bool clip_to_plot_domain = false;
    OptimizerConfig cfg;
};

/// Protocol defaults for the named function: 10x10 rectangle centered on its
/// reference minimum, clipped to the plot domain for himmelblau.
SweepSpec default_sweep_spec(std::string_view function_name, std::string_view method_name);

struct SweepResult {
    std::vector<Vec2> starts;
    std::vector<Vec2> finals;
    std::vector<double> final_values;
    std::vector<int> iterations;
    std::vector<Termination> terminations;
    /// Index into known_minima, or -1 when no minimum lies within kBasinTolerance.
    std::vector<int> basin_labels;

    std::size_t size() const { return starts.size(); }
};

/// Start points for a sweep. Lattice: ceil(sqrt(n)) per side including the
/// rectangle edges, row-major, truncated to n; a single point sits at the center.
std::vector<Vec2> sweep_starts(const SweepSpec& spec);

/// Nearest minimum within tol, else -1.
int basin_label(Vec2 p, const std::vector<Vec2>& minima, double tol = kBasinTolerance);

/// Throws UnknownMinima if the function has no known minima.
SweepResult sensitivity_sweep(const SweepSpec& spec);

/// Brute-force argmin: resolution x resolution scan, then `refine_rounds`
/// scans of the same resolution over a window 10x smaller around the incumbent.
Vec2 grid_argmin_oracle(const std::function<double(Vec2)>& value, const Rect& domain, int resolution,
                        int refine_rounds);
Vec2 grid_argmin_oracle(const ObjectiveFunction& fn, const Rect& domain, int resolution, int refine_rounds);

/// Multi-incumbent variant: every interior discrete local minimum of the coarse
/// scan is refined independently; results within 1e-6 of each other merge.
/// Sorted by value, then x, then y.
std::vector<Vec2> grid_local_minima_oracle(const std::function<double(Vec2)>& value, const Rect& domain,
                                           int resolution, int refine_rounds);

} // namespace gradbench

#endif
