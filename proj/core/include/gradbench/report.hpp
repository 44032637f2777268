#ifndef GRADBENCH_REPORT_HPP
#define GRADBENCH_REPORT_HPP

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gradbench/bench.hpp"
#include "gradbench/core.hpp"
#include "gradbench/objectives.hpp"

namespace gradbench {

inline constexpr std::string_view kTraceSchema = "gradbench-trace/1";

/// Samples on a uniform lattice including both endpoints, row-major:
/// values[j * nx + i] = f(x_i, y_j). Non-finite samples are stored as NaN.
struct ContourGrid {
    Rect domain;
    int nx = 0;
    int ny = 0;
    std::vector<double> values;

    double x_at(int i) const;
    double y_at(int j) const;
    double at(int i, int j) const { return values[static_cast<std::size_t>(j) * nx + i]; }
    std::size_t flagged_count() const;
    /// Throws InvalidArgument unless nx, ny >= 2 and values.size() == nx * ny.
    void validate() const;
};

/// Throws InvalidArgument if nx or ny < 2.
ContourGrid contour_grid(const std::function<double(Vec2)>& value, const Rect& domain, int nx, int ny);
ContourGrid contour_grid(const ObjectiveFunction& fn, const Rect& domain, int nx, int ny);

/// `count` levels above the finite grid minimum, geometrically spaced:
///   level_i = fmin + 0.95 * range * 10^(-5 (1 - i / (count - 1)))
/// Empty when the grid is constant or has no finite sample.
std::vector<double> contour_levels(const ContourGrid& grid, int count = 12);

struct ContourSegment {
    Vec2 a;
    Vec2 b;
    int cell_i = 0;
    int cell_j = 0;
};

/// Marching squares for one level. Cells with a non-finite corner are skipped;
/// saddle cells are resolved by the mean of the four corners.
std::vector<ContourSegment> marching_squares(const ContourGrid& grid, double level);

enum class PlotKind { ContourWithTrajectories, ErrorSeries, SweepScatter };

struct PlotSpec {
    PlotKind kind = PlotKind::ContourWithTrajectories;
    std::string title;
    std::string x_label = "x";
    std::string y_label = "y";
    bool log_y = true;
    int width = 640;
    int height = 480;
    int contour_levels = 12;
};

/// Stable color slot for each method, in registry order.
int method_color_index(Method m);

struct ContourPayload {
    ContourGrid grid;
    std::vector<Trace> trajectories;
};

struct ErrorSeriesLine {
    std::string label;
    int color_index = 0;
    std::vector<double> values;
};

struct ErrorSeriesPayload {
    std::vector<ErrorSeriesLine> series;
};

struct SweepPayload {
    SweepResult sweep;
    /// Data window; defaults to the padded bounding box of starts and finals.
    std::optional<Rect> domain;
};

using PlotPayload = std::variant<ContourPayload, ErrorSeriesPayload, SweepPayload>;

/// Maps data coordinates into the plot area of an SVG with the given spec.
struct PlotFrame {
    Rect data;
    double left = 0.0;
    double top = 0.0;
    double width = 0.0;
    double height = 0.0;

    static PlotFrame for_spec(const PlotSpec& spec, const Rect& data);
    Vec2 to_pixel(Vec2 p) const;
};

/// Standalone SVG 1.1 document. Throws InvalidArgument when the payload does
/// not match spec.kind and EmptyPayload when there is nothing to draw (empty
/// grid, no series or only empty series, zero-size sweep).
std::string render_svg(const PlotSpec& spec, const PlotPayload& payload);
void emit_svg(const PlotSpec& spec, const PlotPayload& payload, const std::filesystem::path& path);

std::string trace_to_json(const Trace& trace);
/// Throws SchemaMismatch on a wrong or missing schema tag or malformed content.
Trace trace_from_json(std::string_view text);
void write_trace_json(const Trace& trace, const std::filesystem::path& path);
Trace read_trace_json(const std::filesystem::path& path);

/// k,x,y,f,grad_norm,alpha
std::string trace_csv(const Trace& trace);
/// x0,y0,xf,yf,ff,iters,basin
std::string sweep_csv(const SweepResult& sweep);
/// function,method,x0,y0,xf,yf,ff,iters,termination,n_f,n_grad,n_hess
std::string summary_csv(const BenchReport& report);

void write_csv(const Trace& trace, const std::filesystem::path& path);
void write_csv(const SweepResult& sweep, const std::filesystem::path& path);
void write_csv(const BenchReport& report, const std::filesystem::path& path);

/// Reads a sweep CSV. Terminations are not persisted, so `terminations` stays empty.
/// Throws SchemaMismatch on a wrong header or a malformed row.
SweepResult read_sweep_csv(const std::filesystem::path& path);

/// Whole-file helpers; both throw Io.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

} // namespace gradbench

#endif
