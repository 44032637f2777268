#include "gradbench/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"

namespace gradbench {

using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Contour grid and marching squares

double ContourGrid::x_at(int i) const {
    if (i == nx - 1) return domain.x_hi;
    return domain.x_lo + domain.width() * static_cast<double>(i) / static_cast<double>(nx - 1);
}

double ContourGrid::y_at(int j) const {
    if (j == ny - 1) return domain.y_hi;
    return domain.y_lo + domain.height() * static_cast<double>(j) / static_cast<double>(ny - 1);
}

std::size_t ContourGrid::flagged_count() const {
    return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](double v) { return !std::isfinite(v); }));
}

void ContourGrid::validate() const {
    if (nx < 2 || ny < 2) throw Error(ErrorCode::InvalidArgument, "contour grid needs nx, ny >= 2");
    if (values.size() != static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny)) {
        throw Error(ErrorCode::InvalidArgument, "contour grid value count != nx * ny");
    }
}

ContourGrid contour_grid(const std::function<double(Vec2)>& value, const Rect& domain, int nx, int ny) {
    if (nx < 2 || ny < 2) throw Error(ErrorCode::InvalidArgument, "contour grid needs nx, ny >= 2");
    ContourGrid g{domain, nx, ny, {}};
    g.values.reserve(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double v = value({g.x_at(i), g.y_at(j)});
            g.values.push_back(std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN());
        }
    }
    return g;
}

ContourGrid contour_grid(const ObjectiveFunction& fn, const Rect& domain, int nx, int ny) {
    return contour_grid(fn.value, domain, nx, ny);
}

std::vector<double> contour_levels(const ContourGrid& grid, int count) {
    if (count < 1) throw Error(ErrorCode::InvalidArgument, "contour level count must be >= 1");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double v : grid.values) {
        if (!std::isfinite(v)) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double range = hi - lo;
    if (!(range > 0.0) || !std::isfinite(range)) return {};
    std::vector<double> levels;
    for (int i = 0; i < count; ++i) {
        const double frac = count == 1 ? 1.0 : static_cast<double>(i) / (count - 1);
        levels.push_back(lo + 0.95 * range * std::pow(10.0, -5.0 * (1.0 - frac)));
    }
    return levels;
}

std::vector<ContourSegment> marching_squares(const ContourGrid& grid, double level) {
    grid.validate();
    std::vector<ContourSegment> out;
    for (int j = 0; j + 1 < grid.ny; ++j) {
        for (int i = 0; i + 1 < grid.nx; ++i) {
            // corners counter-clockwise from bottom-left
            const std::array<Vec2, 4> p{{{grid.x_at(i), grid.y_at(j)},
                                         {grid.x_at(i + 1), grid.y_at(j)},
                                         {grid.x_at(i + 1), grid.y_at(j + 1)},
                                         {grid.x_at(i), grid.y_at(j + 1)}}};
            const std::array<double, 4> v{grid.at(i, j), grid.at(i + 1, j), grid.at(i + 1, j + 1), grid.at(i, j + 1)};
            if (!std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); })) continue;

            int idx = 0;
            for (int c = 0; c < 4; ++c) {
                if (v[c] > level) idx |= 1 << c;
            }
            if (idx == 0 || idx == 15) continue;

            // edge e joins corner e and corner (e + 1) % 4
            auto cut = [&](int e) {
                const int a = e;
                const int b = (e + 1) % 4;
                const double t = (level - v[a]) / (v[b] - v[a]);
                return p[a] + t * (p[b] - p[a]);
            };
            auto emit = [&](int e1, int e2) { out.push_back({cut(e1), cut(e2), i, j}); };

            const double center = 0.25 * (v[0] + v[1] + v[2] + v[3]);
            switch (idx) {
            case 1: case 14: emit(3, 0); break;
            case 2: case 13: emit(0, 1); break;
            case 3: case 12: emit(3, 1); break;
            case 4: case 11: emit(1, 2); break;
            case 6: case 9: emit(0, 2); break;
            case 7: case 8: emit(3, 2); break;
            case 5:
                if (center > level) {
                    emit(0, 1);
                    emit(2, 3);
                } else {
                    emit(3, 0);
                    emit(1, 2);
                }
                break;
            case 10:
                if (center > level) {
                    emit(3, 0);
                    emit(1, 2);
                } else {
                    emit(0, 1);
                    emit(2, 3);
                }
                break;
            default: break;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// SVG

namespace {

constexpr std::array<const char*, 7> kPalette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                              "#9467bd", "#8c564b", "#e377c2"};
constexpr const char* kUnlabeled = "#999999";

constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 50.0;

const char* palette(int index) {
    if (index < 0) return kUnlabeled;
    return kPalette[static_cast<std::size_t>(index) % kPalette.size()];
}

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string px(double v) {
    std::string s = fmt::format("{:.2f}", v);
    return s == "-0.00" ? "0.00" : s;
}

// Ramp from deep blue (t = 0) to pale yellow (t = 1).
std::string level_color(double t) {
    const double from[3] = {30, 40, 110};
    const double to[3] = {235, 200, 60};
    int rgb[3];
    for (int c = 0; c < 3; ++c) rgb[c] = static_cast<int>(std::lround(from[c] + t * (to[c] - from[c])));
    return fmt::format("#{:02x}{:02x}{:02x}", rgb[0], rgb[1], rgb[2]);
}

std::vector<double> nice_ticks(double lo, double hi) {
    const double span = hi - lo;
    if (!(span > 0.0)) return {lo};
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * mag;
        if (step >= raw) break;
    }
    std::vector<double> ticks;
    const double first = std::ceil(lo / step);
    for (int n = 0;; ++n) {
        const double t = (first + n) * step;
        if (t > hi + 1e-9 * span) break;
        ticks.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
    }
    return ticks;
}

class SvgWriter {
public:
    SvgWriter(const PlotSpec& spec, const PlotFrame& frame) : spec_(spec), frame_(frame) {
        fmt::format_to(std::back_inserter(buf_),
                       "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                       "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" height=\"{1}\" "
                       "viewBox=\"0 0 {0} {1}\">\n",
                       spec.width, spec.height);
        if (!spec.title.empty()) line(fmt::format("<title>{}</title>", xml_escape(spec.title)));
        line(fmt::format("<defs><clipPath id=\"plot-area\"><rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/>"
                         "</clipPath></defs>",
                         px(frame.left), px(frame.top), px(frame.width), px(frame.height)));
        line(fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>", spec.width,
                         spec.height));
    }

    void line(std::string_view s) {
        buf_.append(s.begin(), s.end());
        buf_.push_back('\n');
    }

    void frame_and_labels() {
        line(fmt::format("<rect class=\"frame\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" "
                         "stroke=\"#000000\" stroke-width=\"1\"/>",
                         px(frame_.left), px(frame_.top), px(frame_.width), px(frame_.height)));
        if (!spec_.title.empty()) {
            line(fmt::format("<text class=\"title\" x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
                             "font-size=\"15\">{}</text>",
                             px(spec_.width / 2.0), xml_escape(spec_.title)));
        }
        line(fmt::format("<text class=\"xlabel\" x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" "
                         "font-size=\"12\">{}</text>",
                         px(frame_.left + frame_.width / 2.0), px(spec_.height - 10.0), xml_escape(spec_.x_label)));
        const double ly = frame_.top + frame_.height / 2.0;
        line(fmt::format("<text class=\"ylabel\" x=\"16\" y=\"{0}\" text-anchor=\"middle\" font-family=\"sans-serif\" "
                         "font-size=\"12\" transform=\"rotate(-90 16 {0})\">{1}</text>",
                         px(ly), xml_escape(spec_.y_label)));
    }

    void x_ticks(const std::vector<double>& ticks) {
        const double y0 = frame_.top + frame_.height;
        for (double t : ticks) {
            const double x = frame_.to_pixel({t, frame_.data.y_lo}).x;
            line(fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#000000\"/>", px(x), px(y0),
                             px(y0 + 5.0)));
            line(fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" "
                             "font-size=\"10\">{:g}</text>",
                             px(x), px(y0 + 17.0), t));
        }
    }

    // `label` formats each tick value.
    template <typename Label>
    void y_ticks(const std::vector<double>& ticks, Label label) {
        for (double t : ticks) {
            const double y = frame_.to_pixel({frame_.data.x_lo, t}).y;
            line(fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"#000000\"/>",
                             px(frame_.left - 5.0), px(y), px(frame_.left)));
            line(fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"sans-serif\" "
                             "font-size=\"10\">{}</text>",
                             px(frame_.left - 8.0), px(y + 3.5), label(t)));
        }
    }

    void legend(const std::vector<std::pair<std::string, std::string>>& entries) {
        if (entries.empty()) return;
        const double x = frame_.left + frame_.width - 110.0;
        double y = frame_.top + 14.0;
        line("<g class=\"legend\">");
        line(fmt::format("<rect x=\"{}\" y=\"{}\" width=\"104\" height=\"{}\" fill=\"#ffffff\" fill-opacity=\"0.85\" "
                         "stroke=\"#cccccc\"/>",
                         px(x - 6.0), px(y - 12.0), px(15.0 * static_cast<double>(entries.size()) + 4.0)));
        for (const auto& [label, color] : entries) {
            line(fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" stroke-width=\"2\"/>",
                             px(x), px(y - 4.0), px(x + 18.0), color));
            line(fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>",
                             px(x + 24.0), px(y), xml_escape(label)));
            y += 15.0;
        }
        line("</g>");
    }

    std::string points(const std::vector<Vec2>& data) const {
        std::string s;
        for (const Vec2& p : data) {
            const Vec2 q = frame_.to_pixel(p);
            if (!s.empty()) s += ' ';
            s += px(q.x);
            s += ',';
            s += px(q.y);
        }
        return s;
    }

    const PlotFrame& frame() const { return frame_; }

    std::string finish() {
        line("</svg>");
        return fmt::to_string(buf_);
    }

private:
    const PlotSpec& spec_;
    PlotFrame frame_;
    fmt::memory_buffer buf_;
};

std::string render_contour(const PlotSpec& spec, const ContourPayload& payload) {
    const ContourGrid& grid = payload.grid;
    if (grid.values.empty()) throw Error(ErrorCode::EmptyPayload, "contour plot without grid samples");
    grid.validate();

    SvgWriter w(spec, PlotFrame::for_spec(spec, grid.domain));
    const auto levels = contour_levels(grid, spec.contour_levels);
    w.line("<g class=\"contours\" clip-path=\"url(#plot-area)\" fill=\"none\" stroke-width=\"1\">");
    for (std::size_t li = 0; li < levels.size(); ++li) {
        const auto segs = marching_squares(grid, levels[li]);
        if (segs.empty()) continue;
        std::string d;
        for (const auto& s : segs) {
            const Vec2 a = w.frame().to_pixel(s.a);
            const Vec2 b = w.frame().to_pixel(s.b);
            d += fmt::format("M{},{}L{},{}", px(a.x), px(a.y), px(b.x), px(b.y));
        }
        const double t = levels.size() == 1 ? 0.0 : static_cast<double>(li) / (levels.size() - 1);
        w.line(fmt::format("<path class=\"iso\" data-level=\"{}\" data-value=\"{}\" stroke=\"{}\" d=\"{}\"/>", li,
                           levels[li], level_color(t), d));
    }
    w.line("</g>");

    std::vector<std::pair<std::string, std::string>> legend;
    w.line("<g class=\"trajectories\" clip-path=\"url(#plot-area)\">");
    for (const Trace& tr : payload.trajectories) {
        if (tr.records.empty()) continue;
        const char* color = palette(method_color_index(tr.method));
        std::vector<Vec2> pts;
        for (const auto& r : tr.records) pts.push_back(r.point);
        const std::string name(method_name(tr.method));
        w.line(fmt::format("<polyline class=\"trajectory\" data-method=\"{}\" fill=\"none\" stroke=\"{}\" "
                           "stroke-width=\"1.5\" points=\"{}\"/>",
                           name, color, w.points(pts)));
        const Vec2 s = w.frame().to_pixel(pts.front());
        const Vec2 e = w.frame().to_pixel(pts.back());
        w.line(fmt::format("<circle class=\"start\" data-method=\"{}\" cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"none\" "
                           "stroke=\"{}\" stroke-width=\"1.5\"/>",
                           name, px(s.x), px(s.y), color));
        w.line(fmt::format("<circle class=\"end\" data-method=\"{}\" cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{}\"/>", name,
                           px(e.x), px(e.y), color));
        legend.emplace_back(name, color);
    }
    w.line("</g>");

    w.frame_and_labels();
    w.x_ticks(nice_ticks(grid.domain.x_lo, grid.domain.x_hi));
    w.y_ticks(nice_ticks(grid.domain.y_lo, grid.domain.y_hi), [](double t) { return fmt::format("{:g}", t); });
    w.legend(legend);
    return w.finish();
}

std::string render_errors(const PlotSpec& spec, const ErrorSeriesPayload& payload) {
    std::size_t longest = 0;
    double min_pos = std::numeric_limits<double>::infinity();
    double max_val = 0.0;
    for (const auto& s : payload.series) {
        longest = std::max(longest, s.values.size());
        for (double v : s.values) {
            if (!std::isfinite(v)) continue;
            if (v > 0.0) min_pos = std::min(min_pos, v);
            max_val = std::max(max_val, v);
        }
    }
    if (longest == 0) throw Error(ErrorCode::EmptyPayload, "error-series plot without values");
    if (!std::isfinite(min_pos)) min_pos = 1.0;

    auto transform = [&](double v) {
        if (!std::isfinite(v)) v = max_val;
        if (!spec.log_y) return v;
        return std::log10(std::max(v, min_pos));
    };
    const double x_hi = longest > 1 ? static_cast<double>(longest - 1) : 1.0;
    double y_lo = 0.0;
    double y_hi = 0.0;
    if (spec.log_y) {
        y_lo = std::floor(std::log10(min_pos));
        y_hi = std::ceil(std::log10(std::max(max_val, min_pos)));
        if (y_hi <= y_lo) y_hi = y_lo + 1.0;
    } else {
        y_hi = max_val > 0.0 ? max_val * 1.05 : 1.0;
    }
    SvgWriter w(spec, PlotFrame::for_spec(spec, Rect{0.0, x_hi, y_lo, y_hi}));

    std::vector<std::pair<std::string, std::string>> legend;
    w.line("<g class=\"series\" clip-path=\"url(#plot-area)\">");
    for (const auto& s : payload.series) {
        if (s.values.empty()) continue;
        std::vector<Vec2> pts;
        for (std::size_t k = 0; k < s.values.size(); ++k) pts.push_back({static_cast<double>(k), transform(s.values[k])});
        const char* color = palette(s.color_index);
        w.line(fmt::format("<polyline class=\"error-series\" data-label=\"{}\" fill=\"none\" stroke=\"{}\" "
                           "stroke-width=\"1.5\" points=\"{}\"/>",
                           xml_escape(s.label), color, w.points(pts)));
        legend.emplace_back(s.label, color);
    }
    w.line("</g>");

    w.frame_and_labels();
    w.x_ticks(nice_ticks(0.0, x_hi));
    if (spec.log_y) {
        std::vector<double> decades;
        const double step = std::max(1.0, std::ceil((y_hi - y_lo) / 8.0));
        for (double d = y_lo; d <= y_hi + 1e-9; d += step) decades.push_back(d);
        w.y_ticks(decades, [](double t) { return fmt::format("1e{}", static_cast<int>(std::lround(t))); });
    } else {
        w.y_ticks(nice_ticks(y_lo, y_hi), [](double t) { return fmt::format("{:g}", t); });
    }
    w.legend(legend);
    return w.finish();
}

Rect sweep_window(const SweepPayload& payload) {
    if (payload.domain) return *payload.domain;
    Rect r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
           std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    auto grow = [&](Vec2 p) {
        if (!p.finite()) return;
        r.x_lo = std::min(r.x_lo, p.x);
        r.x_hi = std::max(r.x_hi, p.x);
        r.y_lo = std::min(r.y_lo, p.y);
        r.y_hi = std::max(r.y_hi, p.y);
    };
    for (Vec2 p : payload.sweep.starts) grow(p);
    for (Vec2 p : payload.sweep.finals) grow(p);
    if (!(r.x_lo <= r.x_hi)) return {-1.0, 1.0, -1.0, 1.0};
    const double pad_x = r.width() > 0.0 ? 0.05 * r.width() : 1.0;
    const double pad_y = r.height() > 0.0 ? 0.05 * r.height() : 1.0;
    return {r.x_lo - pad_x, r.x_hi + pad_x, r.y_lo - pad_y, r.y_hi + pad_y};
}

std::string render_sweep(const PlotSpec& spec, const SweepPayload& payload) {
    const SweepResult& sw = payload.sweep;
    if (sw.size() == 0) throw Error(ErrorCode::EmptyPayload, "sweep plot without starts");
    if (sw.finals.size() != sw.size() || sw.basin_labels.size() != sw.size()) {
        throw Error(ErrorCode::InvalidArgument, "sweep lists have different lengths");
    }
    const Rect window = sweep_window(payload);
    SvgWriter w(spec, PlotFrame::for_spec(spec, window));

    w.line("<g class=\"sweep\" clip-path=\"url(#plot-area)\">");
    for (std::size_t i = 0; i < sw.size(); ++i) {
        const char* color = palette(sw.basin_labels[i]);
        const Vec2 s = w.frame().to_pixel(sw.starts[i]);
        w.line(fmt::format("<circle class=\"start\" data-basin=\"{}\" cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"none\" "
                           "stroke=\"{}\"/>",
                           sw.basin_labels[i], px(s.x), px(s.y), color));
    }
    for (std::size_t i = 0; i < sw.size(); ++i) {
        if (!sw.finals[i].finite()) continue;
        const char* color = palette(sw.basin_labels[i]);
        const Vec2 f = w.frame().to_pixel(sw.finals[i]);
        w.line(fmt::format("<rect class=\"final\" data-basin=\"{}\" x=\"{}\" y=\"{}\" width=\"5\" height=\"5\" "
                           "fill=\"{}\"/>",
                           sw.basin_labels[i], px(f.x - 2.5), px(f.y - 2.5), color));
    }
    w.line("</g>");

    w.frame_and_labels();
    w.x_ticks(nice_ticks(window.x_lo, window.x_hi));
    w.y_ticks(nice_ticks(window.y_lo, window.y_hi), [](double t) { return fmt::format("{:g}", t); });

    std::vector<int> labels(sw.basin_labels.begin(), sw.basin_labels.end());
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    std::vector<std::pair<std::string, std::string>> legend;
    for (int l : labels) legend.emplace_back(l < 0 ? "no basin" : fmt::format("basin {}", l), palette(l));
    w.legend(legend);
    return w.finish();
}

} // namespace

int method_color_index(Method m) {
    const auto& all = all_methods();
    return static_cast<int>(std::find(all.begin(), all.end(), m) - all.begin());
}

PlotFrame PlotFrame::for_spec(const PlotSpec& spec, const Rect& data) {
    if (spec.width <= kMarginLeft + kMarginRight || spec.height <= kMarginTop + kMarginBottom) {
        throw Error(ErrorCode::InvalidArgument, "plot size too small for its margins");
    }
    if (!(data.width() > 0.0) || !(data.height() > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "plot data window has zero area");
    }
    return {data, kMarginLeft, kMarginTop, spec.width - kMarginLeft - kMarginRight,
            spec.height - kMarginTop - kMarginBottom};
}

Vec2 PlotFrame::to_pixel(Vec2 p) const {
    return {left + (p.x - data.x_lo) / data.width() * width, top + (data.y_hi - p.y) / data.height() * height};
}

std::string render_svg(const PlotSpec& spec, const PlotPayload& payload) {
    switch (spec.kind) {
    case PlotKind::ContourWithTrajectories:
        if (const auto* p = std::get_if<ContourPayload>(&payload)) return render_contour(spec, *p);
        break;
    case PlotKind::ErrorSeries:
        if (const auto* p = std::get_if<ErrorSeriesPayload>(&payload)) return render_errors(spec, *p);
        break;
    case PlotKind::SweepScatter:
        if (const auto* p = std::get_if<SweepPayload>(&payload)) return render_sweep(spec, *p);
        break;
    }
    throw Error(ErrorCode::InvalidArgument, "plot payload does not match the plot kind");
}

void emit_svg(const PlotSpec& spec, const PlotPayload& payload, const std::filesystem::path& path) {
    write_text_file(path, render_svg(spec, payload));
}

// ---------------------------------------------------------------------------
// JSON

namespace {

ojson vec_json(Vec2 v) { return ojson::array({v.x, v.y}); }

Vec2 vec_from(const ojson& j) {
    if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::SchemaMismatch, "expected a 2-element array");
    return {j[0].get<double>(), j[1].get<double>()};
}

} // namespace

std::string trace_to_json(const Trace& trace) {
    ojson j;
    j["schema"] = kTraceSchema;
    j["function"] = trace.function_name;
    j["method"] = method_name(trace.method);
    j["x0"] = vec_json(trace.x0);
    j["termination"] = to_string(trace.termination);
    j["counters"] = {{"n_f", trace.counters.n_f}, {"n_grad", trace.counters.n_grad}, {"n_hess", trace.counters.n_hess}};
    ojson records = ojson::array();
    for (const auto& r : trace.records) {
        ojson o;
        o["k"] = r.k;
        o["point"] = vec_json(r.point);
        o["f"] = r.f_value;
        o["grad"] = vec_json(r.grad);
        o["grad_norm"] = r.grad_norm;
        o["direction"] = vec_json(r.direction);
        o["alpha"] = r.alpha;
        o["damping"] = r.damping;
        records.push_back(std::move(o));
    }
    j["records"] = std::move(records);
    return j.dump(1) + "\n";
}

Trace trace_from_json(std::string_view text) {
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const ojson::exception& e) {
        throw Error(ErrorCode::SchemaMismatch, std::string("trace JSON does not parse: ") + e.what());
    }
    if (!j.is_object() || !j.contains("schema") || !j["schema"].is_string() || j["schema"].get<std::string>() != kTraceSchema) {
        throw Error(ErrorCode::SchemaMismatch, "expected schema tag \"" + std::string(kTraceSchema) + "\"");
    }
    Trace t;
    try {
        t.function_name = j.at("function").get<std::string>();
        t.method = parse_method(j.at("method").get<std::string>());
        t.x0 = vec_from(j.at("x0"));
        t.termination = parse_termination(j.at("termination").get<std::string>());
        const ojson& c = j.at("counters");
        t.counters = {c.at("n_f").get<std::int64_t>(), c.at("n_grad").get<std::int64_t>(),
                      c.at("n_hess").get<std::int64_t>()};
        for (const ojson& o : j.at("records")) {
            IterationRecord r;
            r.k = o.at("k").get<int>();
            r.point = vec_from(o.at("point"));
            r.f_value = o.at("f").get<double>();
            r.grad = vec_from(o.at("grad"));
            r.grad_norm = o.at("grad_norm").get<double>();
            r.direction = vec_from(o.at("direction"));
            r.alpha = o.at("alpha").get<double>();
            r.damping = o.at("damping").get<double>();
            t.records.push_back(r);
        }
        t.validate();
    } catch (const ojson::exception& e) {
        throw Error(ErrorCode::SchemaMismatch, std::string("malformed trace: ") + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::SchemaMismatch) throw;
        throw Error(ErrorCode::SchemaMismatch, std::string("malformed trace: ") + e.what());
    }
    return t;
}

void write_trace_json(const Trace& trace, const std::filesystem::path& path) {
    write_text_file(path, trace_to_json(trace));
}

Trace read_trace_json(const std::filesystem::path& path) { return trace_from_json(read_text_file(path)); }

// ---------------------------------------------------------------------------
// CSV

namespace {

constexpr std::string_view kSweepHeader = "x0,y0,xf,yf,ff,iters,basin";

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) return out;
        start = pos + 1;
    }
}

template <typename T>
T parse_field(std::string_view f, std::size_t line_no) {
    T value{};
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
    if (ec != std::errc{} || ptr != f.data() + f.size()) {
        throw Error(ErrorCode::SchemaMismatch, fmt::format("sweep CSV line {}: bad field '{}'", line_no, f));
    }
    return value;
}

} // namespace

std::string trace_csv(const Trace& trace) {
    std::string out = "k,x,y,f,grad_norm,alpha\n";
    for (const auto& r : trace.records) {
        fmt::format_to(std::back_inserter(out), "{},{},{},{},{},{}\n", r.k, r.point.x, r.point.y, r.f_value,
                       r.grad_norm, r.alpha);
    }
    return out;
}

std::string sweep_csv(const SweepResult& sweep) {
    std::string out(kSweepHeader);
    out += '\n';
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        fmt::format_to(std::back_inserter(out), "{},{},{},{},{},{},{}\n", sweep.starts[i].x, sweep.starts[i].y,
                       sweep.finals[i].x, sweep.finals[i].y, sweep.final_values[i], sweep.iterations[i],
                       sweep.basin_labels[i]);
    }
    return out;
}

std::string summary_csv(const BenchReport& report) {
    std::string out = "function,method,x0,y0,xf,yf,ff,iters,termination,n_f,n_grad,n_hess\n";
    for (std::size_t i = 0; i < report.cases.size() && i < report.summaries.size(); ++i) {
        const BenchCase& c = report.cases[i];
        const CaseSummary& s = report.summaries[i];
        fmt::format_to(std::back_inserter(out), "{},{},{},{},{},{},{},{},{},{},{},{}\n", c.function_name,
                       c.method_name, c.x0.x, c.x0.y, s.final_point.x, s.final_point.y, s.final_value, s.iterations,
                       to_string(s.termination), s.counters.n_f, s.counters.n_grad, s.counters.n_hess);
    }
    return out;
}

void write_csv(const Trace& trace, const std::filesystem::path& path) { write_text_file(path, trace_csv(trace)); }
void write_csv(const SweepResult& sweep, const std::filesystem::path& path) { write_text_file(path, sweep_csv(sweep)); }
void write_csv(const BenchReport& report, const std::filesystem::path& path) {
    write_text_file(path, summary_csv(report));
}

SweepResult read_sweep_csv(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    std::vector<std::string_view> lines = split(text, '\n');
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    if (lines.empty() || lines.front() != kSweepHeader) {
        throw Error(ErrorCode::SchemaMismatch, "sweep CSV header must be '" + std::string(kSweepHeader) + "'");
    }
    SweepResult r;
    for (std::size_t n = 1; n < lines.size(); ++n) {
        const auto f = split(lines[n], ',');
        if (f.size() != 7) throw Error(ErrorCode::SchemaMismatch, fmt::format("sweep CSV line {}: expected 7 fields", n + 1));
        r.starts.push_back({parse_field<double>(f[0], n + 1), parse_field<double>(f[1], n + 1)});
        r.finals.push_back({parse_field<double>(f[2], n + 1), parse_field<double>(f[3], n + 1)});
        r.final_values.push_back(parse_field<double>(f[4], n + 1));
        r.iterations.push_back(parse_field<int>(f[5], n + 1));
        r.basin_labels.push_back(parse_field<int>(f[6], n + 1));
    }
    return r;
}

// ---------------------------------------------------------------------------
// Files

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw Error(ErrorCode::Io, "read failed for '" + path.string() + "'");
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

} // namespace gradbench
