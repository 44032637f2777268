#include "gradbench/core.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace gradbench {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::NonDescentDirection: return "NonDescentDirection";
    case ErrorCode::LineSearchFailed: return "LineSearchFailed";
    case ErrorCode::DegenerateState: return "DegenerateState";
    case ErrorCode::UnknownName: return "UnknownName";
    case ErrorCode::UnknownMinima: return "UnknownMinima";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::EmptyPayload: return "EmptyPayload";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

double norm(Vec2 v) { return std::hypot(v.x, v.y); }

bool Mat2::finite() const noexcept {
    return std::isfinite(a11) && std::isfinite(a12) && std::isfinite(a21) && std::isfinite(a22);
}

bool Mat2::is_symmetric(double tol) const {
    const double scale = std::max({1.0, std::abs(a12), std::abs(a21)});
    return std::abs(a12 - a21) <= tol * scale;
}

Mat2 Mat2::symmetrized() const {
    const double off = 0.5 * (a12 + a21);
    return {a11, off, off, a22};
}

Vec2 solve2x2(const Mat2& a, Vec2 b) {
    if (!a.finite() || !b.finite()) {
        throw Error(ErrorCode::NonFiniteValue, "solve2x2: non-finite input");
    }
    const double row1 = std::hypot(a.a11, a.a12);
    const double row2 = std::hypot(a.a21, a.a22);
    const double scale = std::max(row1, row2);
    const double det = a.det();
    if (scale == 0.0 || std::abs(det) <= 1e-14 * scale * scale) {
        throw Error(ErrorCode::SingularMatrix, "solve2x2: matrix is singular to working precision");
    }
    return {(b.x * a.a22 - a.a12 * b.y) / det, (a.a11 * b.y - a.a21 * b.x) / det};
}

std::optional<Vec2> solve_spd2x2(const Mat2& a, Vec2 b) {
    // A = L L^T with L = [[l11, 0], [l21, l22]]
    if (!(a.a11 > 0.0)) return std::nullopt;
    const double l11 = std::sqrt(a.a11);
    const double l21 = a.a21 / l11;
    const double rem = a.a22 - l21 * l21;
    if (!(rem > 1e-14 * std::max(std::abs(a.a22), std::abs(a.a11)))) return std::nullopt;
    const double l22 = std::sqrt(rem);
    const double z1 = b.x / l11;
    const double z2 = (b.y - l21 * z1) / l22;
    const double x2 = z2 / l22;
    const double x1 = (z1 - l21 * x2) / l11;
    return Vec2{x1, x2};
}

namespace {

constexpr std::array<std::pair<Method, std::string_view>, 7> kMethodNames{{
    {Method::SteepestDescent, "sd"},
    {Method::CgFletcherReeves, "cg-fr"},
    {Method::CgPolakRibiere, "cg-pr"},
    {Method::Newton, "newton"},
    {Method::QuasiNewtonDfp, "dfp"},
    {Method::QuasiNewtonBfgs, "bfgs"},
    {Method::LevenbergMarquardt, "lm"},
}};

constexpr std::array<std::pair<LineSearchKind, std::string_view>, 3> kLineSearchNames{{
    {LineSearchKind::ExactGoldenSection, "golden"},
    {LineSearchKind::BacktrackingArmijo, "armijo"},
    {LineSearchKind::FixedUnitStep, "fixed"},
}};

constexpr std::array<std::pair<Termination, std::string_view>, 6> kTerminationNames{{
    {Termination::GradToleranceMet, "GradToleranceMet"},
    {Termination::StepToleranceMet, "StepToleranceMet"},
    {Termination::MaxIterReached, "MaxIterReached"},
    {Termination::LineSearchFailed, "LineSearchFailed"},
    {Termination::SingularHessian, "SingularHessian"},
    {Termination::NonFiniteValue, "NonFiniteValue"},
}};

template <typename Enum, std::size_t N>
std::string_view lookup_name(const std::array<std::pair<Enum, std::string_view>, N>& table, Enum value) {
    for (const auto& [e, name] : table) {
        if (e == value) return name;
    }
    return "unknown";
}

template <typename Enum, std::size_t N>
Enum lookup_value(const std::array<std::pair<Enum, std::string_view>, N>& table, std::string_view name,
                  std::string_view what) {
    for (const auto& [e, n] : table) {
        if (n == name) return e;
    }
    throw Error(ErrorCode::UnknownName, std::string(what) + " '" + std::string(name) + "'");
}

} // namespace

std::string_view method_name(Method m) { return lookup_name(kMethodNames, m); }
Method parse_method(std::string_view name) { return lookup_value(kMethodNames, name, "method"); }

const std::vector<Method>& all_methods() {
    static const std::vector<Method> methods = [] {
        std::vector<Method> out;
        for (const auto& entry : kMethodNames) out.push_back(entry.first);
        return out;
    }();
    return methods;
}

std::string_view to_string(LineSearchKind k) { return lookup_name(kLineSearchNames, k); }
LineSearchKind parse_line_search(std::string_view name) {
    return lookup_value(kLineSearchNames, name, "line search");
}

std::string_view to_string(Termination t) { return lookup_name(kTerminationNames, t); }
Termination parse_termination(std::string_view name) {
    return lookup_value(kTerminationNames, name, "termination");
}

void OptimizerConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw Error(ErrorCode::InvalidConfig, what);
    };
    require(grad_tol > 0.0, "grad_tol must be > 0");
    require(step_tol >= 0.0, "step_tol must be >= 0");
    require(max_iter >= 1, "max_iter must be >= 1");
    require(ls.armijo_c1 > 0.0 && ls.armijo_c1 < 1.0, "Armijo c1 must lie in (0, 1)");
    require(ls.armijo_rho > 0.0 && ls.armijo_rho < 1.0, "Armijo rho must lie in (0, 1)");
    require(ls.armijo_alpha_init > 0.0, "Armijo initial alpha must be > 0");
    require(ls.bracket_growth > 1.0, "bracket growth must be > 1");
    require(ls.bracket_alpha_scale > 0.0, "bracket alpha scale must be > 0");
    require(ls.golden_tol > 0.0, "golden-section tolerance must be > 0");
    require(lm_lambda0 > 0.0, "lm_lambda0 must be > 0");
    require(lm_increase > 1.0, "lm_increase must be > 1");
    require(lm_decrease > 0.0 && lm_decrease < 1.0, "lm_decrease must lie in (0, 1)");
    require(cg_restart_period >= 1, "cg_restart_period must be >= 1");
}

LineSearchKind default_line_search(Method m, bool newton_pure_step) {
    switch (m) {
    case Method::SteepestDescent:
    case Method::CgFletcherReeves:
    case Method::CgPolakRibiere:
    case Method::QuasiNewtonDfp:
    case Method::QuasiNewtonBfgs: return LineSearchKind::ExactGoldenSection;
    case Method::Newton: return newton_pure_step ? LineSearchKind::FixedUnitStep : LineSearchKind::BacktrackingArmijo;
    case Method::LevenbergMarquardt: return LineSearchKind::FixedUnitStep;
    }
    return LineSearchKind::FixedUnitStep;
}

LineSearchKind effective_line_search(const OptimizerConfig& cfg) {
    if (cfg.method == Method::LevenbergMarquardt) return LineSearchKind::FixedUnitStep;
    return cfg.line_search.value_or(default_line_search(cfg.method, cfg.newton_pure_step));
}

IterationRecord make_record(int k, Vec2 point, double f, Vec2 grad, Vec2 direction, double alpha, double damping) {
    if (!point.finite() || !std::isfinite(f) || !grad.finite() || !direction.finite() || !std::isfinite(alpha) ||
        !std::isfinite(damping)) {
        throw Error(ErrorCode::NonFiniteValue, "iteration record with non-finite field at k=" + std::to_string(k));
    }
    return IterationRecord{k, point, f, grad, norm(grad), direction, alpha, damping};
}

void Trace::validate() const {
    if (records.empty()) throw Error(ErrorCode::InvalidArgument, "trace has no records");
    if (!(records.front().point == x0)) throw Error(ErrorCode::InvalidArgument, "records[0].point != x0");
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].k != static_cast<int>(i)) {
            throw Error(ErrorCode::InvalidArgument, "record index is not consecutive from 0");
        }
    }
    if (counters.n_f < 0 || counters.n_grad < 0 || counters.n_hess < 0) {
        throw Error(ErrorCode::InvalidArgument, "negative evaluation counter");
    }
}

} // namespace gradbench
