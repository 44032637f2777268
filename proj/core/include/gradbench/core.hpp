#ifndef GRADBENCH_CORE_HPP
#define GRADBENCH_CORE_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gradbench {

enum class ErrorCode {
    InvalidArgument,
    InvalidConfig,
    SingularMatrix,
    NonFiniteValue,
    BracketFailure,
    NonDescentDirection,
    LineSearchFailed,
    DegenerateState,
    UnknownName,
    UnknownMinima,
    SchemaMismatch,
    EmptyPayload,
    Io,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; the code identifies the failure.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what);
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    bool finite() const noexcept { return std::isfinite(x) && std::isfinite(y); }

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
    friend constexpr bool operator==(Vec2, Vec2) = default;
};

using DesignPoint = Vec2;

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
double norm(Vec2 v);

/// Dense 2x2 matrix, row-major naming.
struct Mat2 {
    double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

    static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static constexpr Mat2 zero() { return {}; }

    constexpr double det() const { return a11 * a22 - a12 * a21; }
    constexpr double trace() const { return a11 + a22; }
    constexpr Mat2 transposed() const { return {a11, a21, a12, a22}; }
    bool finite() const noexcept;

    /// |a12 - a21| <= tol * max(1, |a12|, |a21|)
    bool is_symmetric(double tol = 1e-12) const;
    Mat2 symmetrized() const;

    friend constexpr Vec2 operator*(const Mat2& m, Vec2 v) {
        return {m.a11 * v.x + m.a12 * v.y, m.a21 * v.x + m.a22 * v.y};
    }
    friend constexpr Mat2 operator*(const Mat2& a, const Mat2& b) {
        return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
                a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
    }
    friend constexpr Mat2 operator+(const Mat2& a, const Mat2& b) {
        return {a.a11 + b.a11, a.a12 + b.a12, a.a21 + b.a21, a.a22 + b.a22};
    }
    friend constexpr Mat2 operator-(const Mat2& a, const Mat2& b) {
        return {a.a11 - b.a11, a.a12 - b.a12, a.a21 - b.a21, a.a22 - b.a22};
    }
    friend constexpr Mat2 operator*(double s, const Mat2& a) {
        return {s * a.a11, s * a.a12, s * a.a21, s * a.a22};
    }
    friend constexpr bool operator==(const Mat2&, const Mat2&) = default;
};

constexpr Mat2 outer(Vec2 a, Vec2 b) { return {a.x * b.x, a.x * b.y, a.y * b.x, a.y * b.y}; }

/// Solves A x = b by Cramer's rule. Throws SingularMatrix when
/// |det A| <= 1e-14 * (largest row norm)^2.
Vec2 solve2x2(const Mat2& a, Vec2 b);

/// Solves A x = b via a symmetric 2x2 Cholesky factorization.
/// Returns nullopt when A is not numerically positive definite.
std::optional<Vec2> solve_spd2x2(const Mat2& a, Vec2 b);

enum class Method { SteepestDescent, CgFletcherReeves, CgPolakRibiere, Newton, QuasiNewtonDfp, QuasiNewtonBfgs, LevenbergMarquardt };

enum class LineSearchKind { ExactGoldenSection, BacktrackingArmijo, FixedUnitStep };

enum class Termination { GradToleranceMet, StepToleranceMet, MaxIterReached, LineSearchFailed, SingularHessian, NonFiniteValue };

/// CLI names: "sd", "cg-fr", "cg-pr", "newton", "dfp", "bfgs", "lm".
std::string_view method_name(Method m);
Method parse_method(std::string_view name);
const std::vector<Method>& all_methods();

std::string_view to_string(LineSearchKind k);
LineSearchKind parse_line_search(std::string_view name);

std::string_view to_string(Termination t);
Termination parse_termination(std::string_view name);

/// GradToleranceMet or StepToleranceMet.
constexpr bool converged(Termination t) {
    return t == Termination::GradToleranceMet || t == Termination::StepToleranceMet;
}

struct LineSearchParams {
    double bracket_growth = 2.0;
    /// Initial bracketing step is bracket_alpha_scale / (1 + |d|).
    double bracket_alpha_scale = 1e-3;
    double golden_tol = 1e-10;
    double armijo_c1 = 1e-4;
    double armijo_rho = 0.5;
    double armijo_alpha_init = 1.0;
};

struct OptimizerConfig {
    Method method = Method::SteepestDescent;
    double grad_tol = 1e-6;
    double step_tol = 1e-12;
    int max_iter = 2000;
    /// When unset, the method's default is used (see default_line_search).
    std::optional<LineSearchKind> line_search;
    LineSearchParams ls;
    double lm_lambda0 = 1e-3;
    double lm_increase = 10.0;
    double lm_decrease = 0.1;
    bool newton_pure_step = true;
    int cg_restart_period = 2;

    /// Throws InvalidConfig on any violated bound.
    void validate() const;
};

LineSearchKind default_line_search(Method m, bool newton_pure_step = true);
LineSearchKind effective_line_search(const OptimizerConfig& cfg);

struct IterationRecord {
    int k = 0;
    Vec2 point;
    double f_value = 0.0;
    Vec2 grad;
    double grad_norm = 0.0;
    /// Direction used to leave this point; zero on the terminal record.
    Vec2 direction;
    /// Step taken from this point, so next.point == point + alpha * direction.
    double alpha = 0.0;
    /// Levenberg-Marquardt damping used for this trial; 0 for other methods.
    double damping = 0.0;

    friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

/// Builds a record, computing grad_norm. Throws NonFiniteValue on NaN/Inf input.
IterationRecord make_record(int k, Vec2 point, double f, Vec2 grad, Vec2 direction = {}, double alpha = 0.0,
                            double damping = 0.0);

struct EvalCounters {
    std::int64_t n_f = 0;
    std::int64_t n_grad = 0;
    std::int64_t n_hess = 0;

    friend bool operator==(const EvalCounters&, const EvalCounters&) = default;
};

struct Trace {
    std::vector<IterationRecord> records;
    Termination termination = Termination::MaxIterReached;
    EvalCounters counters;
    Method method = Method::SteepestDescent;
    std::string function_name;
    Vec2 x0;

    /// Steps taken: records.size() - 1.
    int iterations() const { return records.empty() ? 0 : static_cast<int>(records.size()) - 1; }
    const IterationRecord& final_record() const { return records.back(); }

    /// Throws InvalidArgument if the structural invariants do not hold.
    void validate() const;

    friend bool operator==(const Trace&, const Trace&) = default;
};

} // namespace gradbench

#endif
