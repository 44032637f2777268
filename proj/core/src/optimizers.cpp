#include "gradbench/optimizers.hpp"

#include <algorithm>
#include <cmath>

#include "gradbench/linesearch.hpp"

namespace gradbench {

Vec2 steepest_direction(Vec2 grad) { return -grad; }

double cg_beta(Vec2 grad, const CGState& state) {
    const double denom = dot(state.prev_grad, state.prev_grad);
    if (!(denom > 0.0)) throw Error(ErrorCode::DegenerateState, "previous gradient is zero");
    if (state.variant == CgVariant::FletcherReeves) return dot(grad, grad) / denom;
    return std::max(0.0, dot(grad, grad - state.prev_grad) / denom);
}

Vec2 cg_direction(Vec2 grad, const CGState& state, int k) {
    if (k == 0 || k % state.restart_period == 0) return steepest_direction(grad);
    return -grad + cg_beta(grad, state) * state.prev_dir;
}

Vec2 newton_direction(Vec2 grad, const Mat2& hess) {
    if (!hess.is_symmetric()) throw Error(ErrorCode::InvalidArgument, "Hessian is not symmetric");
    return solve2x2(hess, -grad);
}

Vec2 modified_newton_direction(Vec2 grad, const Mat2& hess) {
    if (!hess.is_symmetric()) throw Error(ErrorCode::InvalidArgument, "Hessian is not symmetric");
    if (auto d = solve_spd2x2(hess, -grad)) return *d;
    double tau = std::max(1e-3 * std::max(std::abs(hess.a11), std::abs(hess.a22)), 1e-8);
    for (int i = 0; i < 200; ++i, tau *= 2.0) {
        if (auto d = solve_spd2x2(hess + tau * Mat2::identity(), -grad)) return *d;
    }
    throw Error(ErrorCode::SingularMatrix, "could not make the Hessian positive definite");
}

bool curvature_ok(Vec2 s, Vec2 y) { return dot(y, s) > 1e-10 * norm(s) * norm(y); }

QuasiNewtonState quasi_newton_update(const QuasiNewtonState& state, Vec2 s, Vec2 y) {
    if (!s.finite() || !y.finite()) throw Error(ErrorCode::NonFiniteValue, "quasi-Newton update input");
    if (!curvature_ok(s, y)) return state;

    const Mat2& h = state.h_inv;
    const double sy = dot(s, y);
    Mat2 next;
    if (state.variant == QuasiNewtonVariant::Dfp) {
        const Vec2 hy = h * y;
        const double yhy = dot(y, hy);
        if (!(yhy > 0.0)) return state;
        next = h + (1.0 / sy) * outer(s, s) - (1.0 / yhy) * outer(hy, hy);
    } else {
        const double rho = 1.0 / sy;
        const Mat2 left = Mat2::identity() - rho * outer(s, y);
        const Mat2 right = Mat2::identity() - rho * outer(y, s);
        next = left * h * right + rho * outer(s, s);
    }
    return QuasiNewtonState{next.symmetrized(), s, y, state.variant};
}

Vec2 lm_direction(Vec2 grad, const Mat2& hess, double lambda) {
    return solve2x2(hess + lambda * Mat2::identity(), -grad);
}

namespace {

constexpr double kLambdaMin = 1e-15;
constexpr double kLambdaMax = 1e16;

bool uses_hessian(Method m) { return m == Method::Newton || m == Method::LevenbergMarquardt; }

class Run {
public:
    Run(const ObjectiveFunction& fn, Vec2 x0, const OptimizerConfig& cfg)
        : fn_(fn), cfg_(cfg), ls_(effective_line_search(cfg)), x_(x0), lambda_(cfg.lm_lambda0) {
        trace_.method = cfg.method;
        trace_.function_name = fn.name;
        trace_.x0 = x0;
        cg_.variant = cfg.method == Method::CgPolakRibiere ? CgVariant::PolakRibiere : CgVariant::FletcherReeves;
        cg_.restart_period = cfg.cg_restart_period;
        qn_.variant = cfg.method == Method::QuasiNewtonDfp ? QuasiNewtonVariant::Dfp : QuasiNewtonVariant::Bfgs;
    }

    Trace run() {
        f_ = value(x_);
        g_ = gradient(x_);
        if (!std::isfinite(f_) || !g_.finite()) {
            throw Error(ErrorCode::NonFiniteValue, "objective or gradient is non-finite at x0");
        }
        bool small_step = false;
        for (k_ = 0;; ++k_) {
            if (norm(g_) < cfg_.grad_tol) return finish(Termination::GradToleranceMet);
            if (small_step) return finish(Termination::StepToleranceMet);
            if (k_ >= cfg_.max_iter) return finish(Termination::MaxIterReached);

            Mat2 hess;
            if (uses_hessian(cfg_.method)) {
                hess = fn_.hessian(x_);
                ++trace_.counters.n_hess;
                if (!hess.finite()) return finish(Termination::NonFiniteValue);
            }

            if (cfg_.method == Method::LevenbergMarquardt) {
                const auto outcome = lm_step(hess);
                if (outcome == StepOutcome::NonFinite) return finish(Termination::NonFiniteValue);
                if (outcome == StepOutcome::TrialTooShort) return finish(Termination::StepToleranceMet);
                small_step = outcome == StepOutcome::SmallStep;
                continue;
            }

            Vec2 d;
            try {
                d = direction(hess);
            } catch (const Error& e) {
                if (e.code() == ErrorCode::SingularMatrix) return finish(Termination::SingularHessian);
                throw;
            }

            double alpha = 0.0;
            try {
                alpha = step_size(d);
            } catch (const Error& e) {
                // Every trial longer than step_tol failed to decrease f: the point is
                // stationary along d at working precision.
                if (e.code() == ErrorCode::LineSearchFailed && smallest_trial_step(d) < cfg_.step_tol) {
                    return finish(Termination::StepToleranceMet, d);
                }
                if (e.code() == ErrorCode::BracketFailure || e.code() == ErrorCode::NonDescentDirection ||
                    e.code() == ErrorCode::LineSearchFailed) {
                    return finish(Termination::LineSearchFailed, d);
                }
                throw;
            }

            const Vec2 x_new = x_ + alpha * d;
            const double f_new = value(x_new);
            const Vec2 g_new = gradient(x_new);
            if (!x_new.finite() || !std::isfinite(f_new) || !g_new.finite()) {
                return finish(Termination::NonFiniteValue, d);
            }
            trace_.records.push_back(make_record(k_, x_, f_, g_, d, alpha));

            if (cfg_.method == Method::CgFletcherReeves || cfg_.method == Method::CgPolakRibiere) {
                cg_.prev_grad = g_;
                cg_.prev_dir = d;
                ++since_restart_;
            } else if (cfg_.method == Method::QuasiNewtonDfp || cfg_.method == Method::QuasiNewtonBfgs) {
                qn_ = quasi_newton_update(qn_, x_new - x_, g_new - g_);
            }
            small_step = norm(x_new - x_) < cfg_.step_tol;
            x_ = x_new;
            f_ = f_new;
            g_ = g_new;
        }
    }

private:
    enum class StepOutcome { Accepted, SmallStep, Rejected, NonFinite, TrialTooShort };

    double value(Vec2 p) {
        ++trace_.counters.n_f;
        return fn_.value(p);
    }

    Vec2 gradient(Vec2 p) {
        ++trace_.counters.n_grad;
        return fn_.gradient(p);
    }

    Trace finish(Termination t, Vec2 failed_direction = {}) {
        Vec2 d = failed_direction.finite() ? failed_direction : Vec2{};
        const double damping = cfg_.method == Method::LevenbergMarquardt ? lambda_ : 0.0;
        trace_.records.push_back(make_record(k_, x_, f_, g_, d, 0.0, damping));
        trace_.termination = t;
        return std::move(trace_);
    }

    Vec2 direction(const Mat2& hess) {
        switch (cfg_.method) {
        case Method::SteepestDescent: return steepest_direction(g_);
        case Method::CgFletcherReeves:
        case Method::CgPolakRibiere: {
            Vec2 d = cg_direction(g_, cg_, since_restart_);
            if (!(dot(d, g_) < 0.0)) {
                since_restart_ = 0;
                d = steepest_direction(g_);
            } else if (since_restart_ % cg_.restart_period == 0) {
                since_restart_ = 0;
            }
            return d;
        }
        case Method::QuasiNewtonDfp:
        case Method::QuasiNewtonBfgs: {
            Vec2 d = -(qn_.h_inv * g_);
            if (!(dot(d, g_) < 0.0)) {
                qn_.h_inv = Mat2::identity();
                d = -(qn_.h_inv * g_);
            }
            return d;
        }
        case Method::Newton: {
            if (!cfg_.newton_pure_step) return modified_newton_direction(g_, hess);
            // Raw solve with unit step; an uphill solution is reversed.
            const Vec2 d = newton_direction(g_, hess);
            return dot(d, g_) > 0.0 ? -d : d;
        }
        case Method::LevenbergMarquardt: break;
        }
        throw Error(ErrorCode::InvalidArgument, "direction: unsupported method");
    }

    double step_size(Vec2 d) {
        if (ls_ == LineSearchKind::FixedUnitStep) return 1.0;
        const Vec2 x = x_;
        LineProblem lp{[this, x, d](double alpha) { return value(x + alpha * d); }, f_, dot(g_, d)};
        const LineSearchParams& p = cfg_.ls;
        if (ls_ == LineSearchKind::BacktrackingArmijo) {
            return backtracking_armijo(lp, p.armijo_alpha_init, p.armijo_c1, p.armijo_rho);
        }
        const double alpha_init = p.bracket_alpha_scale / (1.0 + norm(d));
        const Bracket br = bracket_minimum(lp, alpha_init, p.bracket_growth);
        return secant_polish(lp, br, golden_section(lp, br, p.golden_tol), d);
    }

    // Comparing f values only locates the line minimum to about sqrt(eps)
    // relative. One secant step on phi'(alpha) = grad . d through alpha = 0 and
    // the golden-section point recovers the full precision (exact on quadratics).
    // Kept only if it stays in the bracket, decreases f and reduces |phi'|.
    double secant_polish(const LineProblem& lp, const Bracket& br, double alpha, Vec2 d) {
        const Vec2 g_a = gradient(x_ + alpha * d);
        const double s_a = dot(g_a, d);
        if (!std::isfinite(s_a) || s_a == 0.0 || s_a == lp.dphi0) return alpha;
        const double polished = alpha - s_a * alpha / (s_a - lp.dphi0);
        if (!(polished > br.lo && polished < br.hi) || polished == alpha) return alpha;
        const double f_p = lp.phi(polished);
        const double s_p = dot(gradient(x_ + polished * d), d);
        if (!(f_p < lp.phi0) || !(std::abs(s_p) < std::abs(s_a))) return alpha;
        return polished;
    }

    double smallest_trial_step(Vec2 d) const {
        const LineSearchParams& p = cfg_.ls;
        if (ls_ == LineSearchKind::BacktrackingArmijo) {
            return p.armijo_alpha_init * std::pow(p.armijo_rho, kMaxBackoffs) * norm(d);
        }
        const double alpha_init = p.bracket_alpha_scale / (1.0 + norm(d));
        return alpha_init * std::pow(p.bracket_growth, -kMaxBracketSteps) * norm(d);
    }

    StepOutcome lm_step(const Mat2& hess) {
        // Damping is raised until hess + lambda I is positive definite, so every
        // trial direction is a descent direction.
        std::optional<Vec2> solved = solve_spd2x2(hess + lambda_ * Mat2::identity(), -g_);
        while (!solved && lambda_ < kLambdaMax) {
            lambda_ = std::min(lambda_ * cfg_.lm_increase, kLambdaMax);
            solved = solve_spd2x2(hess + lambda_ * Mat2::identity(), -g_);
        }
        if (!solved) return StepOutcome::TrialTooShort;
        const Vec2 d = *solved;
        if (norm(d) < cfg_.step_tol) return StepOutcome::TrialTooShort;
        const double alpha = 1.0;
        const Vec2 x_trial = x_ + alpha * d;
        const double f_trial = value(x_trial);
        const Vec2 g_trial = gradient(x_trial);
        if (!x_trial.finite() || !std::isfinite(f_trial) || !g_trial.finite()) return StepOutcome::NonFinite;

        if (!(f_trial < f_)) {
            trace_.records.push_back(make_record(k_, x_, f_, g_, d, 0.0, lambda_));
            lambda_ = std::min(lambda_ * cfg_.lm_increase, kLambdaMax);
            return StepOutcome::Rejected;
        }
        trace_.records.push_back(make_record(k_, x_, f_, g_, d, alpha, lambda_));
        lambda_ = std::max(lambda_ * cfg_.lm_decrease, kLambdaMin);
        const bool small = norm(x_trial - x_) < cfg_.step_tol;
        x_ = x_trial;
        f_ = f_trial;
        g_ = g_trial;
        return small ? StepOutcome::SmallStep : StepOutcome::Accepted;
    }

    const ObjectiveFunction& fn_;
    const OptimizerConfig& cfg_;
    LineSearchKind ls_;
    Trace trace_;
    int k_ = 0;
    Vec2 x_;
    double f_ = 0.0;
    Vec2 g_;
    CGState cg_;
    int since_restart_ = 0;
    QuasiNewtonState qn_;
    double lambda_;
};

} // namespace

Trace minimize(const ObjectiveFunction& fn, Vec2 x0, const OptimizerConfig& cfg) {
    cfg.validate();
    if (!x0.finite()) throw Error(ErrorCode::InvalidArgument, "x0 must be finite");
    return Run(fn, x0, cfg).run();
}

} // namespace gradbench
