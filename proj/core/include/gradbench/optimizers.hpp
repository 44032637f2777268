#ifndef GRADBENCH_OPTIMIZERS_HPP
#define GRADBENCH_OPTIMIZERS_HPP

#include "gradbench/core.hpp"
#include "gradbench/objectives.hpp"

namespace gradbench {

enum class CgVariant { FletcherReeves, PolakRibiere };

struct CGState {
    Vec2 prev_grad;
    Vec2 prev_dir;
    CgVariant variant = CgVariant::FletcherReeves;
    int restart_period = 2;
};

enum class QuasiNewtonVariant { Dfp, Bfgs };

struct QuasiNewtonState {
    Mat2 h_inv = Mat2::identity();
    Vec2 s;
    Vec2 y;
    QuasiNewtonVariant variant = QuasiNewtonVariant::Bfgs;
};

struct LMState {
    double lambda = 1e-3;
};

Vec2 steepest_direction(Vec2 grad);

/// Conjugation coefficient of the previous direction; PR is floored at 0.
double cg_beta(Vec2 grad, const CGState& state);

/// -grad at k = 0 and every restart_period steps, otherwise -grad + beta * prev_dir.
/// Throws DegenerateState if a conjugate step is requested with a zero prev_grad.
Vec2 cg_direction(Vec2 grad, const CGState& state, int k);

/// Solves hess * d = -grad. Throws SingularMatrix.
Vec2 newton_direction(Vec2 grad, const Mat2& hess);

/// Shifts the Hessian by tau * I (tau doubling from 1e-3 * max|h_ii|) until it
/// is positive definite, then solves. Used by the line-searched Newton mode.
Vec2 modified_newton_direction(Vec2 grad, const Mat2& hess);

/// Inverse-Hessian update with displacement s and gradient change y.
///   DFP:  H + s s^T/(s^T y) - (H y)(H y)^T/(y^T H y)
///   BFGS: (I - rho s y^T) H (I - rho y s^T) + rho s s^T,  rho = 1/(s^T y)
/// Skipped (state returned unchanged) when y^T s <= 1e-10 |s| |y|.
QuasiNewtonState quasi_newton_update(const QuasiNewtonState& state, Vec2 s, Vec2 y);

/// True if the last quasi_newton_update call with these inputs would apply.
bool curvature_ok(Vec2 s, Vec2 y);

/// Solves (hess + lambda I) d = -grad.
Vec2 lm_direction(Vec2 grad, const Mat2& hess, double lambda);

/// Runs x_{k+1} = x_k + alpha_k d_k until a termination rule fires.
///
/// Stops on |grad| < grad_tol, |x_{k+1} - x_k| < step_tol (accepted steps
/// only), or k == max_iter. Numerical failures become the trace's termination
/// reason; only invalid input (bad config, non-finite x0 or f(x0)) throws.
///
/// The exact line search is bracket + golden section followed by one secant
/// step on grad . d, kept only when it lowers |grad . d| without raising f
/// above the current point.
///
/// Pure-step Newton takes the raw solve with alpha = 1, reversed when it
/// points uphill. A line search that cannot decrease f with any trial step
/// longer than step_tol ends the run with StepToleranceMet.
///
/// Levenberg-Marquardt first raises lambda until hess + lambda I is positive
/// definite, then evaluates the trial point; a trial that does not strictly
/// decrease f is recorded with alpha = 0 and lambda grows by lm_increase, an
/// accepted one shrinks lambda by lm_decrease. A trial shorter than step_tol
/// ends the run with StepToleranceMet.
Trace minimize(const ObjectiveFunction& fn, Vec2 x0, const OptimizerConfig& cfg);

} // namespace gradbench

#endif
