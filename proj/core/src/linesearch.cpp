#include "gradbench/linesearch.hpp"

#include <cmath>
#include <limits>

namespace gradbench {
namespace {

double eval(const LineProblem& lp, double alpha) {
    const double v = lp.phi(alpha);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

void require_descent(const LineProblem& lp) {
    if (!(lp.dphi0 < 0.0)) {
        throw Error(ErrorCode::NonDescentDirection, "directional derivative is not negative");
    }
}

} // namespace

Bracket bracket_minimum(const LineProblem& lp, double alpha_init, double growth) {
    require_descent(lp);
    if (!(alpha_init > 0.0) || !(growth > 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "bracket_minimum: need alpha_init > 0 and growth > 1");
    }

    double c = alpha_init;
    double fc = eval(lp, c);

    auto expand = [&](double a, double mid, double fmid) -> Bracket {
        for (int i = 0; i < kMaxBracketSteps; ++i) {
            const double b = mid * growth;
            const double fb = eval(lp, b);
            if (fb > fmid) return {a, mid, b, fmid};
            a = mid;
            mid = b;
            fmid = fb;
        }
        throw Error(ErrorCode::BracketFailure, "phi keeps decreasing after the expansion cap");
    };

    if (fc < lp.phi0) return expand(0.0, c, fc);

    if (fc == lp.phi0) {
        // Flat at working precision; the decrease may only be resolvable further out.
        const double b = c * growth;
        const double fb = eval(lp, b);
        if (fb < lp.phi0) return expand(c, b, fb);
    }

    double hi = c;
    double fhi = fc;
    for (int i = 0; i < kMaxBracketSteps; ++i) {
        const double mid = hi / growth;
        const double fmid = eval(lp, mid);
        if (fmid < lp.phi0 && fmid < fhi) return {0.0, mid, hi, fmid};
        hi = mid;
        fhi = fmid;
    }
    throw Error(ErrorCode::LineSearchFailed, "no decrease found while contracting toward alpha = 0");
}

namespace {

struct Probe {
    double alpha;
    double phi;
};

Probe golden_impl(const LineProblem& lp, double a, double b, double tol) {
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "golden_section: tol must be > 0");
    if (!(a < b)) throw Error(ErrorCode::InvalidArgument, "golden_section: need a < b");
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;

    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = eval(lp, x1);
    double f2 = eval(lp, x2);
    // Interval width shrinks by inv_phi per probe; the cap only guards degenerate tolerances.
    for (int i = 0; i < 400 && (b - a) > tol; ++i) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = eval(lp, x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = eval(lp, x2);
        }
    }
    return f1 < f2 ? Probe{x1, f1} : Probe{x2, f2};
}

} // namespace

double golden_section(const LineProblem& lp, double a, double b, double tol) {
    return golden_impl(lp, a, b, tol).alpha;
}

double golden_section(const LineProblem& lp, const Bracket& bracket, double tol) {
    const Probe best = golden_impl(lp, bracket.lo, bracket.hi, tol);
    return best.phi <= bracket.phi_mid ? best.alpha : bracket.mid;
}

double backtracking_armijo(const LineProblem& lp, double alpha_init, double c1, double rho) {
    require_descent(lp);
    if (!(alpha_init > 0.0) || !(c1 > 0.0 && c1 < 1.0) || !(rho > 0.0 && rho < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "backtracking_armijo: parameter out of range");
    }
    double alpha = alpha_init;
    for (int j = 0; j <= kMaxBackoffs; ++j) {
        if (eval(lp, alpha) <= lp.phi0 + c1 * alpha * lp.dphi0) return alpha;
        alpha *= rho;
    }
    throw Error(ErrorCode::LineSearchFailed, "Armijo condition not met after the backoff cap");
}

} // namespace gradbench
