#ifndef GRADBENCH_LINESEARCH_HPP
#define GRADBENCH_LINESEARCH_HPP

#include <functional>

#include "gradbench/core.hpp"

namespace gradbench {

/// One-dimensional restriction phi(alpha) = U(x + alpha d).
struct LineProblem {
    std::function<double(double)> phi;
    double phi0 = 0.0;
    /// Directional derivative at alpha = 0; must be negative.
    double dphi0 = 0.0;
};

struct Bracket {
    double lo = 0.0;
    double mid = 0.0;
    double hi = 0.0;
    double phi_mid = 0.0;
};

inline constexpr int kMaxBracketSteps = 60;
inline constexpr int kMaxBackoffs = 60;

/// Finds 0 <= lo < mid < hi with phi(mid) < min(phi(lo), phi(hi)).
///
/// Expands by `growth` while phi keeps decreasing, or contracts toward 0 when
/// the first probe already fails to decrease. Non-finite probes count as +inf.
/// A first probe equal to phi0 (flat at working precision) gets one look further
/// out before contracting. Throws NonDescentDirection if dphi0 >= 0,
/// BracketFailure after 60 expansions (unbounded descent) and LineSearchFailed
/// after 60 contractions (no resolvable decrease along d).
Bracket bracket_minimum(const LineProblem& lp, double alpha_init, double growth);

/// Golden-section search on [a, b]; returns the best probe once b - a <= tol.
/// The Bracket overload seeds the incumbent with the bracket's interior point,
/// so the result is never worse than phi(mid).
double golden_section(const LineProblem& lp, double a, double b, double tol);
double golden_section(const LineProblem& lp, const Bracket& bracket, double tol);

/// Largest alpha_init * rho^j with phi(alpha) <= phi0 + c1 alpha dphi0.
/// Throws NonDescentDirection if dphi0 >= 0, LineSearchFailed after 60 backoffs.
double backtracking_armijo(const LineProblem& lp, double alpha_init, double c1, double rho);

} // namespace gradbench

#endif
