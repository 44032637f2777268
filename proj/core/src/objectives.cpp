#include "gradbench/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gradbench/bench.hpp"

namespace gradbench {

Rect Rect::intersect(const Rect& other) const {
    Rect r{std::max(x_lo, other.x_lo), std::min(x_hi, other.x_hi), std::max(y_lo, other.y_lo),
           std::min(y_hi, other.y_hi)};
    if (r.x_lo > r.x_hi || r.y_lo > r.y_hi) {
        throw Error(ErrorCode::InvalidArgument, "rectangles do not intersect");
    }
    return r;
}

ObjectiveFunction rosenbrock(double a, double b) {
    if (!(b > 0.0)) throw Error(ErrorCode::InvalidArgument, "rosenbrock: b must be > 0");
    ObjectiveFunction fn;
    fn.name = "rosenbrock";
    fn.params = {{"a", a}, {"b", b}};
    fn.value = [a, b](Vec2 p) {
        const double u = a - p.x;
        const double v = p.y - p.x * p.x;
        return u * u + b * v * v;
    };
    fn.gradient = [a, b](Vec2 p) {
        const double v = p.y - p.x * p.x;
        return Vec2{-2.0 * (a - p.x) - 4.0 * b * p.x * v, 2.0 * b * v};
    };
    fn.hessian = [b](Vec2 p) {
        const double off = -4.0 * b * p.x;
        return Mat2{2.0 - 4.0 * b * p.y + 12.0 * b * p.x * p.x, off, off, 2.0 * b};
    };
    fn.plot_domain = {-2.0, 2.0, -1.0, 4.0};
    fn.known_minima = {{a, a * a}};
    return fn;
}

namespace {

// One spring term 0.5 k (r - l)^2 with r = sqrt(x^2 + w^2), w = l - sigma*y.
struct SpringTerm {
    double k, l, sigma;

    double w(Vec2 p) const { return l - sigma * p.y; }
    double radius(Vec2 p) const { return std::hypot(p.x, w(p)); }

    double value(Vec2 p) const {
        const double ext = radius(p) - l;
        return 0.5 * k * ext * ext;
    }

    // At r = 0 the radial direction is undefined; the term contributes 0.
    Vec2 gradient(Vec2 p) const {
        const double r = radius(p);
        if (r == 0.0) return {};
        const double q = (r - l) / r;
        return {k * q * p.x, -sigma * k * q * w(p)};
    }

    Mat2 hessian(Vec2 p) const {
        const double r = radius(p);
        if (r == 0.0) return {};
        const double wv = w(p);
        const double q = (r - l) / r;
        const double r3 = r * r * r;
        const double off = -sigma * k * l * wv * p.x / r3;
        return {k * (q + l * p.x * p.x / r3), off, off, k * (q + l * wv * wv / r3)};
    }
};

} // namespace

ObjectiveFunction spring_force(SpringParams sp, SpringVariant variant) {
    if (!(sp.k1 > 0.0 && sp.k2 > 0.0)) throw Error(ErrorCode::InvalidArgument, "spring: stiffness must be > 0");
    if (!(sp.l1 > 0.0 && sp.l2 > 0.0)) throw Error(ErrorCode::InvalidArgument, "spring: lengths must be > 0");
    const SpringTerm t1{sp.k1, sp.l1, 1.0};
    const SpringTerm t2{sp.k2, sp.l2, variant == SpringVariant::SameSideAnchors ? 1.0 : -1.0};
    const double p1 = sp.p1;
    const double p2 = sp.p2;

    ObjectiveFunction fn;
    fn.name = "spring";
    fn.params = {{"k1", sp.k1}, {"k2", sp.k2}, {"p1", sp.p1}, {"p2", sp.p2}, {"l1", sp.l1}, {"l2", sp.l2},
                 {"variant", variant == SpringVariant::SameSideAnchors ? 0.0 : 1.0}};
    fn.value = [=](Vec2 p) { return t1.value(p) + t2.value(p) - p1 * p.x - p2 * p.y; };
    fn.gradient = [=](Vec2 p) { return t1.gradient(p) + t2.gradient(p) - Vec2{p1, p2}; };
    fn.hessian = [=](Vec2 p) { return t1.hessian(p) + t2.hessian(p); };
    fn.singular_at = [=](Vec2 p) { return t1.radius(p) == 0.0 || t2.radius(p) == 0.0; };
    fn.plot_domain = {-10.0, 15.0, -5.0, 25.0};
    fn.known_minima = {grid_argmin_oracle(fn.value, fn.plot_domain, 401, 8)};
    return fn;
}

ObjectiveFunction ackley(double coeff) {
    if (!(coeff > 0.0)) throw Error(ErrorCode::InvalidArgument, "ackley: coefficient must be > 0");
    constexpr double two_pi = 2.0 * std::numbers::pi;
    constexpr double pi = std::numbers::pi;
    constexpr double e = std::numbers::e;

    ObjectiveFunction fn;
    fn.name = "ackley";
    fn.params = {{"coeff", coeff}};
    fn.value = [coeff](Vec2 p) {
        const double s = std::sqrt((p.x * p.x + p.y * p.y) / 2.0);
        const double c = (std::cos(two_pi * p.x) + std::cos(two_pi * p.y)) / 2.0;
        return -20.0 * std::exp(-coeff * s) - std::exp(c) + e + 20.0;
    };
    // The radial term is a cone at the origin; its contribution is taken as 0 there.
    fn.gradient = [coeff](Vec2 p) {
        const double s = std::sqrt((p.x * p.x + p.y * p.y) / 2.0);
        const double ec = std::exp((std::cos(two_pi * p.x) + std::cos(two_pi * p.y)) / 2.0);
        Vec2 g{pi * ec * std::sin(two_pi * p.x), pi * ec * std::sin(two_pi * p.y)};
        if (s > 0.0) {
            const double a = 10.0 * coeff * std::exp(-coeff * s) / s;
            g = g + a * p;
        }
        return g;
    };
    fn.hessian = [coeff](Vec2 p) {
        const double s = std::sqrt((p.x * p.x + p.y * p.y) / 2.0);
        const double sx = std::sin(two_pi * p.x), sy = std::sin(two_pi * p.y);
        const double cx = std::cos(two_pi * p.x), cy = std::cos(two_pi * p.y);
        const double ec = std::exp((cx + cy) / 2.0);
        const double pp = pi * pi * ec;
        Mat2 h{pp * (2.0 * cx - sx * sx), -pp * sx * sy, -pp * sx * sy, pp * (2.0 * cy - sy * sy)};
        if (s > 0.0) {
            const double es = std::exp(-coeff * s);
            const double a = 10.0 * coeff * es / s;
            const double b = 10.0 * coeff * es * (coeff + 1.0 / s) / (2.0 * s * s);
            const double off = -b * p.x * p.y;
            h = h + Mat2{a - b * p.x * p.x, off, off, a - b * p.y * p.y};
        }
        return h;
    };
    fn.singular_at = [](Vec2 p) { return p.x == 0.0 && p.y == 0.0; };
    fn.plot_domain = {-0.5, 0.5, -0.5, 0.5};
    fn.known_minima = {{0.0, 0.0}};
    return fn;
}

namespace {

double himmelblau_value(Vec2 p) {
    const double u = p.x * p.x + p.y - 11.0;
    const double v = p.x + p.y * p.y - 7.0;
    return u * u + v * v;
}

Vec2 himmelblau_gradient(Vec2 p) {
    const double u = p.x * p.x + p.y - 11.0;
    const double v = p.x + p.y * p.y - 7.0;
    return {4.0 * p.x * u + 2.0 * v, 2.0 * u + 4.0 * p.y * v};
}

Mat2 himmelblau_hessian(Vec2 p) {
    const double u = p.x * p.x + p.y - 11.0;
    const double v = p.x + p.y * p.y - 7.0;
    const double off = 4.0 * (p.x + p.y);
    return {4.0 * u + 8.0 * p.x * p.x + 2.0, off, off, 4.0 * v + 8.0 * p.y * p.y + 2.0};
}

// Newton from a coarse seed lattice; keeps stationary points with a positive
// definite Hessian, deduplicated.
std::vector<Vec2> refine_himmelblau_minima() {
    std::vector<Vec2> minima;
    constexpr int kSeeds = 7;
    for (int i = 0; i < kSeeds; ++i) {
        for (int j = 0; j < kSeeds; ++j) {
            Vec2 p{-6.0 + 12.0 * i / (kSeeds - 1), -6.0 + 12.0 * j / (kSeeds - 1)};
            bool ok = false;
            for (int it = 0; it < 100; ++it) {
                const Vec2 g = himmelblau_gradient(p);
                if (norm(g) < 1e-12) {
                    ok = true;
                    break;
                }
                try {
                    p = p - solve2x2(himmelblau_hessian(p), g);
                } catch (const Error&) {
                    break;
                }
                if (!p.finite() || std::abs(p.x) > 1e3 || std::abs(p.y) > 1e3) break;
            }
            if (!ok) continue;
            const Mat2 h = himmelblau_hessian(p);
            if (!(h.a11 > 0.0 && h.det() > 0.0)) continue;
            const bool seen = std::any_of(minima.begin(), minima.end(), [&](Vec2 m) { return norm(m - p) < 1e-6; });
            if (!seen) minima.push_back(p);
        }
    }
    auto angle = [](Vec2 p) {
        const double a = std::atan2(p.y, p.x);
        return a < 0.0 ? a + 2.0 * std::numbers::pi : a;
    };
    std::sort(minima.begin(), minima.end(), [&](Vec2 a, Vec2 b) { return angle(a) < angle(b); });
    return minima;
}

} // namespace

ObjectiveFunction himmelblau() {
    static const std::vector<Vec2> minima = refine_himmelblau_minima();
    ObjectiveFunction fn;
    fn.name = "himmelblau";
    fn.value = himmelblau_value;
    fn.gradient = himmelblau_gradient;
    fn.hessian = himmelblau_hessian;
    fn.plot_domain = {-6.0, 6.0, -6.0, 6.0};
    fn.known_minima = minima;
    return fn;
}

const std::vector<std::string>& objective_names() {
    static const std::vector<std::string> names{"rosenbrock", "spring", "ackley", "himmelblau"};
    return names;
}

ObjectiveFunction make_objective(std::string_view name) {
    if (name == "rosenbrock") return rosenbrock();
    if (name == "spring") return spring_force();
    if (name == "ackley") return ackley();
    if (name == "himmelblau") return himmelblau();
    throw Error(ErrorCode::UnknownName, "function '" + std::string(name) + "'");
}

namespace {

double probe(const ObjectiveFunction& fn, Vec2 p) {
    const double v = fn.value(p);
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteValue, "finite-difference probe is non-finite");
    return v;
}

double scaled_step(double h, double coord) { return h * std::max(1.0, std::abs(coord)); }

} // namespace

Vec2 fd_gradient(const ObjectiveFunction& fn, Vec2 p, FDSettings s) {
    if (!(s.h > 0.0)) throw Error(ErrorCode::InvalidArgument, "fd_gradient: h must be > 0");
    const double hx = scaled_step(s.h, p.x);
    const double hy = scaled_step(s.h, p.y);
    const double gx = (probe(fn, {p.x + hx, p.y}) - probe(fn, {p.x - hx, p.y})) / (2.0 * hx);
    const double gy = (probe(fn, {p.x, p.y + hy}) - probe(fn, {p.x, p.y - hy})) / (2.0 * hy);
    return {gx, gy};
}

Mat2 fd_hessian(const ObjectiveFunction& fn, Vec2 p, FDSettings s) {
    if (!(s.hessian_h > 0.0)) throw Error(ErrorCode::InvalidArgument, "fd_hessian: h must be > 0");
    const double hx = scaled_step(s.hessian_h, p.x);
    const double hy = scaled_step(s.hessian_h, p.y);
    const double f0 = probe(fn, p);
    const double fxx = (probe(fn, {p.x + hx, p.y}) - 2.0 * f0 + probe(fn, {p.x - hx, p.y})) / (hx * hx);
    const double fyy = (probe(fn, {p.x, p.y + hy}) - 2.0 * f0 + probe(fn, {p.x, p.y - hy})) / (hy * hy);
    const double fpp = probe(fn, {p.x + hx, p.y + hy});
    const double fpm = probe(fn, {p.x + hx, p.y - hy});
    const double fmp = probe(fn, {p.x - hx, p.y + hy});
    const double fmm = probe(fn, {p.x - hx, p.y - hy});
    const double fxy = (fpp - fpm - fmp + fmm) / (4.0 * hx * hy);
    const double fyx = (fpp - fmp - fpm + fmm) / (4.0 * hx * hy);
    return Mat2{fxx, fxy, fyx, fyy}.symmetrized();
}

} // namespace gradbench
