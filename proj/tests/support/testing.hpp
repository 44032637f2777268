#ifndef GRADBENCH_TESTS_TESTING_HPP
#define GRADBENCH_TESTS_TESTING_HPP

// Hand-rolled generators and trace checks shared by the test binaries.

#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "gradbench/core.hpp"
#include "gradbench/objectives.hpp"

namespace gradbench::testing {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
    int integer(int lo, int hi) { return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1)); }
    std::uint64_t bits() { return gen_(); }
    std::mt19937_64& engine() { return gen_; }

    Vec2 point_in(const Rect& r) { return {uniform(r.x_lo, r.x_hi), uniform(r.y_lo, r.y_hi)}; }
    Vec2 in_ball(Vec2 c, double radius) {
        for (;;) {
            const Vec2 p{uniform(-1.0, 1.0), uniform(-1.0, 1.0)};
            if (dot(p, p) <= 1.0) return c + radius * p;
        }
    }

private:
    std::mt19937_64 gen_;
};

inline Mat2 rotation(double theta) { return {std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta)}; }

/// Symmetric positive definite with eigenvalues in [lo, hi].
inline Mat2 random_spd(Rng& rng, double lo = 0.1, double hi = 100.0) {
    const Mat2 r = rotation(rng.uniform(0.0, std::numbers::pi));
    const Mat2 d{rng.uniform(lo, hi), 0.0, 0.0, rng.uniform(lo, hi)};
    return (r * d * r.transposed()).symmetrized();
}

/// General matrix with condition number below max_cond.
inline Mat2 random_well_conditioned(Rng& rng, double max_cond = 1e6) {
    const Mat2 u = rotation(rng.uniform(0.0, 2.0 * std::numbers::pi));
    const Mat2 v = rotation(rng.uniform(0.0, 2.0 * std::numbers::pi));
    const double s1 = std::pow(10.0, rng.uniform(-3.0, 3.0));
    const double s2 = s1 / std::pow(10.0, rng.uniform(0.0, 0.999 * std::log10(max_cond)));
    const double flip = rng.unit() < 0.5 ? -1.0 : 1.0;
    return u * Mat2{s1, 0.0, 0.0, flip * s2} * v.transposed();
}

/// f(x) = 1/2 x^T A x - b^T x with exact derivatives.
inline ObjectiveFunction quadratic(const Mat2& a, Vec2 b) {
    ObjectiveFunction fn;
    fn.name = "quadratic";
    fn.value = [a, b](Vec2 p) { return 0.5 * dot(p, a * p) - dot(b, p); };
    fn.gradient = [a, b](Vec2 p) { return a * p - b; };
    fn.hessian = [a](Vec2) { return a; };
    fn.plot_domain = {-10.0, 10.0, -10.0, 10.0};
    return fn;
}

/// Value-only objective; derivatives come from central differences.
inline ObjectiveFunction from_value(std::function<double(Vec2)> value) {
    ObjectiveFunction fn;
    fn.name = "ad-hoc";
    fn.value = std::move(value);
    ObjectiveFunction plain;
    plain.value = fn.value;
    fn.gradient = [plain](Vec2 p) { return fd_gradient(plain, p); };
    fn.hessian = [plain](Vec2 p) { return fd_hessian(plain, p); };
    return fn;
}

inline bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }
inline bool same_bits(Vec2 a, Vec2 b) { return same_bits(a.x, b.x) && same_bits(a.y, b.y); }

inline bool same_bits(const Trace& a, const Trace& b) {
    if (a.records.size() != b.records.size() || a.termination != b.termination || a.method != b.method ||
        a.function_name != b.function_name || !same_bits(a.x0, b.x0) || !(a.counters == b.counters)) {
        return false;
    }
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        const auto& r = a.records[i];
        const auto& s = b.records[i];
        if (r.k != s.k || !same_bits(r.point, s.point) || !same_bits(r.f_value, s.f_value) ||
            !same_bits(r.grad, s.grad) || !same_bits(r.grad_norm, s.grad_norm) ||
            !same_bits(r.direction, s.direction) || !same_bits(r.alpha, s.alpha) || !same_bits(r.damping, s.damping)) {
            return false;
        }
    }
    return true;
}

/// Finite doubles spread across magnitudes, with signed zeros and subnormals.
inline double awkward_double(Rng& rng) {
    switch (rng.integer(0, 7)) {
    case 0: return 0.0;
    case 1: return -0.0;
    case 2: return std::ldexp(static_cast<double>(rng.bits() >> 12), -1074 - 10) + 4.9e-324;
    case 3: return rng.uniform(-1.0, 1.0) * 1e300;
    case 4: return rng.uniform(-1.0, 1.0) * 1e-300;
    case 5: return 1.0 / 3.0 * rng.uniform(-10.0, 10.0);
    default: {
        // random bit pattern, redrawn until finite
        for (;;) {
            const double d = std::bit_cast<double>(rng.bits());
            if (std::isfinite(d)) return d;
        }
    }
    }
}

inline Vec2 awkward_vec(Rng& rng) { return {awkward_double(rng), awkward_double(rng)}; }

inline Trace random_trace(Rng& rng) {
    static const char* kNames[] = {"rosenbrock", "spring", "ackley", "himmelblau", "a \"quoted\" name", "ünïcode"};
    Trace t;
    t.method = all_methods()[static_cast<std::size_t>(rng.integer(0, 6))];
    t.function_name = kNames[rng.integer(0, 5)];
    t.x0 = awkward_vec(rng);
    t.termination = static_cast<Termination>(rng.integer(0, 5));
    t.counters = {rng.integer(0, 1 << 30), rng.integer(0, 1 << 30), rng.integer(0, 1 << 30)};
    const int n = rng.integer(1, 12);
    for (int k = 0; k < n; ++k) {
        IterationRecord r;
        r.k = k;
        r.point = k == 0 ? t.x0 : awkward_vec(rng);
        r.f_value = awkward_double(rng);
        r.grad = awkward_vec(rng);
        r.grad_norm = awkward_double(rng);
        r.direction = awkward_vec(rng);
        r.alpha = awkward_double(rng);
        r.damping = awkward_double(rng);
        t.records.push_back(r);
    }
    return t;
}

/// Structural trace invariants. Returns a description of the first violation, or "".
inline std::string trace_violation(const Trace& t) {
    if (t.records.empty()) return "no records";
    if (!same_bits(t.records.front().point, t.x0)) return "records[0].point != x0";
    for (std::size_t i = 0; i < t.records.size(); ++i) {
        const auto& r = t.records[i];
        if (r.k != static_cast<int>(i)) return "k not consecutive at " + std::to_string(i);
        const double n = std::hypot(r.grad.x, r.grad.y);
        if (std::abs(r.grad_norm - n) > 1e-14 * std::max(1.0, n)) return "grad_norm mismatch at " + std::to_string(i);
        if (i + 1 < t.records.size()) {
            const Vec2 expect{r.point.x + r.alpha * r.direction.x, r.point.y + r.alpha * r.direction.y};
            if (!same_bits(expect, t.records[i + 1].point)) return "x_{k+1} != x_k + alpha d_k at " + std::to_string(i);
        }
    }
    const std::int64_t steps = static_cast<std::int64_t>(t.records.size()) - 1;
    if (t.counters.n_f < steps || t.counters.n_grad < steps) return "fewer evaluations than steps";
    return "";
}

/// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag = "gradbench_test") {
        static int counter = 0;
        path = std::filesystem::temp_directory_path() /
               (tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

} // namespace gradbench::testing

#endif
