#include <cmath>
#include <limits>

#include "doctest.h"
#include "gradbench/core.hpp"
#include "support/testing.hpp"

using namespace gradbench;
using gradbench::testing::Rng;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected gradbench::Error");
    return ErrorCode::Io;
}

} // namespace

TEST_CASE("solve2x2 on identity and diagonal systems") {
    CHECK(solve2x2(Mat2::identity(), {3.0, 4.0}) == Vec2{3.0, 4.0});
    CHECK(solve2x2({2.0, 0.0, 0.0, 2.0}, {6.0, 8.0}) == Vec2{3.0, 4.0});
}

TEST_CASE("solve2x2 on the Rosenbrock Hessian at (-2, 2) back-substitutes") {
    const Mat2 a{4002.0, 800.0, 800.0, 200.0};
    const Vec2 b{1606.0, 400.0};
    const Vec2 x = solve2x2(a, b);
    const Vec2 r = a * x - b;
    CHECK(norm(r) <= 1e-10 * norm(b));
}

TEST_CASE("solve2x2 rejects singular and non-finite input") {
    CHECK(code_of([] { solve2x2(Mat2::zero(), {1.0, 1.0}); }) == ErrorCode::SingularMatrix);
    CHECK(code_of([] { solve2x2({1.0, 2.0, 2.0, 4.0}, {1.0, 1.0}); }) == ErrorCode::SingularMatrix);
    // determinant 1e-16 relative to unit rows
    CHECK(code_of([] { solve2x2({1.0, 1.0, 1.0, 1.0 + 1e-16}, {1.0, 1.0}); }) == ErrorCode::SingularMatrix);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK(code_of([&] { solve2x2({nan, 0.0, 0.0, 1.0}, {1.0, 1.0}); }) == ErrorCode::NonFiniteValue);
}

TEST_CASE("solve2x2 residual on random well-conditioned systems") {
    Rng rng(0x5eed);
    for (int i = 0; i < 1000; ++i) {
        const Mat2 a = testing::random_well_conditioned(rng);
        const Vec2 b{rng.uniform(-100.0, 100.0), rng.uniform(-100.0, 100.0)};
        const Vec2 x = solve2x2(a, b);
        CAPTURE(i);
        // backward-stable bound: residual scales with |A| |x|, not with |b| alone
        const double a_norm = std::sqrt(a.a11 * a.a11 + a.a12 * a.a12 + a.a21 * a.a21 + a.a22 * a.a22);
        CHECK(norm(a * x - b) <= 1e-13 * (a_norm * norm(x) + norm(b)));
    }
}

TEST_CASE("solve_spd2x2 solves positive definite systems and refuses the rest") {
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        const Mat2 a = testing::random_spd(rng);
        const Vec2 b{rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)};
        const auto x = solve_spd2x2(a, b);
        REQUIRE(x.has_value());
        CHECK(norm(a * *x - b) <= 1e-10 * (1.0 + norm(b)));
    }
    CHECK_FALSE(solve_spd2x2({1.0, 0.0, 0.0, -1.0}, {1.0, 1.0}).has_value());
    CHECK_FALSE(solve_spd2x2({-2.0, 0.0, 0.0, 3.0}, {1.0, 1.0}).has_value());
    CHECK_FALSE(solve_spd2x2({1.0, 1.0, 1.0, 1.0}, {1.0, 1.0}).has_value());
}

TEST_CASE("norm") {
    CHECK(norm({0.0, 0.0}) == 0.0);
    CHECK(norm({3.0, 4.0}) == 5.0);
    CHECK(norm({1.0, 1.0}) == doctest::Approx(std::sqrt(1.0 + 1.0)).epsilon(1e-15));

    Rng rng(11);
    for (int i = 0; i < 500; ++i) {
        const Vec2 v{rng.uniform(-1e3, 1e3), rng.uniform(-1e3, 1e3)};
        CHECK(norm(v) == doctest::Approx(std::sqrt(dot(v, v))).epsilon(1e-14));
        CHECK(norm(v) > 0.0);
    }
}

TEST_CASE("Mat2 symmetry tolerance") {
    CHECK(Mat2{1.0, 2.0, 2.0, 1.0}.is_symmetric());
    CHECK(Mat2{1.0, 2.0, 2.0 + 1e-13, 1.0}.is_symmetric());
    CHECK_FALSE(Mat2{1.0, 2.0, 2.0 + 1e-10, 1.0}.is_symmetric());
    CHECK(Mat2{1.0, 1e6, 1e6 + 1e-7, 1.0}.is_symmetric());
    CHECK_FALSE(Mat2{1.0, 1e6, 1e6 + 1e-5, 1.0}.is_symmetric());
    const Mat2 s = Mat2{1.0, 2.0, 4.0, 1.0}.symmetrized();
    CHECK(s.a12 == 3.0);
    CHECK(s.a21 == 3.0);
}

TEST_CASE("Mat2 arithmetic") {
    const Mat2 a{1.0, 2.0, 3.0, 4.0};
    CHECK(a.det() == -2.0);
    CHECK(a.trace() == 5.0);
    CHECK(a * Vec2{1.0, 1.0} == Vec2{3.0, 7.0});
    const Mat2 sq = a * a;
    CHECK(sq.a11 == 7.0);
    CHECK(sq.a12 == 10.0);
    CHECK(sq.a21 == 15.0);
    CHECK(sq.a22 == 22.0);
    const Mat2 o = outer({1.0, 2.0}, {3.0, 4.0});
    CHECK(o.a12 == 4.0);
    CHECK(o.a21 == 6.0);
}

TEST_CASE("OptimizerConfig validation") {
    CHECK_NOTHROW(OptimizerConfig{}.validate());
    auto bad = [](auto mutate) {
        OptimizerConfig c;
        mutate(c);
        return code_of([&] { c.validate(); });
    };
    CHECK(bad([](OptimizerConfig& c) { c.grad_tol = 0.0; }) == ErrorCode::InvalidConfig);
    CHECK(bad([](OptimizerConfig& c) { c.max_iter = 0; }) == ErrorCode::InvalidConfig);
    CHECK(bad([](OptimizerConfig& c) { c.ls.armijo_c1 = 0.0; }) == ErrorCode::InvalidConfig);
    CHECK(bad([](OptimizerConfig& c) { c.ls.armijo_c1 = 1.0; }) == ErrorCode::InvalidConfig);
    CHECK(bad([](OptimizerConfig& c) { c.ls.armijo_rho = 1.0; }) == ErrorCode::InvalidConfig);
    CHECK(bad([](OptimizerConfig& c) { c.ls.armijo_rho = 0.0; }) == ErrorCode::InvalidConfig);
    CHECK(bad([](OptimizerConfig& c) { c.lm_lambda0 = 0.0; }) == ErrorCode::InvalidConfig);
    CHECK(bad([](OptimizerConfig& c) { c.lm_increase = 1.0; }) == ErrorCode::InvalidConfig);
    CHECK(bad([](OptimizerConfig& c) { c.lm_decrease = 1.0; }) == ErrorCode::InvalidConfig);
    CHECK(bad([](OptimizerConfig& c) { c.lm_decrease = 0.0; }) == ErrorCode::InvalidConfig);
    CHECK(bad([](OptimizerConfig& c) { c.cg_restart_period = 0; }) == ErrorCode::InvalidConfig);
}

TEST_CASE("default line search per method") {
    CHECK(default_line_search(Method::SteepestDescent) == LineSearchKind::ExactGoldenSection);
    CHECK(default_line_search(Method::CgFletcherReeves) == LineSearchKind::ExactGoldenSection);
    CHECK(default_line_search(Method::CgPolakRibiere) == LineSearchKind::ExactGoldenSection);
    CHECK(default_line_search(Method::QuasiNewtonDfp) == LineSearchKind::ExactGoldenSection);
    CHECK(default_line_search(Method::QuasiNewtonBfgs) == LineSearchKind::ExactGoldenSection);
    CHECK(default_line_search(Method::Newton, true) == LineSearchKind::FixedUnitStep);
    CHECK(default_line_search(Method::Newton, false) == LineSearchKind::BacktrackingArmijo);
    CHECK(default_line_search(Method::LevenbergMarquardt) == LineSearchKind::FixedUnitStep);

    OptimizerConfig c;
    c.method = Method::QuasiNewtonBfgs;
    c.line_search = LineSearchKind::BacktrackingArmijo;
    CHECK(effective_line_search(c) == LineSearchKind::BacktrackingArmijo);
    c.method = Method::LevenbergMarquardt;
    CHECK(effective_line_search(c) == LineSearchKind::FixedUnitStep);
}

TEST_CASE("registry names round-trip") {
    for (Method m : all_methods()) CHECK(parse_method(method_name(m)) == m);
    CHECK(all_methods().size() == 7);
    CHECK(method_name(Method::CgPolakRibiere) == "cg-pr");
    CHECK(code_of([] { parse_method("gauss-seidel"); }) == ErrorCode::UnknownName);
    for (auto k : {LineSearchKind::ExactGoldenSection, LineSearchKind::BacktrackingArmijo, LineSearchKind::FixedUnitStep}) {
        CHECK(parse_line_search(to_string(k)) == k);
    }
    for (int t = 0; t < 6; ++t) {
        const auto term = static_cast<Termination>(t);
        CHECK(parse_termination(to_string(term)) == term);
    }
    CHECK(converged(Termination::GradToleranceMet));
    CHECK(converged(Termination::StepToleranceMet));
    CHECK_FALSE(converged(Termination::MaxIterReached));
    CHECK_FALSE(converged(Termination::SingularHessian));
}

TEST_CASE("make_record rejects non-finite fields") {
    const double inf = std::numeric_limits<double>::infinity();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const auto r = make_record(3, {1.0, 2.0}, 5.0, {3.0, 4.0}, {-3.0, -4.0}, 0.5);
    CHECK(r.grad_norm == 5.0);
    CHECK(r.k == 3);
    CHECK(code_of([&] { make_record(0, {inf, 0.0}, 0.0, {}); }) == ErrorCode::NonFiniteValue);
    CHECK(code_of([&] { make_record(0, {}, nan, {}); }) == ErrorCode::NonFiniteValue);
    CHECK(code_of([&] { make_record(0, {}, 0.0, {0.0, nan}); }) == ErrorCode::NonFiniteValue);
    CHECK(code_of([&] { make_record(0, {}, 0.0, {}, {}, inf); }) == ErrorCode::NonFiniteValue);
}

TEST_CASE("Trace::validate structural invariants") {
    Trace t;
    CHECK(code_of([&] { t.validate(); }) == ErrorCode::InvalidArgument);
    t.x0 = {1.0, 2.0};
    t.records.push_back(make_record(0, {1.0, 2.0}, 0.0, {}));
    CHECK_NOTHROW(t.validate());
    CHECK(t.iterations() == 0);
    t.records.push_back(make_record(2, {1.0, 2.0}, 0.0, {}));
    CHECK(code_of([&] { t.validate(); }) == ErrorCode::InvalidArgument);
    t.records.back().k = 1;
    CHECK(t.iterations() == 1);
    t.x0 = {0.0, 0.0};
    CHECK(code_of([&] { t.validate(); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("Error carries its code in the message") {
    const Error e(ErrorCode::SchemaMismatch, "bad tag");
    CHECK(e.code() == ErrorCode::SchemaMismatch);
    CHECK(std::string(e.what()) == "SchemaMismatch: bad tag");
}
