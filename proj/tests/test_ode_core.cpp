#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cmc/branch_io.hpp"
#include "cmc/ode_core.hpp"

using namespace cmc;

namespace {
constexpr double kPi = 3.14159265358979323846;
const double kSqrt3 = std::sqrt(3.0);
}  // namespace

TEST_CASE("derived quantities at simple states") {
    // Initial-condition state (0, a, 0).
    const auto d = derived({0.0, 0.0, 0.6, 0.0});
    CHECK(d.g == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(d.h == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(d.f3 == doctest::Approx(0.8).epsilon(1e-14));

    // (0.1, sqrt(2/3), pi).
    const double r2 = std::sqrt(2.0 / 3.0);
    const auto e = derived({0.0, 0.1, r2, kPi});
    CHECK(e.g == doctest::Approx(-r2).epsilon(1e-12));
    CHECK(e.h == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-12));
    CHECK(e.f3 == doctest::Approx(std::sqrt(1.0 - 0.01 - 2.0 / 3.0)).epsilon(1e-12));

    // On the unit circle f3 vanishes.
    CHECK(derived({0.0, 0.6, 0.8, 1.234}).f3 == 0.0);

    CHECK_THROWS_AS(derived({0.0, 0.8, 0.7, 0.0}), DomainError);
}

TEST_CASE("rhs at special states") {
    // ell - n f2^2 = 0 kills the bracket at the minimal-Clifford height.
    const ModelParams minimal{1, 1, 0.0};
    const auto d0 = rhs(minimal, {0.0, 0.0, 1.0 / kSqrt3, 0.0});
    CHECK(d0[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(d0[1] == 0.0);
    CHECK(std::abs(d0[2]) < 1e-13);

    // Stationary horizontal solution f2 = sqrt(2/3) at H = -1/sqrt(2).
    const ModelParams pw{1, 1, -1.0 / std::sqrt(2.0)};
    const auto d1 = rhs(pw, {0.0, 0.1, std::sqrt(2.0 / 3.0), kPi});
    CHECK(d1[0] == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(std::abs(d1[1]) < 1e-15);
    CHECK(std::abs(d1[2]) < 1e-12);

    // Circle solution: theta' = -sqrt(3) at any point of the arc.
    const double s = 0.3;
    const auto d2 = rhs(pw, {0.0, std::sin(s) / kSqrt3, std::cos(s) / kSqrt3, -s});
    CHECK(d2[2] == doctest::Approx(-kSqrt3).epsilon(1e-11));
}

TEST_CASE("rhs floor guards") {
    const ModelParams p{1, 1, 0.0};
    try {
        rhs(p, {0.7, 0.1, 1e-8, 0.0});
        FAIL("expected SingularEncounter");
    } catch (const SingularEncounter& e) {
        CHECK(e.floor == SingularEncounter::Floor::F2);
        CHECK(e.t_hit == doctest::Approx(0.7));
    }
    try {
        rhs(p, {0.0, 0.6, 0.8, 0.0});  // exactly on the unit circle
        FAIL("expected SingularEncounter");
    } catch (const SingularEncounter& e) {
        CHECK(e.floor == SingularEncounter::Floor::F3Sq);
    }
}

TEST_CASE("arc-length identity holds for random states") {
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> ang(-10.0, 10.0);
    std::uniform_real_distribution<double> rad(0.05, 0.95);
    const ModelParams p{2, 3, 0.4};
    for (int i = 0; i < 2000; ++i) {
        const double r = rad(rng), phi = ang(rng);
        const ProfileState s{0.0, r * std::cos(phi), 0.3 + 0.6 * rad(rng), ang(rng)};
        if (s.f1 * s.f1 + s.f2 * s.f2 >= 0.999) continue;
        const auto d = rhs(p, s);
        CHECK(std::abs(d[0] * d[0] + d[1] * d[1] - 1.0) <= 1e-15);
    }
}

TEST_CASE("stationary horizontal solution integrates exactly") {
    const ModelParams pw{1, 1, -1.0 / std::sqrt(2.0)};
    const ProfileState init{0.0, 0.0, std::sqrt(2.0 / 3.0), kPi};
    const Trajectory traj = integrate(pw, init, 0.5);
    for (double t : {0.1, 0.25, 0.5}) {
        const ProfileState s = traj.evaluate(t);
        CHECK(s.f1 == doctest::Approx(-t).epsilon(1e-9));
        CHECK(s.f2 == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-9));
        CHECK(s.theta == doctest::Approx(kPi).epsilon(1e-9));
    }
}

TEST_CASE("minimal-Clifford height rides the straight line into the boundary") {
    // At H = 0 the state (0, 1/sqrt(3), 0) lies on the stationary horizontal
    // solution f2 = 1/sqrt(3): the bracket vanishes identically, so the
    // profile runs straight to the unit circle at t = sqrt(2/3) and the
    // integrator reports the floor with the partial trajectory attached.
    const ModelParams p{1, 1, 0.0};
    try {
        integrate(p, {0.0, 0.0, 1.0 / kSqrt3, 0.0}, 1.0);
        FAIL("expected SingularEncounter");
    } catch (const SingularEncounter& e) {
        CHECK(e.floor == SingularEncounter::Floor::F3Sq);
        CHECK(e.t_hit == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-5));
        REQUIRE_FALSE(e.partial_trajectory.empty());
        // Away from the blow-up at the circle the line is followed exactly;
        // the 1/f3^2 factor amplifies roundoff in the last few steps.
        const ProfileState mid = e.partial_trajectory.evaluate(0.5);
        CHECK(mid.f2 == doctest::Approx(1.0 / kSqrt3).epsilon(1e-9));
        CHECK(std::abs(mid.theta) < 1e-7);
        CHECK(std::abs(mid.f1 - 0.5) < 1e-7);
        CHECK(e.partial_trajectory.t_start() == 0.0);

        // The fixed-step reference follows the same line.
        try {
            integrate_fixed_rk4(p, {0.0, 0.0, 1.0 / kSqrt3, 0.0}, 1.0, 1e-4);
            FAIL("expected SingularEncounter from the reference integrator");
        } catch (const SingularEncounter& r) {
            CHECK(r.t_hit == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-3));
        }
    }
}

TEST_CASE("published minimal point closes the profile") {
    const ModelParams p{1, 1, 0.0};
    const Trajectory traj = integrate(p, {0.0, 0.0, 0.73801, 0.0}, 2.51519);
    CHECK(std::abs(traj.final_state().f1) < 1e-5);
    CHECK(std::abs(traj.final_state().theta - kPi) < 1e-5);
}

TEST_CASE("integrate validates inputs and reports limits") {
    const ModelParams p{1, 1, 0.0};
    CHECK_THROWS_AS(integrate(p, {0.0, 0.0, 0.7, 0.0}, -1.0), DomainError);

    IntegratorConfig tiny;
    tiny.max_steps = 5;
    CHECK_THROWS_AS(integrate(p, {0.0, 0.0, 0.73801, 0.0}, 2.5, tiny),
                    MaxStepsExceeded);
}

TEST_CASE("evaluate: nodes are exact, interior matches the reference") {
    const ModelParams p{1, 1, 0.0};
    const ProfileState init{0.0, 0.0, 0.73801, 0.0};
    const Trajectory traj = integrate(p, init, 2.0);

    const auto& nodes = traj.nodes();
    const auto& mid = nodes[nodes.size() / 2];
    const ProfileState at_node = traj.evaluate(mid.state.t);
    CHECK(at_node.f1 == mid.state.f1);
    CHECK(at_node.f2 == mid.state.f2);
    CHECK(at_node.theta == mid.state.theta);

    const ProfileState at_start = traj.evaluate(0.0);
    CHECK(at_start.f2 == init.f2);

    // Dense output between nodes vs an independent fixed-step run.
    const double tq = 0.5 * (nodes[3].state.t + nodes[4].state.t);
    const Trajectory ref = integrate_fixed_rk4(p, init, tq, 1e-5);
    const ProfileState si = traj.evaluate(tq);
    CHECK(si.f1 == doctest::Approx(ref.final_state().f1).epsilon(1e-8));
    CHECK(si.f2 == doctest::Approx(ref.final_state().f2).epsilon(1e-8));
    CHECK(si.theta == doctest::Approx(ref.final_state().theta).epsilon(1e-8));

    CHECK_THROWS_AS(traj.evaluate(2.5), OutOfRangeError);
    CHECK_THROWS_AS(traj.evaluate(-0.1), OutOfRangeError);
}

TEST_CASE("sphere identity at every accepted node") {
    const ModelParams p{1, 1, -0.3};
    const Trajectory traj = integrate(p, {0.0, 0.0, 0.6, 0.0}, 2.0);
    for (const auto& n : traj.nodes()) {
        const auto d = derived(n.state);
        const double sum =
            n.state.f1 * n.state.f1 + n.state.f2 * n.state.f2 + d.f3 * d.f3;
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("fixed-step mode converges at order >= 4 on the minimal trajectory") {
    const ModelParams p{1, 1, 0.0};
    const ProfileState init{0.0, 0.0, 0.73801, 0.0};
    const double T = 2.51519;

    IntegratorConfig tight;
    tight.abs_tol = tight.rel_tol = 1e-13;
    const ProfileState ref = integrate(p, init, T, tight).final_state();

    auto endpoint_err = [&](double h) {
        IntegratorConfig fixed;
        fixed.adaptive = false;
        fixed.max_step = h;
        const ProfileState s = integrate(p, init, T, fixed).final_state();
        return std::max({std::abs(s.f1 - ref.f1), std::abs(s.f2 - ref.f2),
                         std::abs(s.theta - ref.theta)});
    };

    const double e1 = endpoint_err(0.0025);
    const double e2 = endpoint_err(0.00125);
    CHECK(e1 > 1e-8);  // above roundoff, the ratio is meaningful
    CHECK(e1 / e2 >= 16.0);
}

TEST_CASE("reflection symmetry of the flow") {
    const ModelParams p{1, 1, -0.707791};
    const Trajectory traj = integrate(p, {0.0, 0.0, 0.577096, 0.0}, 2.30054);
    const double That2 = traj.t_end();
    for (int k = 0; k <= 100; ++k) {
        const double t = That2 * k / 100.0;
        const ProfileState orig = traj.evaluate(That2 - t);
        const ProfileState refl{t, -orig.f1, orig.f2, -orig.theta};
        const auto d_orig = rhs(p, orig);
        const auto d_refl = rhs(p, refl);
        // d/dt of the reflected path is (f1'(tau), -f2'(tau), theta'(tau)).
        CHECK(std::abs(d_refl[0] - d_orig[0]) < 1e-8);
        CHECK(std::abs(d_refl[1] + d_orig[1]) < 1e-8);
        CHECK(std::abs(d_refl[2] - d_orig[2]) < 1e-8);
    }
}

TEST_CASE("adaptive and fixed-step reference agree along published solutions") {
    // The corners of the near-singular profiles drive both error sources:
    // the classical reference needs h = 1e-6 through them, and the order-4
    // continuous extension needs the tolerance at 1e-12 so the sampled
    // comparison sees stepper accuracy rather than interpolant error.
    const struct {
        double a, H, T;
    } cases[] = {{0.577096, -0.707791, 2.30054}, {0.73801, 0.0, 2.51519}};
    for (const auto& c : cases) {
        const ModelParams p{1, 1, c.H};
        const ProfileState init{0.0, 0.0, c.a, 0.0};
        IntegratorConfig tight;
        tight.abs_tol = tight.rel_tol = 1e-12;
        const Trajectory adaptive = integrate(p, init, c.T, tight);
        const Trajectory ref = integrate_fixed_rk4(p, init, c.T, 1e-6);
        double sup = 0.0;
        for (int k = 0; k <= 500; ++k) {
            const double t = c.T * k / 500.0;
            const ProfileState sa = adaptive.evaluate(t);
            const ProfileState sr = ref.evaluate(t);
            sup = std::max({sup, std::abs(sa.f1 - sr.f1), std::abs(sa.f2 - sr.f2),
                            std::abs(sa.theta - sr.theta)});
        }
        CHECK(sup < 1e-8);
    }
}

TEST_CASE("trajectory minima scan matches a brute-force dense scan") {
    const ModelParams p{1, 1, 0.0};
    const Trajectory traj = integrate(p, {0.0, 0.0, 0.73801, 0.0}, 2.51519);
    const auto [mf2, mf3] = traj.min_f2_f3();
    double bf2 = 1e9, bf3 = 1e9;
    for (int k = 0; k <= 20000; ++k) {
        const ProfileState s = traj.evaluate(2.51519 * k / 20000.0);
        bf2 = std::min(bf2, s.f2);
        bf3 = std::min(bf3, derived(s).f3);
    }
    CHECK(mf2 == doctest::Approx(bf2).epsilon(1e-4));
    CHECK(mf3 == doctest::Approx(bf3).epsilon(1e-4));
}
