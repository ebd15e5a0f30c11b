#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cmc/branch_io.hpp"
#include "cmc/closed_form.hpp"
#include "cmc/profile_geometry.hpp"
#include "cmc/shooting.hpp"

using namespace cmc;

namespace {

constexpr double kPi = 3.14159265358979323846;
const ModelParams kParams{1, 1, 0.0};

Trajectory half_trajectory(const char* preset) {
    const ShootingPoint P = preset_point(preset);
    const ShootingPoint R = refine_fixed_H(kParams, P.H, P.a, P.T);
    return shoot(kParams, R).trajectory;
}

std::vector<Point2> circle_polyline(double cx, double cy, double r, int n) {
    std::vector<Point2> pts;
    for (int i = 0; i <= n; ++i) {
        const double ang = 2 * kPi * i / n;
        pts.push_back({cx + r * std::cos(ang), cy + r * std::sin(ang)});
    }
    return pts;
}

}  // namespace

TEST_CASE("periodic extension closes exactly and keeps the ODE") {
    const Trajectory half = half_trajectory("Z1");
    const ClosedProfile prof = extend_periodic(half, 2000);

    REQUIRE(prof.points.size() == 4001);
    CHECK(prof.period == doctest::Approx(2 * half.t_end()).epsilon(1e-14));
    const Point2& first = prof.points.front();
    const Point2& last = prof.points.back();
    CHECK(std::hypot(first[0] - last[0], first[1] - last[1]) < 1e-8);

    // Substitute reflected states into the flow: the second half solves the
    // same system.
    const ModelParams p = with_H(kParams, -0.707791);
    for (int k = 1; k < 100; ++k) {
        const size_t i = 2000 + k * 19;  // samples of the mirrored half
        const double t = prof.ts[i];
        const double tau = prof.period - t;
        const ProfileState orig = half.evaluate(tau);
        const ProfileState refl{t, prof.points[i][0], prof.points[i][1],
                                prof.thetas[i]};
        CHECK(std::abs(refl.f1 + orig.f1) < 1e-12);
        const auto d_orig = rhs(p, orig);
        const auto d_refl = rhs(p, refl);
        CHECK(std::abs(d_refl[2] - d_orig[2]) < 1e-8);
        CHECK(std::abs(d_refl[0] - d_orig[0]) < 1e-12);
    }
    // theta is unwrapped over the period: ends one full turn up.
    CHECK(prof.thetas.back() ==
          doctest::Approx(prof.thetas.front() + 2 * kPi).epsilon(1e-9));
}

TEST_CASE("extension rejects non-closing trajectories") {
    const ModelParams p = with_H(kParams, 0.0);
    const Trajectory open = integrate(p, {0.0, 0.0, 0.73801, 0.0}, 2.0);
    CHECK_THROWS_AS(extend_periodic(open, 100), NotClosable);
}

TEST_CASE("synthetic fixtures: square and figure-eight") {
    const std::vector<Point2> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const auto sq = polyline_embeddedness(square, true);
    CHECK(sq.embedded);
    CHECK(sq.crossings.empty());

    const std::vector<Point2> eight{{0, 0}, {1, 1}, {1, 0}, {0, 1}};
    const auto e8 = polyline_embeddedness(eight, true);
    CHECK_FALSE(e8.embedded);
    CHECK(e8.crossings.size() == 1);
    CHECK(e8.crossings[0].where[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(e8.crossings[0].where[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("embeddedness of family members near the transition") {
    // Fully embedded member.
    const auto z4 = is_embedded(extend_periodic(half_trajectory("Z4"), 2000));
    CHECK(z4.embedded);

    // At the published first-nonembedded point the profile still clears
    // itself by ~2.3e-5; the true transition sits slightly later in H.
    const auto z5 = is_embedded(extend_periodic(half_trajectory("Z5"), 2000));
    CHECK(z5.embedded);
    CHECK(z5.min_self_distance > 2.0e-5);
    CHECK(z5.min_self_distance < 2.6e-5);

    // The minimal member is past the transition.
    const auto z6 = is_embedded(extend_periodic(half_trajectory("Z6"), 2000));
    CHECK_FALSE(z6.embedded);
    REQUIRE(z6.crossings.size() == 2);
    CHECK(z6.crossings[0].where[0] == doctest::Approx(0.592238).epsilon(1e-4));
    CHECK(z6.crossings[0].where[1] == doctest::Approx(0.569761).epsilon(1e-4));
}

TEST_CASE("serial and parallel kernels produce identical reports") {
    const ClosedProfile prof = extend_periodic(half_trajectory("Z6"), 1500);
    const auto ser = is_embedded(prof, 1e-9, Execution::Serial);
    const auto par = is_embedded(prof, 1e-9, Execution::Parallel);
    CHECK(ser.embedded == par.embedded);
    CHECK(ser.min_self_distance == par.min_self_distance);
    REQUIRE(ser.crossings.size() == par.crossings.size());
    for (size_t i = 0; i < ser.crossings.size(); ++i) {
        CHECK(ser.crossings[i].seg_a == par.crossings[i].seg_a);
        CHECK(ser.crossings[i].seg_b == par.crossings[i].seg_b);
        CHECK(ser.crossings[i].where[0] == par.crossings[i].where[0]);
    }

    const auto A = circle_polyline(0, 0, 1, 777);
    const auto B = circle_polyline(0.1, 0, 1, 803);
    CHECK(hausdorff(A, B, Execution::Serial) ==
          hausdorff(A, B, Execution::Parallel));

    const auto imm_s = sample_immersion(prof.points, 7, 5, Execution::Serial);
    const auto imm_p = sample_immersion(prof.points, 7, 5, Execution::Parallel);
    REQUIRE(imm_s.size() == imm_p.size());
    for (size_t i = 0; i < imm_s.size(); i += 97)
        for (int c = 0; c < 5; ++c) CHECK(imm_s[i][c] == imm_p[i][c]);
}

TEST_CASE("mean curvature formulas of the construction") {
    const double r = std::sqrt(2.0 / 3.0);
    CHECK(umbilical_H(r) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(clifford_H(r) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(std::abs(clifford_H(1.0 / std::sqrt(3.0))) < 1e-12);
    CHECK_THROWS_AS(umbilical_H(0.0), DomainError);
    CHECK_THROWS_AS(clifford_H(1.0), DomainError);
}

TEST_CASE("equal-curvature radius") {
    const double r = equal_H_radius();
    CHECK(r * r == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(umbilical_H(r) - clifford_H(r) == doctest::Approx(0.0).epsilon(1e-12));

    // The difference changes sign exactly once across the radius range.
    int changes = 0;
    double prev = umbilical_H(0.05) - clifford_H(0.05);
    for (int i = 1; i <= 10000; ++i) {
        const double x = 0.05 + (0.90 * i) / 10000.0;
        const double cur = umbilical_H(x) - clifford_H(x);
        if (cur * prev < 0) ++changes;
        prev = cur;
    }
    CHECK(changes == 1);
}

TEST_CASE("umbilical/Clifford intersection trichotomy") {
    const auto empty = sphere_cylinder_intersection(0.5, 0.6);
    CHECK(empty.kind == IntersectionResult::Kind::Empty);

    const auto circle = sphere_cylinder_intersection(0.6, 0.6);
    CHECK(circle.kind == IntersectionResult::Kind::Circle);
    CHECK(circle.radius_a == doctest::Approx(0.6));

    const auto torus = sphere_cylinder_intersection(0.8, 0.6);
    CHECK(torus.kind == IntersectionResult::Kind::Torus);
    CHECK(torus.radius_a == doctest::Approx(0.6));
    CHECK(torus.radius_b ==
          doctest::Approx(std::sqrt(0.8 * 0.8 - 0.36) / std::sqrt(1 - 0.36))
              .epsilon(1e-12));

    // Near the circle case the torus collapses continuously.
    const auto thin = sphere_cylinder_intersection(0.6 + 1e-4, 0.6);
    CHECK(thin.kind == IntersectionResult::Kind::Torus);
    CHECK(thin.radius_b < 0.02);

    CHECK_THROWS_AS(sphere_cylinder_intersection(1.2, 0.5), DomainError);
}

TEST_CASE("assembled components of the piecewise-CMC hypersurface") {
    const auto comps = assemble_M_components();
    REQUIRE(comps.size() == 8);
    int gammas = 0;
    for (const auto& c : comps) {
        if (c.kind == ComponentSpec::Kind::GammaCircle) {
            ++gammas;
            // A sample point (r, 0, 0, 0, level) lies on the unit sphere.
            CHECK(c.r * c.r + c.level * c.level == doctest::Approx(1.0).epsilon(1e-14));
            CHECK_FALSE(c.H.has_value());
        } else {
            REQUIRE(c.H.has_value());
            CHECK(*c.H == doctest::Approx(0.7071068).epsilon(1e-7));
            CHECK(*c.H == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
        }
        CHECK(c.r * c.r == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    }
    CHECK(gammas == 4);
    // The two Clifford pieces cannot meet: 2 r^2 = 4/3 > 1.
    CHECK(2.0 * comps[2].r * comps[2].r > 1.0);
}

TEST_CASE("immersion samples lie on the unit sphere") {
    const std::vector<Point2> single{{0.0, 0.6}};
    const auto at = sample_immersion(single, 1, 1);
    REQUIRE(at.size() == 1);
    CHECK(at[0][0] == doctest::Approx(0.6));
    CHECK(at[0][1] == 0.0);
    CHECK(at[0][2] == doctest::Approx(0.8));
    CHECK(at[0][4] == 0.0);

    const ClosedProfile prof = extend_periodic(half_trajectory("Z4"), 400);
    for (const auto& x : sample_immersion(prof.points, 6, 6)) {
        const double norm2 =
            x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3] + x[4] * x[4];
        CHECK(std::abs(std::sqrt(norm2) - 1.0) < 1e-10);
    }

    const std::vector<Point2> below{{0.2, -0.1}};
    CHECK_THROWS_AS(sample_immersion(below, 2, 2), DomainError);

    // The top run of the piecewise generator maps into x1^2 + x2^2 = 2/3.
    const PiecewiseCurve M = singular_generator_M(1);
    const double t_mid = 0.5 * (M.breakpoints[1] + M.breakpoints[2]);
    const std::vector<Point2> top{M.point_at(t_mid)};
    for (const auto& x : sample_immersion(top, 8, 8))
        CHECK(x[0] * x[0] + x[1] * x[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("hausdorff distance basics") {
    const auto A = circle_polyline(0, 0, 1, 4000);
    CHECK(hausdorff(A, A) == 0.0);

    const auto B = circle_polyline(0.1, 0, 1, 4000);
    CHECK(hausdorff(A, B) == doctest::Approx(0.1).epsilon(1e-5));

    CHECK_THROWS_AS(hausdorff({}, A), DomainError);
}

TEST_CASE("profiles near the singular ends approach the generators") {
    const auto genM = singular_generator_M(1).sample(4000);
    const auto z1 = extend_periodic(half_trajectory("Z1"), 2000);
    const auto z2 = extend_periodic(half_trajectory("Z2"), 2000);
    const double d1 = hausdorff(z1.points, genM);
    const double d2 = hausdorff(z2.points, genM);
    CHECK(d1 < d2);
    CHECK(d1 == doctest::Approx(0.000426).epsilon(0.2));

    const auto genMf = singular_generator_Mf().sample(4000);
    const auto z10 = extend_periodic(half_trajectory("Z10"), 2000);
    CHECK(hausdorff(z10.points, genMf) < 0.01);
}
