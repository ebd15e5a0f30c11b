#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cmc/ode_core.hpp"
#include "cmc/types.hpp"

namespace cmc {

/// Kernel execution policy.  Parallel variants use OpenMP when available and
/// produce bit-identical results to their serial reference implementations.
enum class Execution { Serial, Parallel };

using Point2 = std::array<double, 2>;

/// Closed 2T-periodic profile polyline with its sample times and unwrapped
/// tangent angles (theta picks up 2 pi over one period).
struct ClosedProfile {
    std::vector<double> ts;
    std::vector<Point2> points;
    std::vector<double> thetas;
    double period = 0.0;  // 2T
    std::string source;
};

struct NotClosable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Extend a half-period trajectory (f1(T) ~ 0, theta(T) ~ pi) to the full
/// closed profile by the reflection
///   (f1, f2, theta)(T + s) = (-f1(T - s), f2(T - s), 2 pi - theta(T - s)),
/// sampled uniformly in t with samples_per_half points per half.
ClosedProfile extend_periodic(const Trajectory& half,
                              int samples_per_half = 2000);

struct Crossing {
    int seg_a, seg_b;
    Point2 where;
};

struct EmbeddednessReport {
    bool embedded;
    std::vector<Crossing> crossings;
    double min_self_distance;  // over non-adjacent segment pairs
};

/// Proper self-intersection test over all non-adjacent segment pairs of a
/// polyline (O(N^2) with a bounding-box prefilter).  `closed` treats the
/// last->first edge as a segment and wraps adjacency.  Intersections within
/// tol of a shared endpoint do not count.  with_distance also reports the
/// minimum segment-to-segment distance over non-adjacent pairs (the costly
/// part of the scan).
EmbeddednessReport polyline_embeddedness(std::span<const Point2> pts,
                                         bool closed, double tol = 1e-9,
                                         Execution exec = Execution::Parallel,
                                         bool with_distance = true);

/// Embeddedness of the hypersurface: on the interior of D+ distinct profile
/// points map to disjoint torus fibers, so the hypersurface is embedded
/// exactly when the closed profile curve is simple.
EmbeddednessReport is_embedded(const ClosedProfile& profile, double tol = 1e-9,
                               Execution exec = Execution::Parallel,
                               bool with_distance = true);

/// Mean curvature of the totally umbilical 3-sphere of radius r in S^4.
double umbilical_H(double r);

/// Mean curvature of the Clifford hypersurface S^2(sqrt(1-r^2)) x S^1(r).
double clifford_H(double r);

/// The radius in (0,1) where the two mean curvatures above agree;
/// its square is 2/3.
double equal_H_radius();

struct IntersectionResult {
    enum class Kind { Empty, Circle, Torus };
    Kind kind;
    double radius_a = 0.0;  // circle radius, or torus first radius (r2)
    double radius_b = 0.0;  // torus second radius r12
};

/// Intersection of the umbilical sphere of radius r1 with the cylinder-type
/// Clifford hypersurface of radius r2: empty for r2 > r1, a circle for
/// r2 = r1, a torus S^1(r2) x S^1(r12) with
/// r12 = sqrt(r1^2 - r2^2) / sqrt(1 - r2^2) for r2 < r1.
IntersectionResult sphere_cylinder_intersection(double r1, double r2);

struct ComponentSpec {
    enum class Kind {
        UmbilicalPlus,
        UmbilicalMinus,
        CliffordM2,
        CliffordM3,
        GammaCircle
    };
    Kind kind;
    int gamma_index = 0;       // 1..4 for GammaCircle
    double r = 0.0;            // defining radius
    double level = 0.0;        // x5 level where applicable
    std::optional<double> H;   // unsigned mean curvature of hypersurface pieces
};

/// The four pieces of the piecewise-CMC hypersurface plus the four singular
/// circles, all at r = sqrt(2/3), |H| = 1/sqrt(2).  Verifies the stated
/// pairwise intersections while assembling.
std::vector<ComponentSpec> assemble_M_components();

/// Sample the immersion over a (theta1, theta2) grid:
/// (f2 cos t1, f2 sin t1, f3 cos t2, f3 sin t2, f1) with f3 recomputed.
std::vector<std::array<double, 5>> sample_immersion(
    std::span<const Point2> profile, int n_theta1, int n_theta2,
    Execution exec = Execution::Parallel);

/// Symmetric point-to-segment Hausdorff distance between two polylines.
double hausdorff(std::span<const Point2> A, std::span<const Point2> B,
                 Execution exec = Execution::Parallel);

}  // namespace cmc
