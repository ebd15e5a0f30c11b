#pragma once

#include <array>
#include <string>
#include <variant>
#include <vector>

#include "cmc/types.hpp"

namespace cmc {

/// One of the four explicit stationary solutions of the profile ODE:
/// the horizontal line f2 = r2, the vertical lines f1 = +-r1, and the
/// circle f1^2 + f2^2 = r1^2 (equivalently f3 = r2).
struct ExplicitSolutionKind {
    enum class Tag { HorizontalF2, VerticalF1Plus, VerticalF1Minus, CircleF3 };
    Tag tag;
    /// r2 for HorizontalF2 / CircleF3, r1 for the vertical lines.
    double radius;
};

/// Constants of the piecewise-CMC configuration in the symmetric case
/// (m = ell, n = 2 ell + 1):
///   H  = -sqrt((n+1)/(3n-1)),
///   r1 =  sqrt((n+1)/(4n)),   r2 = sqrt((3n-1)/(4n)).
struct PwcmcValues {
    double H;
    double r1;
    double r2;
    int n;
};

struct PwcmcConsistency {
    bool feasible;
    PwcmcValues witness{};  // valid only when feasible
    double residual = 0.0;  // mismatch of the combined radius constraints
};

/// |H| forced on the explicit solution of the given kind, with the
/// complementary radius sqrt(1 - radius^2).
double explicit_solution_H(const ExplicitSolutionKind& kind, int ell, int m);

PwcmcValues pwcmc_values(int ell);

/// Solves the three |H| constraints with shared radii as in the symmetric
/// construction; feasible exactly when m = ell.  On infeasible input the
/// residual of the combined constraints (= m - ell) is reported.
PwcmcConsistency pwcmc_consistency(int ell, int m);

/// Complete elliptic integral of the second kind in the parameter-m
/// convention, E(m) = int_0^{pi/2} sqrt(1 - m sin^2 t) dt, for m <= 1.
/// Computed by adaptive quadrature to ~1e-13.
double elliptic_E(double parameter);

/// Point reached after arc length s along the ellipse f1^2 + 2 f2^2 = 1,
/// starting at `start` (projected onto the ellipse), orientation +1 for
/// clockwise and -1 for counterclockwise.  Periodic in s.
std::array<double, 2> ellipse_point_at_arclength(double s,
                                                 std::array<double, 2> start,
                                                 int orientation);

struct CircleArc {
    std::array<double, 2> center;
    double radius;
    double angle0, angle1;  // position angles, traversed angle0 -> angle1
};

struct LineSegment {
    std::array<double, 2> from, to;
};

struct EllipseArc {
    std::array<double, 2> start;  // on f1^2 + 2 f2^2 = 1
    int orientation;              // +1 clockwise, -1 counterclockwise
};

/// Closed singular generator profile, arc-length parameterized on
/// [0, period].  theta is continuous inside each segment and jumps at the
/// interior breakpoints.
struct PiecewiseCurve {
    struct Segment {
        std::variant<CircleArc, LineSegment, EllipseArc> shape;
        double t0, t1;
        double theta_start;  // unwrapped tangent angle at t0
    };

    std::vector<Segment> segments;
    std::vector<double> breakpoints;   // T1..T4
    std::vector<double> theta_jumps;   // jump of theta at each breakpoint
    double period = 0.0;               // 2T
    std::string source;

    std::array<double, 2> point_at(double t) const;
    double theta_at(double t) const;
    /// n+1 samples of the position, uniform in arc length over [0, period].
    std::vector<std::array<double, 2>> sample(int n) const;
};

/// Profile of the piecewise-CMC generator M: quarter circle, two vertical
/// sides and a top run at the radii of pwcmc_values(ell), with breakpoints
///   T1 = pi/4 sqrt(1/n + 1),            T2 = T1 + 1/2 sqrt(3 - 1/n),
///   T3 = T1 + sqrt(1/n + 1) + 1/2 sqrt(3 - 1/n),
///   T4 = T1 + sqrt(1/n + 1) + sqrt(3 - 1/n).
PiecewiseCurve singular_generator_M(int ell);

/// Profile of the singular minimal generator M_f (ell = m = 1): three
/// arcs of the ellipse f1^2 + 2 f2^2 = 1 covering the upper half twice,
/// total length 2 sqrt(2) E(-1).
PiecewiseCurve singular_generator_Mf();

/// Half period of the singular generator endpoints as shooting data:
/// Z0 = (r1, H_pwcmc, T_M) and Zf = (1/sqrt(2), 0, T_Mf).
std::array<double, 3> singular_Z0(int ell);
std::array<double, 3> singular_Zf();

/// Max over `samples` points of |theta'_ODE - theta'_explicit| along the
/// explicit solution of the given kind.  params.H must equal the forced
/// value in magnitude; the traversal orientation is chosen to match its sign.
double residual_on_explicit(const ModelParams& params,
                            const ExplicitSolutionKind& kind, int samples);

}  // namespace cmc
