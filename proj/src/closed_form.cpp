#include "cmc/closed_form.hpp"

#include <algorithm>
#include <cmath>

#include "cmc/ode_core.hpp"

namespace cmc {

namespace {

constexpr double kPi = 3.14159265358979323846;

double sq(double x) { return x * x; }

// Adaptive Simpson quadrature; the integrands here are smooth.
template <typename F>
double simpson_rec(const F& f, double a, double b, double fa, double fm,
                   double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6 * (fm + 4 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15 * tol)
        return left + right + delta / 15;
    return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double tol = 1e-14) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6 * (fa + 4 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

// --- ellipse f1^2 + 2 f2^2 = 1, parameterized as (sin psi, cos(psi)/sqrt(2)).
// Increasing psi moves clockwise; speed is sqrt(1 - sin(psi)^2 / 2).

double ellipse_speed(double psi) {
    return std::sqrt(1.0 - 0.5 * sq(std::sin(psi)));
}

std::array<double, 2> ellipse_point(double psi) {
    return {std::sin(psi), std::cos(psi) / std::sqrt(2.0)};
}

double ellipse_arclen(double psi0, double psi1) {
    return adaptive_simpson(ellipse_speed, psi0, psi1);
}

// psi >= psi0 such that the arc from psi0 has length s >= 0.
double ellipse_advance(double psi0, double s) {
    if (s == 0.0) return psi0;
    // speed in [1/sqrt(2), 1] brackets the answer.
    double lo = psi0 + s, hi = psi0 + s * std::sqrt(2.0);
    double psi = psi0 + s * 1.19;  // mean speed guess
    for (int it = 0; it < 60; ++it) {
        const double err = ellipse_arclen(psi0, psi) - s;
        if (std::abs(err) < 1e-14) break;
        (err > 0 ? hi : lo) = psi;
        double next = psi - err / ellipse_speed(psi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == psi) break;
        psi = next;
    }
    return psi;
}

double ellipse_psi_of(const std::array<double, 2>& p) {
    return std::atan2(p[0], std::sqrt(2.0) * p[1]);
}

// Tangent angle of the ellipse traversal at parameter psi.
double ellipse_theta(double psi, int orientation) {
    const double sp = ellipse_speed(psi);
    const double tx = orientation * std::cos(psi) / sp;
    const double ty = orientation * (-std::sin(psi) / std::sqrt(2.0)) / sp;
    return std::atan2(ty, tx);
}

const PiecewiseCurve::Segment& segment_for(const PiecewiseCurve& c, double t) {
    for (const auto& seg : c.segments)
        if (t <= seg.t1 || &seg == &c.segments.back()) return seg;
    return c.segments.back();
}

}  // namespace

double explicit_solution_H(const ExplicitSolutionKind& kind, int ell, int m) {
    if (ell < 1 || m < 1) throw DomainError("ell and m must be >= 1");
    if (!(kind.radius > 0.0 && kind.radius < 1.0))
        throw DomainError("explicit solution radius must lie in (0,1)");
    const double n = ell + m + 1;
    const double comp = std::sqrt(1.0 - sq(kind.radius));
    switch (kind.tag) {
        case ExplicitSolutionKind::Tag::HorizontalF2: {
            const double r2 = kind.radius, r1 = comp;
            return std::abs(n * sq(r2) - ell) / (n * r1 * r2);
        }
        case ExplicitSolutionKind::Tag::VerticalF1Plus:
        case ExplicitSolutionKind::Tag::VerticalF1Minus: {
            const double r1 = kind.radius, r2 = comp;
            return r1 / r2;
        }
        case ExplicitSolutionKind::Tag::CircleF3: {
            const double r2 = kind.radius, r1 = comp;
            return std::abs(ell + 1 - n * sq(r1)) / (n * r1 * r2);
        }
    }
    throw DomainError("unknown explicit solution tag");
}

PwcmcValues pwcmc_values(int ell) {
    if (ell < 1) throw DomainError("ell must be >= 1");
    const int n = 2 * ell + 1;
    const double nd = n;
    return {-std::sqrt((nd + 1) / (3 * nd - 1)),
            std::sqrt((nd + 1) / (4 * nd)),
            std::sqrt((3 * nd - 1) / (4 * nd)),
            n};
}

PwcmcConsistency pwcmc_consistency(int ell, int m) {
    if (ell < 1 || m < 1) throw DomainError("ell and m must be >= 1");
    const int n = ell + m + 1;
    // The vertical/circle constraint forces n r1^2 = (1 + ell)/2; feeding it
    // into the horizontal constraint n r2^2 = ell + n r1^2 and the identity
    // r1^2 + r2^2 = 1 leaves the residual n - (2 ell + 1).
    const double residual = n - (2.0 * ell + 1.0);
    if (residual == 0.0) return {true, pwcmc_values(ell), 0.0};
    return {false, {}, residual};
}

double elliptic_E(double parameter) {
    if (parameter > 1.0)
        throw DomainError("elliptic_E requires parameter <= 1");
    if (parameter == 0.0) return kPi / 2;
    const double m = parameter;
    auto integrand = [m](double t) {
        return std::sqrt(std::max(0.0, 1.0 - m * sq(std::sin(t))));
    };
    return adaptive_simpson(integrand, 0.0, kPi / 2, 1e-15);
}

std::array<double, 2> ellipse_point_at_arclength(double s,
                                                 std::array<double, 2> start,
                                                 int orientation) {
    const double quarter = elliptic_E(0.5);
    const double perimeter = 4.0 * quarter;
    s = std::fmod(s, perimeter);
    if (s < 0) s += perimeter;
    const double psi0 = ellipse_psi_of(start);
    if (orientation >= 0) return ellipse_point(ellipse_advance(psi0, s));
    // Counterclockwise: advance by -s, using the mirror symmetry psi -> -psi.
    return ellipse_point(-ellipse_advance(-psi0, s));
}

std::array<double, 2> PiecewiseCurve::point_at(double t) const {
    t = std::fmod(t, period);
    if (t < 0) t += period;
    const Segment& seg = segment_for(*this, t);
    const double u = t - seg.t0;
    if (const auto* arc = std::get_if<CircleArc>(&seg.shape)) {
        const double span = arc->angle1 - arc->angle0;
        const double len = arc->radius * std::abs(span);
        const double ang = arc->angle0 + span * (u / len);
        return {arc->center[0] + arc->radius * std::cos(ang),
                arc->center[1] + arc->radius * std::sin(ang)};
    }
    if (const auto* line = std::get_if<LineSegment>(&seg.shape)) {
        const double len = std::hypot(line->to[0] - line->from[0],
                                      line->to[1] - line->from[1]);
        const double w = u / len;
        return {line->from[0] + w * (line->to[0] - line->from[0]),
                line->from[1] + w * (line->to[1] - line->from[1])};
    }
    const auto& el = std::get<EllipseArc>(seg.shape);
    return ellipse_point_at_arclength(u, el.start, el.orientation);
}

double PiecewiseCurve::theta_at(double t) const {
    t = std::fmod(t, period);
    if (t < 0) t += period;
    const Segment& seg = segment_for(*this, t);
    const double u = t - seg.t0;
    if (const auto* arc = std::get_if<CircleArc>(&seg.shape)) {
        const double span = arc->angle1 - arc->angle0;
        // Tangent angle advances linearly with arc length.
        return seg.theta_start + (span > 0 ? 1.0 : -1.0) * u / arc->radius;
    }
    if (std::get_if<LineSegment>(&seg.shape)) return seg.theta_start;
    const auto& el = std::get<EllipseArc>(seg.shape);
    const double psi0 = ellipse_psi_of(el.start);
    const double psi = el.orientation >= 0 ? ellipse_advance(psi0, u)
                                           : -ellipse_advance(-psi0, u);
    double th = ellipse_theta(psi, el.orientation);
    // theta rotates monotonically along an elliptic arc (none here exceeds a
    // half turn): unwrap into [theta_start, theta_start + pi] for ccw arcs
    // and [theta_start - pi, theta_start] for cw arcs.
    const double lo = el.orientation >= 0 ? seg.theta_start - kPi : seg.theta_start;
    const double hi = lo + kPi;
    while (th < lo - 1e-9) th += 2 * kPi;
    while (th > hi + 1e-9) th -= 2 * kPi;
    return th;
}

std::vector<std::array<double, 2>> PiecewiseCurve::sample(int n) const {
    std::vector<std::array<double, 2>> pts;
    pts.reserve(n + 1);
    for (int i = 0; i <= n; ++i) pts.push_back(point_at(period * i / n));
    return pts;
}

PiecewiseCurve singular_generator_M(int ell) {
    const PwcmcValues v = pwcmc_values(ell);
    const double n = v.n;
    const double r1 = v.r1, r2 = v.r2;

    const double T1 = 0.25 * kPi * std::sqrt(1.0 / n + 1.0);
    const double T2 = T1 + 0.5 * std::sqrt(3.0 - 1.0 / n);
    const double T3 = T1 + std::sqrt(1.0 / n + 1.0) + 0.5 * std::sqrt(3.0 - 1.0 / n);
    const double T4 = T1 + std::sqrt(1.0 / n + 1.0) + std::sqrt(3.0 - 1.0 / n);
    const double twoT = 0.5 * kPi * std::sqrt(1.0 / n + 1.0) +
                        std::sqrt(1.0 / n + 1.0) + std::sqrt(3.0 - 1.0 / n);

    PiecewiseCurve c;
    c.period = twoT;
    c.breakpoints = {T1, T2, T3, T4};
    c.source = "generator_M(ell=" + std::to_string(ell) + ")";
    // Quarter circle (0,r1) -> (r1,0), then up, across and down the box,
    // then the mirror quarter circle back to the start.
    c.segments = {
        {CircleArc{{0, 0}, r1, kPi / 2, 0.0}, 0.0, T1, 0.0},
        {LineSegment{{r1, 0}, {r1, r2}}, T1, T2, kPi / 2},
        {LineSegment{{r1, r2}, {-r1, r2}}, T2, T3, kPi},
        {LineSegment{{-r1, r2}, {-r1, 0}}, T3, T4, 3 * kPi / 2},
        {CircleArc{{0, 0}, r1, kPi, kPi / 2}, T4, twoT, kPi / 2},
    };
    c.theta_jumps = {kPi, kPi / 2, kPi / 2, -kPi};
    return c;
}

PiecewiseCurve singular_generator_Mf() {
    const double quarter = elliptic_E(0.5);  // = sqrt(2) E(-1) / 2
    const double twoT = 4.0 * quarter;
    const double T1 = quarter, T2 = 2 * quarter, T3 = 3 * quarter;
    const double a0 = 1.0 / std::sqrt(2.0);

    PiecewiseCurve c;
    c.period = twoT;
    c.breakpoints = {T1, T2, T3, twoT};
    c.source = "generator_Mf";
    // Clockwise quarter to (1,0), counterclockwise half over the top to
    // (-1,0), clockwise quarter back up to (0, 1/sqrt(2)).
    c.segments = {
        {EllipseArc{{0.0, a0}, +1}, 0.0, T1, 0.0},
        {EllipseArc{{1.0, 0.0}, -1}, T1, T3, kPi / 2},
        {EllipseArc{{-1.0, 0.0}, +1}, T3, twoT, kPi / 2},
    };
    // theta is continuous at T2 (top of the half arc) and at the period wrap.
    c.theta_jumps = {kPi, 0.0, -kPi, 0.0};
    return c;
}

std::array<double, 3> singular_Z0(int ell) {
    const PwcmcValues v = pwcmc_values(ell);
    return {v.r1, v.H, 0.5 * singular_generator_M(ell).period};
}

std::array<double, 3> singular_Zf() {
    return {1.0 / std::sqrt(2.0), 0.0, 2.0 * elliptic_E(0.5)};
}

double residual_on_explicit(const ModelParams& params,
                            const ExplicitSolutionKind& kind, int samples) {
    if (samples < 1) throw DomainError("samples must be >= 1");
    const double target = explicit_solution_H(kind, params.ell, params.m);
    if (std::abs(std::abs(params.H) - target) > 1e-9)
        throw DomainError("params.H does not match the value forced by this solution kind");

    const double n = params.n();
    const double r = kind.radius;
    const double comp = std::sqrt(1.0 - sq(r));

    // Explicit state and theta' as functions of a traversal parameter u in
    // (0, 1); orientation picked so the signed H closes the bracket.
    struct Sample {
        ProfileState state;
        double dtheta;
    };
    auto make = [&](double u) -> Sample {
        switch (kind.tag) {
            case ExplicitSolutionKind::Tag::HorizontalF2: {
                const double r2 = r, r1 = comp;
                const double span = 1.8 * r1, t = (u - 0.5) * span;
                // theta = pi closes the bracket for H = (ell - n r2^2)/(n r1 r2).
                const bool pi_side =
                    params.H * (n * sq(r2) - params.ell) <= 0.0;
                return {{t, pi_side ? -t : t, r2, pi_side ? kPi : 0.0}, 0.0};
            }
            case ExplicitSolutionKind::Tag::VerticalF1Plus:
            case ExplicitSolutionKind::Tag::VerticalF1Minus: {
                const double r1 = r, r2 = comp;
                const double f2 = r2 * (0.05 + 0.9 * u);
                const bool plus =
                    kind.tag == ExplicitSolutionKind::Tag::VerticalF1Plus;
                // On f1 = +r1 the upward traversal closes the bracket for
                // H = -r1/r2; on f1 = -r1 the roles swap.
                const bool upward = plus ? (params.H <= 0) : (params.H > 0);
                const double theta = upward ? kPi / 2 : -kPi / 2;
                return {{f2, plus ? r1 : -r1, f2, theta}, 0.0};
            }
            case ExplicitSolutionKind::Tag::CircleF3: {
                const double r1 = comp;
                const double ang = (u - 0.5) * 0.9 * kPi;  // keep f2 > 0
                if (params.H * (n * sq(r1) - params.ell - 1) >= 0.0) {
                    // f1 = r1 sin(t/r1), theta = -t/r1.
                    return {{r1 * ang, r1 * std::sin(ang), r1 * std::cos(ang),
                             -ang},
                            -1.0 / r1};
                }
                // Mirrored orientation: f1 = -r1 sin(t/r1), theta = pi + t/r1.
                return {{r1 * ang, -r1 * std::sin(ang), r1 * std::cos(ang),
                         kPi + ang},
                        1.0 / r1};
            }
        }
        throw DomainError("unknown explicit solution tag");
    };

    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double u = samples == 1 ? 0.5 : double(i) / (samples - 1);
        const Sample s = make(u);
        const auto d = rhs(params, s.state);
        worst = std::max(worst, std::abs(d[2] - s.dtheta));
    }
    return worst;
}

}  // namespace cmc
