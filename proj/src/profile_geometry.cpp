#include "cmc/profile_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cmc {

namespace {

constexpr double kPi = 3.14159265358979323846;

double sq(double x) { return x * x; }

struct Seg {
    Point2 a, b;
    double xlo, xhi, ylo, yhi;
};

std::vector<Seg> build_segments(std::span<const Point2> pts, bool closed) {
    const size_t n = pts.size();
    std::vector<Seg> segs;
    if (n < 2) return segs;
    const size_t count = closed ? n : n - 1;
    segs.reserve(count);
    for (size_t i = 0; i < count; ++i) {
        const Point2& a = pts[i];
        const Point2& b = pts[(i + 1) % n];
        segs.push_back({a, b, std::min(a[0], b[0]), std::max(a[0], b[0]),
                        std::min(a[1], b[1]), std::max(a[1], b[1])});
    }
    return segs;
}

// Proper crossing of two open segments; intersections within tol of any
// endpoint are discarded (adjacent segments always share one).
bool proper_crossing(const Seg& s, const Seg& t, double tol, Point2& where) {
    const double rx = s.b[0] - s.a[0], ry = s.b[1] - s.a[1];
    const double ux = t.b[0] - t.a[0], uy = t.b[1] - t.a[1];
    const double den = rx * uy - ry * ux;
    const double wx = t.a[0] - s.a[0], wy = t.a[1] - s.a[1];
    if (std::abs(den) < 1e-300) {
        // Parallel.  Overlapping collinear interiors count as a crossing.
        if (std::abs(wx * ry - wy * rx) > tol) return false;
        const double rlen2 = rx * rx + ry * ry;
        if (rlen2 == 0) return false;
        double p0 = (wx * rx + wy * ry) / rlen2;
        double p1 = p0 + (ux * rx + uy * ry) / rlen2;
        if (p0 > p1) std::swap(p0, p1);
        const double margin = tol / std::sqrt(rlen2);
        if (p1 < margin || p0 > 1.0 - margin) return false;
        const double mid = 0.5 * (std::max(p0, 0.0) + std::min(p1, 1.0));
        where = {s.a[0] + mid * rx, s.a[1] + mid * ry};
        return true;
    }
    const double alpha = (wx * uy - wy * ux) / den;
    const double beta = (wx * ry - wy * rx) / den;
    const double ma = tol / std::max(1e-300, std::hypot(rx, ry));
    const double mb = tol / std::max(1e-300, std::hypot(ux, uy));
    if (alpha < ma || alpha > 1.0 - ma || beta < mb || beta > 1.0 - mb)
        return false;
    where = {s.a[0] + alpha * rx, s.a[1] + alpha * ry};
    return true;
}

double point_segment_dist(const Point2& p, const Point2& a, const Point2& b) {
    const double vx = b[0] - a[0], vy = b[1] - a[1];
    const double wx = p[0] - a[0], wy = p[1] - a[1];
    const double vv = vx * vx + vy * vy;
    const double u = vv > 0 ? std::clamp((wx * vx + wy * vy) / vv, 0.0, 1.0) : 0.0;
    return std::hypot(wx - u * vx, wy - u * vy);
}

double seg_seg_dist(const Seg& s, const Seg& t) {
    return std::min(std::min(point_segment_dist(s.a, t.a, t.b),
                             point_segment_dist(s.b, t.a, t.b)),
                    std::min(point_segment_dist(t.a, s.a, s.b),
                             point_segment_dist(t.b, s.a, s.b)));
}

bool adjacent(size_t i, size_t j, size_t count, bool closed) {
    if (i == j) return true;
    const size_t lo = std::min(i, j), hi = std::max(i, j);
    if (hi - lo == 1) return true;
    return closed && lo == 0 && hi == count - 1;
}

// One row of the pair scan: crossings of segment i against j > i + 1.
// min_dist is only maintained when with_distance is set; the crossing test
// itself runs behind the bounding-box prefilter either way.
void scan_row(const std::vector<Seg>& segs, size_t i, bool closed, double tol,
              bool with_distance, std::vector<Crossing>& out, double& min_dist) {
    const Seg& s = segs[i];
    for (size_t j = i + 2; j < segs.size(); ++j) {
        if (adjacent(i, j, segs.size(), closed)) continue;
        const Seg& t = segs[j];
        if (with_distance) min_dist = std::min(min_dist, seg_seg_dist(s, t));
        if (s.xhi + tol < t.xlo || t.xhi + tol < s.xlo ||
            s.yhi + tol < t.ylo || t.yhi + tol < s.ylo)
            continue;
        Point2 w;
        if (proper_crossing(s, t, tol, w))
            out.push_back({static_cast<int>(i), static_cast<int>(j), w});
    }
}

}  // namespace

ClosedProfile extend_periodic(const Trajectory& half, int samples_per_half) {
    if (half.empty()) throw NotClosable("empty trajectory");
    if (samples_per_half < 2) throw DomainError("need at least 2 samples per half");
    const ProfileState fin = half.final_state();
    if (std::abs(fin.f1) > 1e-6 || std::abs(fin.theta - kPi) > 1e-6)
        throw NotClosable("trajectory does not satisfy the closure conditions: "
                          "f1(T) = " + std::to_string(fin.f1) + ", theta(T) - pi = " +
                          std::to_string(fin.theta - kPi));

    const double T = half.t_end() - half.t_start();
    const double t0 = half.t_start();
    const int n = samples_per_half;

    ClosedProfile out;
    out.period = 2 * T;
    out.ts.reserve(2 * n + 1);
    out.points.reserve(2 * n + 1);
    out.thetas.reserve(2 * n + 1);
    for (int i = 0; i <= 2 * n; ++i) {
        const double t = 2.0 * T * i / (2 * n);
        if (i <= n) {
            const ProfileState s = half.evaluate(t0 + t);
            out.ts.push_back(t);
            out.points.push_back({s.f1, s.f2});
            out.thetas.push_back(s.theta);
        } else {
            const ProfileState s = half.evaluate(t0 + (2 * T - t));
            out.ts.push_back(t);
            out.points.push_back({-s.f1, s.f2});
            out.thetas.push_back(2 * kPi - s.theta);
        }
    }
    return out;
}

EmbeddednessReport polyline_embeddedness(std::span<const Point2> pts,
                                         bool closed, double tol,
                                         Execution exec, bool with_distance) {
    EmbeddednessReport rep{true, {}, std::numeric_limits<double>::infinity()};
    const std::vector<Seg> segs = build_segments(pts, closed);
    if (segs.size() < 3) return rep;
    const size_t n = segs.size();

    if (exec == Execution::Serial) {
        for (size_t i = 0; i < n; ++i)
            scan_row(segs, i, closed, tol, with_distance, rep.crossings,
                     rep.min_self_distance);
    } else {
        // Per-row buffers merged in row order keep the output identical to
        // the serial scan.
        std::vector<std::vector<Crossing>> found(n);
        double global_min = std::numeric_limits<double>::infinity();
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16) reduction(min : global_min)
#endif
        for (long i = 0; i < static_cast<long>(n); ++i) {
            double row_min = std::numeric_limits<double>::infinity();
            scan_row(segs, static_cast<size_t>(i), closed, tol, with_distance,
                     found[i], row_min);
            global_min = std::min(global_min, row_min);
        }
        rep.min_self_distance = global_min;
        for (auto& rows : found)
            rep.crossings.insert(rep.crossings.end(), rows.begin(), rows.end());
    }
    rep.embedded = rep.crossings.empty();
    return rep;
}

EmbeddednessReport is_embedded(const ClosedProfile& profile, double tol,
                               Execution exec, bool with_distance) {
    std::span<const Point2> pts(profile.points);
    // The sampled polyline repeats the start point at the end; drop it and
    // wrap adjacency instead.
    if (pts.size() >= 2) {
        const Point2& a = pts.front();
        const Point2& b = pts.back();
        if (std::hypot(a[0] - b[0], a[1] - b[1]) <= 1e-8)
            pts = pts.first(pts.size() - 1);
    }
    return polyline_embeddedness(pts, /*closed=*/true, tol, exec, with_distance);
}

double umbilical_H(double r) {
    if (!(r > 0.0 && r < 1.0)) throw DomainError("radius must lie in (0,1)");
    return std::sqrt(1.0 - r * r) / r;
}

double clifford_H(double r) {
    if (!(r > 0.0 && r < 1.0)) throw DomainError("radius must lie in (0,1)");
    const double c = std::sqrt(1.0 - r * r);
    return (2.0 * r / c - c / r) / 3.0;
}

double equal_H_radius() {
    // umbilical_H - clifford_H is strictly decreasing with a single zero.
    double lo = 0.05, hi = 0.95;
    auto diff = [](double r) { return umbilical_H(r) - clifford_H(r); };
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (diff(mid) > 0.0 ? lo : hi) = mid;
        if (hi - lo < 1e-16) break;
    }
    return 0.5 * (lo + hi);
}

IntersectionResult sphere_cylinder_intersection(double r1, double r2) {
    if (!(r1 > 0.0 && r1 < 1.0 && r2 > 0.0 && r2 < 1.0))
        throw DomainError("radii must lie in (0,1)");
    if (std::abs(r1 - r2) <= 1e-12)
        return {IntersectionResult::Kind::Circle, r2, 0.0};
    if (r2 > r1) return {IntersectionResult::Kind::Empty, 0.0, 0.0};
    const double r12 = std::sqrt(sq(r1) - sq(r2)) / std::sqrt(1.0 - sq(r2));
    return {IntersectionResult::Kind::Torus, r2, r12};
}

std::vector<ComponentSpec> assemble_M_components() {
    const double r = equal_H_radius();
    const double level = std::sqrt(1.0 - r * r);
    const double H = umbilical_H(r);

    // 2 r^2 = 4/3 > 1, so the two Clifford pieces cannot meet.
    if (!(2.0 * r * r > 1.0))
        throw DomainError("unexpected radius: Clifford pieces would intersect");
    // Each umbilical piece meets each Clifford piece in a circle of radius r.
    const auto meet = sphere_cylinder_intersection(r, r);
    if (meet.kind != IntersectionResult::Kind::Circle ||
        std::abs(meet.radius_a - r) > 1e-12)
        throw DomainError("umbilical/Clifford intersection is not the expected circle");

    using K = ComponentSpec::Kind;
    std::vector<ComponentSpec> out;
    out.push_back({K::UmbilicalPlus, 0, r, level, H});
    out.push_back({K::UmbilicalMinus, 0, r, -level, H});
    out.push_back({K::CliffordM2, 0, r, 0.0, H});
    out.push_back({K::CliffordM3, 0, r, 0.0, H});
    out.push_back({K::GammaCircle, 1, r, level, std::nullopt});
    out.push_back({K::GammaCircle, 2, r, level, std::nullopt});
    out.push_back({K::GammaCircle, 3, r, -level, std::nullopt});
    out.push_back({K::GammaCircle, 4, r, -level, std::nullopt});
    return out;
}

std::vector<std::array<double, 5>> sample_immersion(
    std::span<const Point2> profile, int n_theta1, int n_theta2,
    Execution exec) {
    if (n_theta1 < 1 || n_theta2 < 1)
        throw DomainError("grid sizes must be >= 1");
    for (const Point2& p : profile) {
        if (p[1] < 0.0 || sq(p[0]) + sq(p[1]) > 1.0 + 1e-9)
            throw DomainError("profile point outside the closed half disk");
    }
    const long total =
        static_cast<long>(profile.size()) * n_theta1 * n_theta2;
    std::vector<std::array<double, 5>> out(total);

    auto fill = [&](long idx) {
        const long per_point = static_cast<long>(n_theta1) * n_theta2;
        const long ip = idx / per_point;
        const long rem = idx % per_point;
        const long i1 = rem / n_theta2, i2 = rem % n_theta2;
        const double f1 = profile[ip][0], f2 = profile[ip][1];
        const double f3 = std::sqrt(std::max(0.0, 1.0 - f1 * f1 - f2 * f2));
        const double t1 = 2 * kPi * i1 / n_theta1;
        const double t2 = 2 * kPi * i2 / n_theta2;
        out[idx] = {f2 * std::cos(t1), f2 * std::sin(t1), f3 * std::cos(t2),
                    f3 * std::sin(t2), f1};
    };

    if (exec == Execution::Serial) {
        for (long idx = 0; idx < total; ++idx) fill(idx);
    } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (long idx = 0; idx < total; ++idx) fill(idx);
    }
    return out;
}

namespace {

double directed_hausdorff(std::span<const Point2> A, std::span<const Point2> B,
                          Execution exec) {
    const long n = static_cast<long>(A.size());
    double worst = 0.0;

    auto point_dist = [&](long i) {
        double best = std::numeric_limits<double>::infinity();
        for (size_t j = 0; j + 1 < B.size(); ++j)
            best = std::min(best, point_segment_dist(A[i], B[j], B[j + 1]));
        if (B.size() == 1)
            best = std::hypot(A[i][0] - B[0][0], A[i][1] - B[0][1]);
        return best;
    };

    if (exec == Execution::Serial) {
        for (long i = 0; i < n; ++i) worst = std::max(worst, point_dist(i));
    } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(max : worst)
#endif
        for (long i = 0; i < n; ++i) worst = std::max(worst, point_dist(i));
    }
    return worst;
}

}  // namespace

double hausdorff(std::span<const Point2> A, std::span<const Point2> B,
                 Execution exec) {
    if (A.empty() || B.empty())
        throw DomainError("hausdorff distance of an empty polyline");
    return std::max(directed_hausdorff(A, B, exec),
                    directed_hausdorff(B, A, exec));
}

}  // namespace cmc
