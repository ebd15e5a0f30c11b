#include "cmc/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "cmc/closed_form.hpp"

namespace cmc {

namespace {

Vec3 normalized(const Vec3& v) {
    const double n = norm(v);
    if (!(n > 0.0)) throw IllConditioned("zero tangent");
    return scaled(v, 1.0 / n);
}

double dist(const ShootingPoint& A, const ShootingPoint& B) {
    return norm(A.vec() - B.vec());
}

struct CorrectedPoint {
    ShootingPoint Z;
    double r_f1, r_theta;
    double min_f2, min_f3;
};

CorrectedPoint corrected_report(const ModelParams& params,
                                const ShootingPoint& Z,
                                const ContinuationConfig& cfg) {
    ResidualReport rep = shoot(params, Z, cfg.integrator);
    return {Z, rep.r_f1, rep.r_theta, rep.min_f2, rep.min_f3};
}

// Classify which singular generator a terminal point approached by
// proximity in (a, H, T) to the closed-form limits.
BranchTerminus classify_endpoint(const ModelParams& params,
                                 const ShootingPoint& Z) {
    const auto z0 = singular_Z0(params.ell);
    const double d0 = norm(Z.vec() - Vec3{z0[0], z0[1], z0[2]});
    if (params.ell == 1 && params.m == 1) {
        const auto zf = singular_Zf();
        const double df = norm(Z.vec() - Vec3{zf[0], zf[1], zf[2]});
        return df < d0 ? BranchTerminus::SingularMf : BranchTerminus::SingularM;
    }
    return d0 < 0.25 ? BranchTerminus::SingularM : BranchTerminus::SingularMf;
}

void classify_embeddedness(const ModelParams& params, Branch& branch,
                           const ContinuationConfig& cfg) {
    const long n = static_cast<long>(branch.points.size());
    branch.profiles.resize(n);
    std::exception_ptr failure = nullptr;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 4)
#endif
    for (long i = 0; i < n; ++i) {
        try {
            BranchPoint& bp = branch.points[i];
            ResidualReport rep = shoot(params, bp.Z, cfg.integrator);
            branch.profiles[i] = extend_periodic(rep.trajectory,
                                                 cfg.profile_samples_per_half);
            branch.profiles[i].source =
                "Z(" + std::to_string(bp.Z.a) + "," + std::to_string(bp.Z.H) +
                "," + std::to_string(bp.Z.T) + ")";
            bp.profile_id = static_cast<int>(i);
            bp.embedded = is_embedded(branch.profiles[i], 1e-9,
                                      Execution::Serial, /*with_distance=*/false)
                              .embedded;
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
            {
                if (!failure) failure = std::current_exception();
            }
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

const char* to_string(BranchEventKind kind) {
    switch (kind) {
        case BranchEventKind::HZero: return "HZero";
        case BranchEventKind::HMin: return "HMin";
        case BranchEventKind::HMax: return "HMax";
        case BranchEventKind::EmbeddedToNonembedded:
            return "EmbeddedToNonembedded";
        case BranchEventKind::SingularLimitM: return "SingularLimitM";
        case BranchEventKind::SingularLimitMf: return "SingularLimitMf";
    }
    return "?";
}

Vec3 tangent_at(const ModelParams& params, const ShootingPoint& Z,
                const NewtonConfig& ncfg, const IntegratorConfig& icfg,
                const Vec3* previous) {
    const ShootingJacobian J = shooting_jacobian(params, Z, ncfg, icfg);
    Vec3 t = normalized(cross(J.grad_f1, J.grad_theta));
    if (previous) {
        if (dot(t, *previous) < 0.0) t = scaled(t, -1.0);
    } else if (t[1] < 0.0 || (t[1] == 0.0 && t[0] < 0.0)) {
        t = scaled(t, -1.0);
    }
    return t;
}

ClosedProfile closed_profile_for(const ModelParams& params,
                                 const ShootingPoint& Z,
                                 const ContinuationConfig& config) {
    ResidualReport rep = shoot(params, Z, config.integrator);
    ClosedProfile p =
        extend_periodic(rep.trajectory, config.profile_samples_per_half);
    p.source = "Z(" + std::to_string(Z.a) + "," + std::to_string(Z.H) + "," +
               std::to_string(Z.T) + ")";
    return p;
}

Branch trace(const ModelParams& params, const ShootingPoint& seed,
             int initial_direction, const ContinuationConfig& config) {
    if (initial_direction != 1 && initial_direction != -1)
        throw DomainError("initial_direction must be +1 or -1");
    if (!(config.ds_min > 0 && config.ds_min <= config.ds_init &&
          config.ds_init <= config.ds_max))
        throw DomainError("need 0 < ds_min <= ds_init <= ds_max");

    Branch branch;

    // Correct the seed in the plane orthogonal to its own tangent estimate.
    ShootingPoint Z0 = seed;
    Vec3 tan0;
    try {
        tan0 = tangent_at(params, Z0, config.newton, config.integrator);
        Z0 = newton_correct(params, Z0, tan0, Z0, config.newton,
                            config.integrator);
        tan0 = tangent_at(params, Z0, config.newton, config.integrator);
    } catch (const std::exception& e) {
        throw SeedInvalid(std::string("seed failed to correct: ") + e.what());
    }
    tan0 = scaled(tan0, static_cast<double>(initial_direction));

    CorrectedPoint cur = corrected_report(params, Z0, config);
    branch.points.push_back(
        {cur.Z, 0.0, tan0, cur.r_f1, cur.r_theta, cur.min_f2, cur.min_f3});

    double ds = config.ds_init;
    Vec3 tangent = tan0;
    bool done = false;

    while (!done && static_cast<int>(branch.points.size()) < config.max_points) {
        const BranchPoint& last = branch.points.back();

        // Endpoint declared by geometry before the integrator floors bite.
        if (last.min_f2 < config.endpoint_f_floor ||
            last.min_f3 < config.endpoint_f_floor) {
            branch.end_terminus = classify_endpoint(params, last.Z);
            break;
        }

        bool stepped = false;
        while (!stepped) {
            const ShootingPoint pred =
                ShootingPoint::from(last.Z.vec() + scaled(tangent, ds));
            try {
                int iters = 0;
                const ShootingPoint Znew =
                    newton_correct(params, pred, tangent, pred, config.newton,
                                   config.integrator, &iters);
                // Reject correctors that ran back past the current point.
                if (dot(Znew.vec() - last.Z.vec(), tangent) <= 0.0)
                    throw NoConvergence("corrector moved backwards");

                const CorrectedPoint rep = corrected_report(params, Znew, config);
                Vec3 tnew = tangent_at(params, Znew, config.newton,
                                       config.integrator, &tangent);
                BranchPoint bp{rep.Z,
                               last.s + dist(rep.Z, last.Z),
                               tnew,
                               rep.r_f1,
                               rep.r_theta,
                               rep.min_f2,
                               rep.min_f3};
                branch.points.push_back(bp);
                tangent = tnew;
                stepped = true;
                if (iters <= 3) ds = std::min(ds * config.grow, config.ds_max);
            } catch (const std::exception&) {
                if (ds <= config.ds_min * (1 + 1e-12)) {
                    // Stalling right above the endpoint floor is the singular
                    // limit making itself felt; anywhere else it is an error.
                    if (std::min(last.min_f2, last.min_f3) <
                        30.0 * config.endpoint_f_floor) {
                        branch.end_terminus = classify_endpoint(params, last.Z);
                        stepped = true;
                        done = true;
                        break;
                    }
                    branch.end_terminus = BranchTerminus::Stalled;
                    classify_embeddedness(params, branch, config);
                    throw StallAtDsMin(
                        "continuation stalled at ds_min near (a,H,T) = (" +
                        std::to_string(last.Z.a) + ", " +
                        std::to_string(last.Z.H) + ", " +
                        std::to_string(last.Z.T) + ")");
                }
                ds = std::max(ds * 0.5, config.ds_min);
            }
        }

        if (branch.points.back().Z.a <= 0.0 || branch.points.back().Z.a >= 1.0) {
            branch.end_terminus = BranchTerminus::LeftOmega;
            break;
        }
    }
    if (branch.end_terminus == BranchTerminus::None &&
        static_cast<int>(branch.points.size()) >= config.max_points)
        branch.end_terminus = BranchTerminus::MaxPoints;

    classify_embeddedness(params, branch, config);
    return branch;
}

Branch trace_full(const ModelParams& params, const ShootingPoint& seed,
                  const ContinuationConfig& config) {
    // Canonical tangent has positive H component; at the seed (near the
    // piecewise-CMC end) +1 runs the short way into the Z0 limit and -1 the
    // long way around the H minimum and maximum to the other end.
    Branch up = trace(params, seed, +1, config);
    Branch down = trace(params, seed, -1, config);

    // Order from the piecewise-CMC end: decide which side ended there.
    const bool up_is_M = up.end_terminus == BranchTerminus::SingularM;
    Branch& head = up_is_M ? up : down;      // reversed: terminal -> seed
    Branch& tail = up_is_M ? down : up;      // seed -> other terminal

    Branch merged;
    merged.start_terminus = head.end_terminus;
    merged.end_terminus = tail.end_terminus;
    merged.points.reserve(head.points.size() + tail.points.size() - 1);
    merged.profiles.reserve(head.points.size() + tail.points.size() - 1);

    const double s_head = head.points.back().s;
    for (size_t i = head.points.size(); i-- > 0;) {
        BranchPoint bp = head.points[i];
        bp.s = s_head - bp.s;
        bp.tangent = scaled(bp.tangent, -1.0);  // reorient along increasing s
        bp.profile_id = static_cast<int>(merged.profiles.size());
        merged.profiles.push_back(std::move(head.profiles[head.points[i].profile_id]));
        merged.points.push_back(bp);
    }
    // The seed appears in both halves; skip its copy in the tail.
    for (size_t i = 1; i < tail.points.size(); ++i) {
        BranchPoint bp = tail.points[i];
        bp.s = s_head + bp.s;
        bp.profile_id = static_cast<int>(merged.profiles.size());
        merged.profiles.push_back(std::move(tail.profiles[tail.points[i].profile_id]));
        merged.points.push_back(bp);
    }
    return merged;
}

namespace {

// Linear interpolation of branch data at arc length s.
ShootingPoint interp_Z(const Branch& b, double s, Vec3* tangent_out = nullptr) {
    const auto& pts = b.points;
    size_t k = 0;
    while (k + 2 < pts.size() && pts[k + 1].s < s) ++k;
    const double span = pts[k + 1].s - pts[k].s;
    const double w = span > 0 ? std::clamp((s - pts[k].s) / span, 0.0, 1.0) : 0.0;
    const Vec3 z = pts[k].Z.vec() + scaled(pts[k + 1].Z.vec() - pts[k].Z.vec(), w);
    if (tangent_out) {
        const Vec3 t = pts[k].tangent + scaled(pts[k + 1].tangent - pts[k].tangent, w);
        *tangent_out = normalized(t);
    }
    return ShootingPoint::from(z);
}

}  // namespace

std::vector<BranchEvent> detect_events(const ModelParams& params,
                                       const Branch& branch,
                                       const ContinuationConfig& config) {
    std::vector<BranchEvent> events;
    const auto& pts = branch.points;
    if (pts.size() < 3) return events;

    // H = 0 crossings, refined with H frozen at zero.
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        const double h0 = pts[i].Z.H, h1 = pts[i + 1].Z.H;
        if (h0 == 0.0 && i > 0) continue;  // counted at the left bracket
        if ((h0 < 0.0 && h1 >= 0.0) || (h0 > 0.0 && h1 <= 0.0)) {
            const double w = h0 / (h0 - h1);
            const double a0 = pts[i].Z.a + w * (pts[i + 1].Z.a - pts[i].Z.a);
            const double T0 = pts[i].Z.T + w * (pts[i + 1].Z.T - pts[i].Z.T);
            const ShootingPoint Zm = refine_fixed_H(params, 0.0, a0, T0,
                                                    config.newton,
                                                    config.integrator);
            const double s_at = pts[i].s + w * (pts[i + 1].s - pts[i].s);
            events.push_back({BranchEventKind::HZero, Zm, s_at});
        }
    }

    // Interior H extrema.  A local quadratic fit seeds the position; the
    // extremum itself is where the branch tangent has zero H component, so a
    // safeguarded secant on that component (each evaluation a corrector
    // re-solve) pins the event to a true solution.
    for (size_t i = 1; i + 1 < pts.size(); ++i) {
        const double hm = pts[i - 1].Z.H, h = pts[i].Z.H, hp = pts[i + 1].Z.H;
        const bool is_min = h < hm && h <= hp;
        const bool is_max = h > hm && h >= hp;
        if (!is_min && !is_max) continue;
        const double s0 = pts[i - 1].s, s1 = pts[i].s, s2 = pts[i + 1].s;
        const double d1 = (h - hm) / (s1 - s0), d2 = (hp - h) / (s2 - s1);
        double s_star = s1;
        if (d2 != d1)
            s_star = 0.5 * (s0 + s1) +
                     (0.5 * (s2 - s0)) * (-d1 / (d2 - d1));
        s_star = std::clamp(s_star, s0, s2);

        auto solve_at = [&](double s, ShootingPoint& Z_out,
                            double& tanH_out) -> bool {
            Vec3 tan;
            const ShootingPoint guess = interp_Z(branch, s, &tan);
            try {
                Z_out = newton_correct(params, guess, tan, guess, config.newton,
                                       config.integrator);
                const Vec3 t = tangent_at(params, Z_out, config.newton,
                                          config.integrator, &tan);
                tanH_out = t[1];
                return true;
            } catch (const std::exception&) {
                return false;
            }
        };

        // tangent H component switches sign across the extremum.
        double lo = s0, hi = s2;
        double glo = pts[i - 1].tangent[1], ghi = pts[i + 1].tangent[1];
        ShootingPoint Ze = pts[i].Z;
        double s_e = s1;
        bool refined = false;
        if (glo * ghi < 0.0) {
            double s_try = s_star;
            for (int iter = 0; iter < 12 && hi - lo > 1e-6; ++iter) {
                if (!(s_try > lo && s_try < hi)) s_try = 0.5 * (lo + hi);
                ShootingPoint Zm;
                double gm;
                if (!solve_at(s_try, Zm, gm)) break;
                Ze = Zm;
                s_e = s_try;
                refined = true;
                if (gm == 0.0) break;
                if (gm * glo > 0.0) {
                    lo = s_try;
                    glo = gm;
                } else {
                    hi = s_try;
                    ghi = gm;
                }
                // Secant proposal from the bracket ends.
                s_try = (ghi != glo) ? (lo * ghi - hi * glo) / (ghi - glo)
                                     : 0.5 * (lo + hi);
            }
        }
        if (!refined) {
            ShootingPoint Zq;
            double gq;
            if (solve_at(s_star, Zq, gq)) {
                Ze = Zq;
                s_e = s_star;
            }
        }
        events.push_back(
            {is_min ? BranchEventKind::HMin : BranchEventKind::HMax, Ze, s_e});
    }

    // Embeddedness transition by bisection in s.
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        if (pts[i].embedded == pts[i + 1].embedded) continue;
        double s_lo = pts[i].s, s_hi = pts[i + 1].s;
        bool lo_embedded = pts[i].embedded;
        ShootingPoint Z_hi = pts[i + 1].Z;
        for (int iter = 0; iter < 32 && s_hi - s_lo > 1e-5; ++iter) {
            const double s_mid = 0.5 * (s_lo + s_hi);
            Vec3 tan;
            const ShootingPoint guess = interp_Z(branch, s_mid, &tan);
            ShootingPoint Zm;
            try {
                Zm = newton_correct(params, guess, tan, guess, config.newton,
                                    config.integrator);
            } catch (const std::exception&) {
                break;
            }
            const ClosedProfile prof = closed_profile_for(params, Zm, config);
            const bool emb =
                is_embedded(prof, 1e-9, Execution::Parallel, false).embedded;
            if (emb == lo_embedded) {
                s_lo = s_mid;
            } else {
                s_hi = s_mid;
                Z_hi = Zm;
            }
        }
        events.push_back({BranchEventKind::EmbeddedToNonembedded, Z_hi,
                          0.5 * (s_lo + s_hi)});
    }

    // Singular endpoints as traced.
    auto push_terminus = [&](BranchTerminus term, const BranchPoint& bp) {
        if (term == BranchTerminus::SingularM)
            events.push_back({BranchEventKind::SingularLimitM, bp.Z, bp.s});
        else if (term == BranchTerminus::SingularMf)
            events.push_back({BranchEventKind::SingularLimitMf, bp.Z, bp.s});
    };
    push_terminus(branch.start_terminus, pts.front());
    push_terminus(branch.end_terminus, pts.back());

    std::sort(events.begin(), events.end(),
              [](const BranchEvent& a, const BranchEvent& b) {
                  return a.s_at < b.s_at;
              });
    // Refinement can land two detections of the same kind on one solution
    // (a crossing entered and left within a step); keep the first.
    events.erase(std::unique(events.begin(), events.end(),
                             [](const BranchEvent& a, const BranchEvent& b) {
                                 return a.kind == b.kind &&
                                        norm(a.Z_at.vec() - b.Z_at.vec()) < 1e-6;
                             }),
                 events.end());
    return events;
}

ShootingPoint locate_by_H(const ModelParams& params, const Branch& branch,
                          double H_target, int occurrence,
                          const ContinuationConfig& config) {
    if (occurrence < 1) throw DomainError("occurrence counts from 1");
    const auto& pts = branch.points;
    int seen = 0;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        const double h0 = pts[i].Z.H - H_target;
        const double h1 = pts[i + 1].Z.H - H_target;
        if (h0 == 0.0 && i > 0) continue;
        if ((h0 <= 0.0 && h1 >= 0.0) || (h0 >= 0.0 && h1 <= 0.0)) {
            if (++seen < occurrence) continue;
            const double w = (h0 == h1) ? 0.0 : h0 / (h0 - h1);
            const double a0 = pts[i].Z.a + w * (pts[i + 1].Z.a - pts[i].Z.a);
            const double T0 = pts[i].Z.T + w * (pts[i + 1].Z.T - pts[i].Z.T);
            return refine_fixed_H(params, H_target, a0, T0, config.newton,
                                  config.integrator);
        }
    }
    throw NotBracketed("H = " + std::to_string(H_target) + " occurrence " +
                       std::to_string(occurrence) +
                       " is not bracketed by the branch");
}

}  // namespace cmc
