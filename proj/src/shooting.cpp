#include "cmc/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

namespace cmc {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_in_omega(const ShootingPoint& Z) {
    if (!(Z.a > 0.0 && Z.a < 1.0))
        throw DomainError("shooting point outside Omega: a = " +
                          std::to_string(Z.a));
    if (!(Z.T > 0.0))
        throw DomainError("shooting point needs T > 0, got " +
                          std::to_string(Z.T));
}

bool in_omega(const ShootingPoint& Z) {
    return Z.a > 0.0 && Z.a < 1.0 && Z.T > 0.0;
}

// Residual pair only; the min scan is skipped for finite-difference probes.
std::array<double, 2> residuals_of(const Trajectory& traj) {
    const ProfileState& fin = traj.final_state();
    return {fin.f1, fin.theta - kPi};
}

std::array<double, 2> shoot_residuals(const ModelParams& params,
                                      const ShootingPoint& Z,
                                      const IntegratorConfig& icfg) {
    const ModelParams p = with_H(params, Z.H);
    Trajectory t = integrate(p, {0.0, 0.0, Z.a, 0.0}, Z.T, icfg);
    return residuals_of(t);
}

}  // namespace

ResidualReport shoot(const ModelParams& params, const ShootingPoint& Z,
                     const IntegratorConfig& icfg) {
    require_in_omega(Z);
    const ModelParams p = with_H(params, Z.H);
    Trajectory traj = integrate(p, {0.0, 0.0, Z.a, 0.0}, Z.T, icfg);
    const auto [mf2, mf3] = traj.min_f2_f3();
    const auto r = residuals_of(traj);
    return {r[0], r[1], mf2, mf3, std::move(traj)};
}

ShootingJacobian shooting_jacobian(const ModelParams& params,
                                   const ShootingPoint& Z,
                                   const NewtonConfig& ncfg,
                                   const IntegratorConfig& icfg) {
    if (!(ncfg.fd_step > 0.0)) throw DomainError("fd_step must be positive");
    require_in_omega(Z);

    // Base trajectory supplies the analytic T column: F1 and Theta are
    // evaluations of the flow at t = T, so their T derivatives are the
    // final-state derivatives.
    Trajectory base =
        integrate(with_H(params, Z.H), {0.0, 0.0, Z.a, 0.0}, Z.T, icfg);
    const auto& fdv = base.final_deriv();
    const double dF1_dT = fdv[0];     // cos(theta(T))
    const double dTheta_dT = fdv[2];  // theta'(T)

    // Four perturbed shoots for the central differences in a and H.
    const double da = ncfg.fd_step, dH = ncfg.fd_step;
    const std::array<ShootingPoint, 4> probes{
        ShootingPoint{Z.a + da, Z.H, Z.T}, ShootingPoint{Z.a - da, Z.H, Z.T},
        ShootingPoint{Z.a, Z.H + dH, Z.T}, ShootingPoint{Z.a, Z.H - dH, Z.T}};
    std::array<std::array<double, 2>, 4> res{};
    std::exception_ptr failure = nullptr;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int i = 0; i < 4; ++i) {
        try {
            res[i] = shoot_residuals(params, probes[i], icfg);
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

    ShootingJacobian J;
    J.grad_f1 = {(res[0][0] - res[1][0]) / (2 * da),
                 (res[2][0] - res[3][0]) / (2 * dH), dF1_dT};
    J.grad_theta = {(res[0][1] - res[1][1]) / (2 * da),
                    (res[2][1] - res[3][1]) / (2 * dH), dTheta_dT};

    // Singular values of the 2x3 matrix from the eigenvalues of its Gram
    // matrix; reject rank < 2.
    const double g11 = dot(J.grad_f1, J.grad_f1);
    const double g22 = dot(J.grad_theta, J.grad_theta);
    const double g12 = dot(J.grad_f1, J.grad_theta);
    const double mean = 0.5 * (g11 + g22);
    const double disc =
        std::sqrt(std::max(0.0, 0.25 * (g11 - g22) * (g11 - g22) + g12 * g12));
    const double smax = std::sqrt(std::max(0.0, mean + disc));
    const double smin = std::sqrt(std::max(0.0, mean - disc));
    if (smin < 1e-8 * smax)
        throw IllConditioned("constraint gradients are numerically dependent at "
                             "(a,H,T) = (" + std::to_string(Z.a) + ", " +
                             std::to_string(Z.H) + ", " + std::to_string(Z.T) + ")");
    return J;
}

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

// Damped Newton driver over a square 3x3 system.  A plain Newton step with
// backtracking is tried first; when no backtracked step decreases the
// residual (near-singular Jacobian, e.g. close to an H extremum with H
// frozen), Levenberg-Marquardt steps with escalating damping take over.
template <typename Resid, typename System>
ShootingPoint damped_newton(ShootingPoint Z, const NewtonConfig& ncfg,
                            const Resid& residual, const System& system,
                            int* iterations_out = nullptr) {
    if (!(ncfg.damping > 0.0 && ncfg.damping <= 1.0))
        throw DomainError("damping must lie in (0, 1]");
    if (ncfg.max_iter < 1) throw DomainError("max_iter must be >= 1");

    auto clamp_step = [&](Vec3 d) {
        const double dn = norm(d);
        return dn > ncfg.max_step ? scaled(d, ncfg.max_step / dn) : d;
    };

    std::array<double, 3> r = residual(Z);
    for (int it = 0; it < ncfg.max_iter; ++it) {
        if (std::max(std::abs(r[0]), std::abs(r[1])) < ncfg.res_tol &&
            std::abs(r[2]) < 1e-9) {
            if (iterations_out) *iterations_out = it;
            return Z;
        }

        const Mat3 A = system(Z);

        // The equations are badly co-scaled (the closure-angle gradient can
        // be two orders larger than the height one); weight the line-search
        // norm by the inverse row norms so both constraints count.
        Vec3 w;
        for (int i = 0; i < 3; ++i) w[i] = 1.0 / std::max(norm(A[i]), 1e-8);
        auto norm_of = [&w](const std::array<double, 3>& v) {
            const double a = v[0] * w[0], b = v[1] * w[1], c = v[2] * w[2];
            return std::sqrt(a * a + b * b + c * c);
        };
        const double rnorm = norm_of(r);

        auto try_point = [&](const Vec3& delta, ShootingPoint& out_trial,
                             std::array<double, 3>& out_r, bool& left) {
            out_trial = ShootingPoint::from(Z.vec() + delta);
            if (!in_omega(out_trial)) {
                left = true;
                return false;
            }
            try {
                out_r = residual(out_trial);
            } catch (const SingularEncounter&) {
                return false;
            }
            // Decrease, or a flat step at the integrator noise floor.
            return norm_of(out_r) < rnorm ||
                   std::max(std::abs(r[0]), std::abs(r[1])) < 1e-6;
        };

        ShootingPoint trial;
        std::array<double, 3> rt{};
        bool accepted = false;
        bool left_domain = false;

        // Plain Newton with up to 5 halvings.
        try {
            const Vec3 full =
                clamp_step(solve_dense<3>(A, {-r[0], -r[1], -r[2]}));
            double lambda = ncfg.damping;
            for (int halving = 0; halving <= 5 && !accepted;
                 ++halving, lambda *= 0.5)
                accepted = try_point(scaled(full, lambda), trial, rt, left_domain);
        } catch (const DomainError&) {
            // Singular linear system; fall through to damped steps.
        }

        // Levenberg-Marquardt fallback on the row-whitened system:
        // (A~^T A~ + mu diag(A~^T A~)) d = -A~^T r~ with A~ = W A, r~ = W r.
        for (double mu = 1e-4; mu <= 1e6 && !accepted; mu *= 100.0) {
            Mat3 ata{};
            Vec3 atr{};
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j)
                    for (int k = 0; k < 3; ++k)
                        ata[i][j] += w[k] * w[k] * A[k][i] * A[k][j];
                for (int k = 0; k < 3; ++k) atr[i] += w[k] * w[k] * A[k][i] * r[k];
            }
            for (int i = 0; i < 3; ++i)
                ata[i][i] += mu * std::max(ata[i][i], 1e-12);
            try {
                const Vec3 d = clamp_step(
                    solve_dense<3>(ata, {-atr[0], -atr[1], -atr[2]}));
                accepted = try_point(d, trial, rt, left_domain);
            } catch (const DomainError&) {
            }
        }

        if (!accepted) {
            if (left_domain)
                throw LeftDomain("Newton iterate left Omega from a = " +
                                 std::to_string(Z.a));
            throw NoConvergence("damped Newton failed to find a decreasing step");
        }
        Z = trial;
        r = rt;
    }
    if (std::max(std::abs(r[0]), std::abs(r[1])) < ncfg.res_tol &&
        std::abs(r[2]) < 1e-9) {
        if (iterations_out) *iterations_out = ncfg.max_iter;
        return Z;
    }
    throw NoConvergence("Newton did not reach res_tol = " +
                        std::to_string(ncfg.res_tol) + " in " +
                        std::to_string(ncfg.max_iter) + " iterations");
}

}  // namespace

ShootingPoint newton_correct(const ModelParams& params, ShootingPoint guess,
                             const Vec3& plane_normal,
                             const ShootingPoint& plane_point,
                             const NewtonConfig& ncfg,
                             const IntegratorConfig& icfg,
                             int* iterations_out) {
    const double nn = norm(plane_normal);
    if (!(nn > 0.0)) throw DomainError("plane normal must be nonzero");
    if (!in_omega(guess)) throw LeftDomain("initial guess outside Omega");
    const Vec3 nrm = scaled(plane_normal, 1.0 / nn);

    auto residual = [&](const ShootingPoint& Z) -> std::array<double, 3> {
        const auto r = shoot_residuals(params, Z, icfg);
        return {r[0], r[1], dot(Z.vec() - plane_point.vec(), nrm)};
    };
    auto system = [&](const ShootingPoint& Z) -> Mat3 {
        const ShootingJacobian J = shooting_jacobian(params, Z, ncfg, icfg);
        return {J.grad_f1, J.grad_theta, nrm};
    };
    return damped_newton(guess, ncfg, residual, system, iterations_out);
}

ShootingPoint refine_fixed_H(const ModelParams& params, double H_fixed,
                             double a0, double T0, const NewtonConfig& ncfg,
                             const IntegratorConfig& icfg) {
    ShootingPoint guess{a0, H_fixed, T0};
    if (!in_omega(guess)) throw LeftDomain("initial guess outside Omega");

    auto residual = [&](const ShootingPoint& Z) -> std::array<double, 3> {
        const auto r = shoot_residuals(params, Z, icfg);
        return {r[0], r[1], 0.0};
    };
    // H frozen: embed the 2x2 (a, T) system into the 3x3 driver with a
    // unit H row, whose zero residual pins dH = 0.
    auto system = [&](const ShootingPoint& Z) -> Mat3 {
        const ShootingJacobian J = shooting_jacobian(params, Z, ncfg, icfg);
        return {Vec3{J.grad_f1[0], 0.0, J.grad_f1[2]},
                Vec3{J.grad_theta[0], 0.0, J.grad_theta[2]},
                Vec3{0.0, 1.0, 0.0}};
    };
    return damped_newton(guess, ncfg, residual, system);
}

}  // namespace cmc
