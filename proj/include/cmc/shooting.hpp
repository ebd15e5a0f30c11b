#pragma once

#include "cmc/linalg.hpp"
#include "cmc/ode_core.hpp"
#include "cmc/types.hpp"

namespace cmc {

/// A point Z = (a, H, T) of the shooting space Omega = {0 < a < 1}.
/// a is the initial height f2(0), T the half period candidate.
struct ShootingPoint {
    double a = 0.0;
    double H = 0.0;
    double T = 0.0;

    Vec3 vec() const noexcept { return {a, H, T}; }
    static ShootingPoint from(const Vec3& v) { return {v[0], v[1], v[2]}; }
};

/// Boundary residuals of the closure system at Z: F1(a,H,T) and
/// Theta(a,H,T) - pi, plus the trajectory that produced them.
struct ResidualReport {
    double r_f1;
    double r_theta;
    double min_f2;
    double min_f3;
    Trajectory trajectory;
};

struct NewtonConfig {
    double res_tol = 1e-10;
    // Damped iterations from a coarsely perturbed seed near the singular
    // ends need more than the usual handful of steps.
    int max_iter = 40;
    double fd_step = 1e-7;
    double damping = 1.0;    // initial step fraction, in (0, 1]
    double max_step = 0.03;  // trust radius: per-iteration cap on |dZ|
};

struct NoConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LeftDomain : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IllConditioned : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Rows of the 2x3 Jacobian of (F1, Theta) over (a, H, T).
struct ShootingJacobian {
    Vec3 grad_f1;
    Vec3 grad_theta;
};

/// Integrate from (f1, f2, theta)(0) = (0, a, 0) with H = Z.H up to t = T
/// and report the closure residuals.  params.H is ignored.
/// Throws SingularEncounter if the trajectory hits an integrator floor
/// before T (the report data travels inside the exception's payload).
ResidualReport shoot(const ModelParams& params, const ShootingPoint& Z,
                     const IntegratorConfig& icfg = {});

/// Central finite differences in a and H; the T column is analytic:
/// dF1/dT = cos(theta(T)), dTheta/dT = theta'(T).
/// Throws IllConditioned when the two gradients are numerically dependent.
ShootingJacobian shooting_jacobian(const ModelParams& params,
                                   const ShootingPoint& Z,
                                   const NewtonConfig& ncfg = {},
                                   const IntegratorConfig& icfg = {});

/// Damped Newton on the 3x3 system {F1 = 0, Theta = pi, (Z - P).n = 0}.
/// iterations_out, when given, receives the number of Newton steps taken.
ShootingPoint newton_correct(const ModelParams& params, ShootingPoint guess,
                             const Vec3& plane_normal,
                             const ShootingPoint& plane_point,
                             const NewtonConfig& ncfg = {},
                             const IntegratorConfig& icfg = {},
                             int* iterations_out = nullptr);

/// Damped Newton on the 2x2 system in (a, T) with H frozen.
ShootingPoint refine_fixed_H(const ModelParams& params, double H_fixed,
                             double a0, double T0,
                             const NewtonConfig& ncfg = {},
                             const IntegratorConfig& icfg = {});

}  // namespace cmc
