#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "cmc/types.hpp"

namespace cmc {

struct IntegratorConfig {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    double max_step = 0.1;
    double f2_floor = 1e-6;
    double f3sq_floor = 1e-12;
    long max_steps = 1000000;
    /// When false, error control is disabled and every step has size
    /// max_step exactly (fixed-step mode, used for convergence studies).
    bool adaptive = true;
};

/// derived(state): g, h = sqrt(1 - g^2) and f3 = sqrt(1 - f1^2 - f2^2).
/// 1 - f1^2 - f2^2 is clamped at 0 when within 1e-9 below it; beyond that
/// the state is outside the closed disk and a DomainError is thrown.
DerivedQuantities derived(const ProfileState& s);

/// Right-hand side of the profile ODE:
///   f1' = cos(theta),  f2' = sin(theta),
///   theta' = h^2 / (f3^2 f2) * (ell cos(theta) - n f2 g + n H f2 h).
/// Throws SingularEncounter (without trajectory) if f2 < f2_floor or
/// f3^2 < f3sq_floor.
std::array<double, 3> rhs(const ModelParams& p, const ProfileState& s,
                          const IntegratorConfig& config = {});

/// Solution of the profile ODE with dense output.  Immutable after
/// construction; safe to share between threads.
class Trajectory {
  public:
    struct Node {
        ProfileState state;
        std::array<double, 3> deriv;
    };

    /// Dense-output coefficients for one accepted step (order-4 continuous
    /// extension of the 5(4) pair).  Empty for fixed-step RK4 trajectories,
    /// which fall back to cubic Hermite interpolation between nodes.
    using DenseCoeffs = std::array<std::array<double, 3>, 5>;

    Trajectory() = default;
    Trajectory(ModelParams params, std::vector<Node> nodes,
               std::vector<DenseCoeffs> dense);

    bool empty() const noexcept { return nodes_.empty(); }
    const ModelParams& params() const noexcept { return params_; }
    double t_start() const;
    double t_end() const;
    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const ProfileState& initial_state() const;
    const ProfileState& final_state() const;
    const std::array<double, 3>& final_deriv() const;

    /// Interpolated state at t.  At a stored node the node state is returned
    /// exactly.  Throws OutOfRangeError outside [t_start, t_end].
    ProfileState evaluate(double t) const;

    /// Minima of f2 and f3 over the whole span, scanned at the nodes plus
    /// `samples` uniform interior points of the dense output.
    std::pair<double, double> min_f2_f3(int samples = 2048) const;

  private:
    ModelParams params_{};
    std::vector<Node> nodes_;
    std::vector<DenseCoeffs> dense_;  // one entry per interval when present
};

struct SingularEncounter : std::runtime_error {
    enum class Floor { F2, F3Sq };

    SingularEncounter(Floor which, double t, const std::string& msg,
                      Trajectory partial = {})
        : std::runtime_error(msg), floor(which), t_hit(t),
          partial_trajectory(std::move(partial)) {}

    Floor floor;
    double t_hit;
    Trajectory partial_trajectory;  // may be empty (e.g. thrown from rhs)
};

struct StepUnderflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MaxStepsExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Integrate the profile ODE from init to t_end with an embedded 5(4)
/// Runge-Kutta pair and free order-4 dense output.  The final node lands
/// exactly at t_end.  A floor hit raises SingularEncounter carrying the
/// partial trajectory up to the last accepted step.
Trajectory integrate(const ModelParams& p, const ProfileState& init,
                     double t_end, const IntegratorConfig& config = {});

/// Classical fixed-step 4th-order Runge-Kutta over the same system.
/// Kept as an independent accuracy reference for the adaptive path.
Trajectory integrate_fixed_rk4(const ModelParams& p, const ProfileState& init,
                               double t_end, double step,
                               const IntegratorConfig& config = {});

inline ProfileState evaluate(const Trajectory& traj, double t) {
    return traj.evaluate(t);
}

}  // namespace cmc
