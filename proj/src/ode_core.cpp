#include "cmc/ode_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cmc {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;

// Embedded error coefficients (5th minus 4th order weights).
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

// Dense-output coefficients for the free order-4 interpolant.
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

using Y = std::array<double, 3>;

inline ProfileState make_state(double t, const Y& y) {
    return {t, y[0], y[1], y[2]};
}

inline Y axpy(const Y& y, double h, const Y& k) {
    return {y[0] + h * k[0], y[1] + h * k[1], y[2] + h * k[2]};
}

ProfileState hermite(const Trajectory::Node& n0, const Trajectory::Node& n1,
                     double t) {
    const double h = n1.state.t - n0.state.t;
    const double u = (t - n0.state.t) / h;
    const double u2 = u * u, u3 = u2 * u;
    const double h00 = 2 * u3 - 3 * u2 + 1, h10 = u3 - 2 * u2 + u;
    const double h01 = -2 * u3 + 3 * u2, h11 = u3 - u2;
    const Y y0{n0.state.f1, n0.state.f2, n0.state.theta};
    const Y y1{n1.state.f1, n1.state.f2, n1.state.theta};
    Y out;
    for (int i = 0; i < 3; ++i)
        out[i] = h00 * y0[i] + h10 * h * n0.deriv[i] + h01 * y1[i] +
                 h11 * h * n1.deriv[i];
    return make_state(t, out);
}

}  // namespace

DerivedQuantities derived(const ProfileState& s) {
    const double r2 = s.f1 * s.f1 + s.f2 * s.f2;
    if (r2 > 1.0 + 1e-9)
        throw DomainError("profile state outside the closed unit disk: f1^2+f2^2 = " +
                          std::to_string(r2));
    const double f3sq = std::max(0.0, 1.0 - r2);
    const double g = s.f2 * std::cos(s.theta) - s.f1 * std::sin(s.theta);
    const double h = std::sqrt(std::max(0.0, 1.0 - g * g));
    return {g, h, std::sqrt(f3sq)};
}

std::array<double, 3> rhs(const ModelParams& p, const ProfileState& s,
                          const IntegratorConfig& config) {
    if (s.f2 < config.f2_floor)
        throw SingularEncounter(SingularEncounter::Floor::F2, s.t,
                                "f2 floor hit at t = " + std::to_string(s.t));
    const double r2 = s.f1 * s.f1 + s.f2 * s.f2;
    double f3sq = 1.0 - r2;
    if (f3sq < 0.0 && f3sq > -1e-9) f3sq = 0.0;  // roundoff at the unit circle
    if (f3sq < config.f3sq_floor)
        throw SingularEncounter(SingularEncounter::Floor::F3Sq, s.t,
                                "f3^2 floor hit at t = " + std::to_string(s.t));
    const double ct = std::cos(s.theta), st = std::sin(s.theta);
    const double g = s.f2 * ct - s.f1 * st;
    const double hsq = std::max(0.0, 1.0 - g * g);
    const double h = std::sqrt(hsq);
    const double n = static_cast<double>(p.n());
    const double bracket = p.ell * ct - n * s.f2 * g + n * p.H * s.f2 * h;
    return {ct, st, hsq / (f3sq * s.f2) * bracket};
}

Trajectory::Trajectory(ModelParams params, std::vector<Node> nodes,
                       std::vector<DenseCoeffs> dense)
    : params_(params), nodes_(std::move(nodes)), dense_(std::move(dense)) {}

double Trajectory::t_start() const {
    if (nodes_.empty()) throw OutOfRangeError("empty trajectory");
    return nodes_.front().state.t;
}

double Trajectory::t_end() const {
    if (nodes_.empty()) throw OutOfRangeError("empty trajectory");
    return nodes_.back().state.t;
}

const ProfileState& Trajectory::initial_state() const {
    if (nodes_.empty()) throw OutOfRangeError("empty trajectory");
    return nodes_.front().state;
}

const ProfileState& Trajectory::final_state() const {
    if (nodes_.empty()) throw OutOfRangeError("empty trajectory");
    return nodes_.back().state;
}

const std::array<double, 3>& Trajectory::final_deriv() const {
    if (nodes_.empty()) throw OutOfRangeError("empty trajectory");
    return nodes_.back().deriv;
}

ProfileState Trajectory::evaluate(double t) const {
    if (nodes_.empty()) throw OutOfRangeError("empty trajectory");
    const double lo = nodes_.front().state.t, hi = nodes_.back().state.t;
    const double slack = 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
    if (t < lo - slack || t > hi + slack)
        throw OutOfRangeError("evaluate at t = " + std::to_string(t) +
                              " outside [" + std::to_string(lo) + ", " +
                              std::to_string(hi) + "]");
    t = std::clamp(t, lo, hi);

    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t,
                               [](const Node& n, double v) { return n.state.t < v; });
    if (it != nodes_.end() && it->state.t == t) return it->state;

    const size_t i = static_cast<size_t>(it - nodes_.begin()) - 1;
    const Node& n0 = nodes_[i];
    const Node& n1 = nodes_[i + 1];
    if (dense_.empty()) return hermite(n0, n1, t);

    const DenseCoeffs& rc = dense_[i];
    const double h = n1.state.t - n0.state.t;
    const double th = (t - n0.state.t) / h, th1 = 1.0 - th;
    Y out;
    for (int k = 0; k < 3; ++k)
        out[k] = rc[0][k] +
                 th * (rc[1][k] + th1 * (rc[2][k] + th * (rc[3][k] + th1 * rc[4][k])));
    return make_state(t, out);
}

std::pair<double, double> Trajectory::min_f2_f3(int samples) const {
    if (nodes_.empty()) throw OutOfRangeError("empty trajectory");
    double mf2 = std::numeric_limits<double>::infinity();
    double mf3 = mf2;
    auto visit = [&](const ProfileState& s) {
        mf2 = std::min(mf2, s.f2);
        const double f3sq = std::max(0.0, 1.0 - s.f1 * s.f1 - s.f2 * s.f2);
        mf3 = std::min(mf3, std::sqrt(f3sq));
    };
    for (const Node& n : nodes_) visit(n.state);
    const double lo = t_start(), hi = t_end();
    for (int i = 1; i < samples; ++i)
        visit(evaluate(lo + (hi - lo) * i / samples));
    return {mf2, mf3};
}

namespace {

struct Stepper {
    const ModelParams& p;
    const IntegratorConfig& cfg;
    std::vector<Trajectory::Node> nodes;
    std::vector<Trajectory::DenseCoeffs> dense;

    Trajectory take() {
        return Trajectory(p, std::move(nodes), std::move(dense));
    }

    [[noreturn]] void rethrow_singular(SingularEncounter& e) {
        throw SingularEncounter(e.floor, e.t_hit, e.what(), take());
    }
};

}  // namespace

Trajectory integrate(const ModelParams& p, const ProfileState& init,
                     double t_end, const IntegratorConfig& config) {
    if (!p.valid()) throw DomainError("ell and m must be >= 1");
    if (!(t_end > init.t))
        throw DomainError("t_end must exceed the initial time");
    if (!(config.abs_tol > 0) || !(config.rel_tol > 0) || !(config.max_step > 0))
        throw DomainError("integrator tolerances must be positive");

    Stepper st{p, config, {}, {}};
    double t = init.t;
    Y y{init.f1, init.f2, init.theta};

    // First derivative evaluation doubles as the precondition check.
    Y k1 = rhs(p, make_state(t, y), config);
    st.nodes.push_back({make_state(t, y), k1});

    auto eval = [&](double tt, const Y& yy) {
        return rhs(p, make_state(tt, yy), config);
    };

    double h;
    if (!config.adaptive) {
        h = config.max_step;
    } else {
        // Step-size guess from the scaled norms of y and f(y).
        double dnf = 0, dny = 0;
        for (int i = 0; i < 3; ++i) {
            const double sc = config.abs_tol + config.rel_tol * std::abs(y[i]);
            dnf += (k1[i] / sc) * (k1[i] / sc);
            dny += (y[i] / sc) * (y[i] / sc);
        }
        h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
        h = std::min(h, config.max_step);
    }

    long n_steps = 0;
    double facold = 1e-4;
    constexpr double beta = 0.04, safe = 0.9, facl = 0.2, facr = 10.0;

    while (t < t_end) {
        if (++n_steps > config.max_steps)
            throw MaxStepsExceeded("more than " + std::to_string(config.max_steps) +
                                   " steps needed");
        if (0.1 * h <= std::abs(t) * std::numeric_limits<double>::epsilon())
            throw StepUnderflow("step size underflow at t = " + std::to_string(t));

        bool last = false;
        if (t + 1.0001 * h >= t_end) {
            h = t_end - t;
            last = true;
        }

        Y k2, k3, k4, k5, k6, k7, ynew;
        try {
            k2 = eval(t + c2 * h, axpy(y, h * a21, k1));
            ynew = {y[0] + h * (a31 * k1[0] + a32 * k2[0]),
                    y[1] + h * (a31 * k1[1] + a32 * k2[1]),
                    y[2] + h * (a31 * k1[2] + a32 * k2[2])};
            k3 = eval(t + c3 * h, ynew);
            for (int i = 0; i < 3; ++i)
                ynew[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            k4 = eval(t + c4 * h, ynew);
            for (int i = 0; i < 3; ++i)
                ynew[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] +
                                      a54 * k4[i]);
            k5 = eval(t + c5 * h, ynew);
            for (int i = 0; i < 3; ++i)
                ynew[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                                      a64 * k4[i] + a65 * k5[i]);
            k6 = eval(t + h, ynew);
            for (int i = 0; i < 3; ++i)
                ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] +
                                      a75 * k5[i] + a76 * k6[i]);
            k7 = eval(t + h, ynew);
        } catch (SingularEncounter& e) {
            // A trial stage stepped past a floor.  Retreat; if the step can
            // no longer shrink, the solution itself is at the floor.
            if (!config.adaptive || h <= 1e-13 ||
                0.1 * h <= std::abs(t) * std::numeric_limits<double>::epsilon())
                st.rethrow_singular(e);
            h *= 0.25;
            continue;
        }

        bool accept = true;
        double hnew = h;
        if (config.adaptive) {
            double err = 0;
            for (int i = 0; i < 3; ++i) {
                const double ee = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                                       e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                const double sc = config.abs_tol +
                                  config.rel_tol * std::max(std::abs(y[i]),
                                                            std::abs(ynew[i]));
                err += (ee / sc) * (ee / sc);
            }
            err = std::sqrt(err / 3.0);
            if (!std::isfinite(err)) err = 2.0;

            const double fac11 = std::pow(std::max(err, 1e-32), 0.2 - beta * 0.75);
            double fac = fac11 / std::pow(facold, beta);
            fac = std::max(1.0 / facr, std::min(1.0 / facl, fac / safe));
            hnew = std::min(h / fac, config.max_step);

            if (err > 1.0) {
                h /= std::min(1.0 / facl, fac11 / safe);
                accept = false;
            } else {
                facold = std::max(err, 1e-4);
            }
        }

        if (!accept) continue;

        // Floors are also enforced on the accepted endpoint.
        const double f3sq_new = 1.0 - ynew[0] * ynew[0] - ynew[1] * ynew[1];
        if (ynew[1] < config.f2_floor) {
            SingularEncounter e(SingularEncounter::Floor::F2, t + h,
                                "f2 floor hit at accepted step");
            st.rethrow_singular(e);
        }
        if (f3sq_new < config.f3sq_floor && !(f3sq_new < 0 && f3sq_new > -1e-9)) {
            SingularEncounter e(SingularEncounter::Floor::F3Sq, t + h,
                                "f3^2 floor hit at accepted step");
            st.rethrow_singular(e);
        }

        Trajectory::DenseCoeffs rc;
        for (int i = 0; i < 3; ++i) {
            const double ydiff = ynew[i] - y[i];
            const double bspl = h * k1[i] - ydiff;
            rc[0][i] = y[i];
            rc[1][i] = ydiff;
            rc[2][i] = bspl;
            rc[3][i] = ydiff - h * k7[i] - bspl;
            rc[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                            d6 * k6[i] + d7 * k7[i]);
        }
        st.dense.push_back(rc);

        t = last ? t_end : t + h;
        y = ynew;
        k1 = k7;  // FSAL
        st.nodes.push_back({make_state(t, y), k1});
        if (config.adaptive) h = hnew;
    }

    return st.take();
}

Trajectory integrate_fixed_rk4(const ModelParams& p, const ProfileState& init,
                               double t_end, double step,
                               const IntegratorConfig& config) {
    if (!(step > 0)) throw DomainError("step must be positive");
    if (!(t_end > init.t)) throw DomainError("t_end must exceed the initial time");

    const double span = t_end - init.t;
    const long n = std::max(1L, static_cast<long>(std::ceil(span / step - 1e-12)));
    const double h = span / n;

    Stepper st{p, config, {}, {}};
    double t = init.t;
    Y y{init.f1, init.f2, init.theta};
    auto eval = [&](double tt, const Y& yy) {
        return rhs(p, make_state(tt, yy), config);
    };

    Y k1 = eval(t, y);
    st.nodes.reserve(n + 1);
    st.nodes.push_back({make_state(t, y), k1});
    for (long i = 0; i < n; ++i) {
        try {
            const Y k2 = eval(t + h / 2, axpy(y, h / 2, k1));
            const Y k3 = eval(t + h / 2, axpy(y, h / 2, k2));
            const Y k4 = eval(t + h, axpy(y, h, k3));
            for (int c = 0; c < 3; ++c)
                y[c] += h / 6 * (k1[c] + 2 * k2[c] + 2 * k3[c] + k4[c]);
            t = (i + 1 == n) ? t_end : init.t + (i + 1) * h;
            k1 = eval(t, y);
        } catch (SingularEncounter& e) {
            st.rethrow_singular(e);
        }
        st.nodes.push_back({make_state(t, y), k1});
    }
    return st.take();
}

}  // namespace cmc
