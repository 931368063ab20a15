#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <exception>
#include <functional>
#include <initializer_list>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace ellfam
{

using cplx = std::complex<double>;
using State = std::vector<cplx>;

/// Step-size control settings for integrate().
struct IntegratorConfig
{
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double initial_step = 1e-3;
    std::size_t max_steps = 1000000;
};

struct TrajectoryPoint
{
    double t;
    State y;
};

/// Output of integrate(): requested checkpoints (or every accepted step) plus work counters.
struct Trajectory
{
    std::vector<TrajectoryPoint> points;
    State final_state;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t evaluations = 0;
};

/// Called after every accepted step; may modify the state in place (e.g. a projection).
using AcceptHook = std::function<void(double t, State &y)>;

namespace detail
{

namespace dp5
{
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                        a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                        d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                        d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
}

template <typename Rhs>
State call_rhs(Rhs &rhs, double t, const State &y, std::size_t &evals)
{
    ++evals;
    State out;
    try {
        out = rhs(t, y);
    } catch (const Error &) {
        throw;
    } catch (const std::exception &e) {
        throw RhsFailure(std::string("right-hand side failed: ") + e.what());
    }
    if (out.size() != y.size()) {
        throw RhsFailure("right-hand side returned a vector of the wrong size");
    }
    for (const cplx v : out) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            throw RhsFailure("right-hand side is not finite at t = " + std::to_string(t));
        }
    }
    return out;
}

inline State axpy(const State &y, double h, std::initializer_list<std::pair<double, const State *>> terms)
{
    State r = y;
    for (const auto &[c, k] : terms) {
        if (c == 0.0) {
            continue;
        }
        for (std::size_t i = 0; i < r.size(); ++i) {
            r[i] += h * c * (*k)[i];
        }
    }
    return r;
}

struct Dp5Stages
{
    State k2, k3, k4, k5, k6, y_new, k7;
};

template <typename Rhs>
Dp5Stages dp5_step(Rhs &rhs, double t, const State &y, const State &k1, double h, std::size_t &evals)
{
    using namespace dp5;
    Dp5Stages s;
    s.k2 = call_rhs(rhs, t + c2 * h, axpy(y, h, {{a21, &k1}}), evals);
    s.k3 = call_rhs(rhs, t + c3 * h, axpy(y, h, {{a31, &k1}, {a32, &s.k2}}), evals);
    s.k4 = call_rhs(rhs, t + c4 * h, axpy(y, h, {{a41, &k1}, {a42, &s.k2}, {a43, &s.k3}}), evals);
    s.k5 = call_rhs(rhs, t + c5 * h, axpy(y, h, {{a51, &k1}, {a52, &s.k2}, {a53, &s.k3}, {a54, &s.k4}}),
                    evals);
    s.k6 = call_rhs(rhs, t + h,
                    axpy(y, h, {{a61, &k1}, {a62, &s.k2}, {a63, &s.k3}, {a64, &s.k4}, {a65, &s.k5}}),
                    evals);
    s.y_new = axpy(y, h, {{a71, &k1}, {a73, &s.k3}, {a74, &s.k4}, {a75, &s.k5}, {a76, &s.k6}});
    s.k7 = call_rhs(rhs, t + h, s.y_new, evals);
    return s;
}

}

/// Integrates y' = rhs(t, y) from t0 to t1 with the Dormand-Prince 5(4) pair.
/**
 * The local error estimate is controlled in the RMS norm weighted by
 * abs_tol + rel_tol * max(|y|, |y_new|) with a proportional-integral step controller.
 * When \p checkpoints is non-empty the trajectory holds the state at exactly those times,
 * obtained by the fourth-order continuous extension; otherwise it holds every accepted step.
 */
template <typename Rhs>
Trajectory integrate(Rhs &&rhs, State y0, double t0, double t1, const IntegratorConfig &cfg = {},
                     std::vector<double> checkpoints = {}, const AcceptHook &on_accept = {})
{
    using namespace detail::dp5;
    if (!(t1 > t0)) {
        throw std::invalid_argument("integration interval must satisfy t1 > t0");
    }
    if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0) || !(cfg.initial_step > 0.0) || cfg.max_steps == 0) {
        throw std::invalid_argument("integrator configuration values must be positive");
    }
    std::sort(checkpoints.begin(), checkpoints.end());
    for (double c : checkpoints) {
        if (c < t0 || c > t1) {
            throw std::invalid_argument("checkpoint outside the integration interval");
        }
    }

    Trajectory traj;
    const bool dense = !checkpoints.empty();
    std::size_t next_cp = 0;
    double t = t0;
    State y = std::move(y0);
    const std::size_t n = y.size();
    while (dense && next_cp < checkpoints.size() && checkpoints[next_cp] <= t0) {
        traj.points.push_back({checkpoints[next_cp++], y});
    }
    if (!dense) {
        traj.points.push_back({t, y});
    }

    State k1 = detail::call_rhs(rhs, t, y, traj.evaluations);
    double h = std::min(cfg.initial_step, t1 - t0);
    constexpr double beta = 0.04, expo1 = 0.2 - beta * 0.75, safe = 0.9;
    constexpr double fac_min = 0.2, fac_max = 10.0;
    double facold = 1e-4;
    bool last_rejected = false;
    std::size_t steps = 0;
    const double eps = std::numeric_limits<double>::epsilon();

    while (t < t1) {
        if (++steps > cfg.max_steps) {
            throw MaxStepsExceeded("step budget of " + std::to_string(cfg.max_steps) + " exhausted at t = " +
                                   std::to_string(t));
        }
        if (h < 16.0 * eps * std::max(std::abs(t), std::abs(t1))) {
            throw StepUnderflow("step size underflow at t = " + std::to_string(t));
        }
        bool final_step = false;
        if (t + h >= t1) {
            h = t1 - t;
            final_step = true;
        }
        const auto s = detail::dp5_step(rhs, t, y, k1, h, traj.evaluations);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const cplx e = h * (e1 * k1[i] + e3 * s.k3[i] + e4 * s.k4[i] + e5 * s.k5[i] + e6 * s.k6[i] +
                                e7 * s.k7[i]);
            const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(s.y_new[i]));
            err += std::norm(e) / (sc * sc);
        }
        err = n == 0 ? 0.0 : std::sqrt(err / static_cast<double>(n));
        if (!std::isfinite(err)) {
            err = 1e10;
        }

        const double fac11 = std::pow(err, expo1);
        if (err <= 1.0) {
            double fac = fac11 / std::pow(facold, beta);
            fac = std::clamp(fac / safe, 1.0 / fac_max, 1.0 / fac_min);
            double h_new = h / fac;
            if (last_rejected) {
                h_new = std::min(h_new, h);
            }
            facold = std::max(err, 1e-4);
            ++traj.accepted;

            const double t_new = final_step ? t1 : t + h;
            while (dense && next_cp < checkpoints.size() && checkpoints[next_cp] <= t_new) {
                const double theta = (checkpoints[next_cp] - t) / h;
                const double s1 = 1.0 - theta;
                State yc(n);
                for (std::size_t i = 0; i < n; ++i) {
                    const cplx ydiff = s.y_new[i] - y[i];
                    const cplx bspl = h * k1[i] - ydiff;
                    const cplx r4 = ydiff - h * s.k7[i] - bspl;
                    const cplx r5 = h * (d1 * k1[i] + d3 * s.k3[i] + d4 * s.k4[i] + d5 * s.k5[i] +
                                         d6 * s.k6[i] + d7 * s.k7[i]);
                    yc[i] = y[i] + theta * (ydiff + s1 * (bspl + theta * (r4 + s1 * r5)));
                }
                if (checkpoints[next_cp] == t_new) {
                    yc = s.y_new;
                }
                traj.points.push_back({checkpoints[next_cp++], std::move(yc)});
            }

            t = t_new;
            y = s.y_new;
            k1 = s.k7;
            if (on_accept) {
                on_accept(t, y);
                k1 = detail::call_rhs(rhs, t, y, traj.evaluations);
                if (dense && !traj.points.empty() && traj.points.back().t == t) {
                    traj.points.back().y = y;
                }
            }
            if (!dense) {
                traj.points.push_back({t, y});
            }
            h = h_new;
            last_rejected = false;
        } else {
            h = h / std::min(1.0 / fac_min, fac11 / safe);
            last_rejected = true;
            ++traj.rejected;
        }
    }
    traj.final_state = y;
    return traj;
}

/// Integrates with \p steps equal Dormand-Prince steps and no error control.
template <typename Rhs>
State integrate_fixed_step(Rhs &&rhs, State y, double t0, double t1, std::size_t steps)
{
    const double h = (t1 - t0) / static_cast<double>(steps);
    std::size_t evals = 0;
    double t = t0;
    State k1 = detail::call_rhs(rhs, t, y, evals);
    for (std::size_t i = 0; i < steps; ++i) {
        auto s = detail::dp5_step(rhs, t, y, k1, h, evals);
        y = std::move(s.y_new);
        k1 = std::move(s.k7);
        t = t0 + static_cast<double>(i + 1) * h;
    }
    return y;
}

}
