#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "errors.hpp"
#include "integrator.hpp"
#include "jet.hpp"
#include "quadrature.hpp"
#include "target_path.hpp"

namespace ellfam
{

/// A one-parameter family of rational functions with prescribed critical-value paths.
/**
 * Critical points a_l have multiplicity m_l (R - A_l vanishes to order m_l), finite poles b_j
 * have order n_j. paths[l] drives the critical value A_l = R(a_l).
 */
struct RationalFamilySpec
{
    std::vector<int> m;
    std::vector<int> n;
    std::vector<cplx> a0;
    std::vector<cplx> b0;
    std::vector<TargetPath> paths;
};

struct RationalFamilyState
{
    double t = 0.0;
    std::vector<cplx> a;
    std::vector<cplx> b;
};

/// Time derivatives of the critical points and poles.
struct RationalRates
{
    std::vector<cplx> adot;
    std::vector<cplx> bdot;
};

inline int critical_order_sum(const RationalFamilySpec &spec)
{
    int s = 0;
    for (int m : spec.m) {
        s += m - 1;
    }
    return s;
}

inline int pole_order_sum(const RationalFamilySpec &spec)
{
    int s = 0;
    for (int n : spec.n) {
        s += n + 1;
    }
    return s;
}

/// sum (m_l - 1) a_l - sum (n_j + 1) b_j; zero for a normalized family.
inline cplx gauge_residual(const RationalFamilySpec &spec, const std::vector<cplx> &a, const std::vector<cplx> &b)
{
    cplx s = 0.0;
    for (std::size_t l = 0; l < a.size(); ++l) {
        s += static_cast<double>(spec.m[l] - 1) * a[l];
    }
    for (std::size_t j = 0; j < b.size(); ++j) {
        s -= static_cast<double>(spec.n[j] + 1) * b[j];
    }
    return s;
}

/// Largest pairwise distance among all critical points and poles.
inline double parameter_scale(const std::vector<cplx> &a, const std::vector<cplx> &b)
{
    std::vector<cplx> all(a);
    all.insert(all.end(), b.begin(), b.end());
    double s = 0.0;
    for (std::size_t i = 0; i < all.size(); ++i) {
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            s = std::max(s, std::abs(all[i] - all[j]));
        }
    }
    return s;
}

/// Checks the structural invariants of a spec; throws ValidationError naming the violated one.
inline void validate(const RationalFamilySpec &spec)
{
    if (spec.m.empty()) {
        throw ValidationError("family needs at least one critical point");
    }
    if (spec.a0.size() != spec.m.size()) {
        throw ValidationError("a0 must have one entry per critical-point multiplicity");
    }
    if (spec.b0.size() != spec.n.size()) {
        throw ValidationError("b0 must have one entry per pole order");
    }
    if (spec.paths.size() != spec.m.size()) {
        throw ValidationError("one target path is required per critical point");
    }
    for (int m : spec.m) {
        if (m < 2) {
            throw ValidationError("critical-point multiplicities must be at least 2");
        }
    }
    for (int n : spec.n) {
        if (n < 1) {
            throw ValidationError("pole orders must be at least 1");
        }
    }
    const int ms = critical_order_sum(spec), ns = pole_order_sum(spec);
    if (ms == ns - 1) {
        throw ValidationError("order relation violated: sum(m_l - 1) must differ from sum(n_j + 1) - 1");
    }
    const double g = std::abs(gauge_residual(spec, spec.a0, spec.b0));
    if (!(g < 1e-10)) {
        throw ValidationError("gauge relation violated: |sum (m_l - 1) a_l - sum (n_j + 1) b_j| = " +
                              std::to_string(g) + " (must be below 1e-10)");
    }
    std::vector<cplx> all(spec.a0);
    all.insert(all.end(), spec.b0.begin(), spec.b0.end());
    for (std::size_t i = 0; i < all.size(); ++i) {
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            if (all[i] == all[j]) {
                throw ValidationError("critical points and poles must be pairwise distinct");
            }
        }
    }
    if (ms > ns && std::abs(spec.paths[0].start) + std::abs(spec.paths[0].delta) != 0.0) {
        throw ValidationError("the first critical value is the base point and its path must be identically 0");
    }
}

namespace detail
{

inline void check_collision(const std::vector<cplx> &a, const std::vector<cplx> &b, double threshold)
{
    std::vector<cplx> all(a);
    all.insert(all.end(), b.begin(), b.end());
    for (std::size_t i = 0; i < all.size(); ++i) {
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            if (std::abs(all[i] - all[j]) < threshold) {
                throw ParameterCollision("critical points or poles collided (gap " +
                                         std::to_string(std::abs(all[i] - all[j])) + ")");
            }
        }
    }
}

// Jet of H_k(x) = prod (x - b_j)^(n_j + 1) / prod_{i != k} (x - a_i)^(m_i - 1) at a_k.
inline Jet h_jet(const RationalFamilySpec &spec, const std::vector<cplx> &a, const std::vector<cplx> &b,
                 std::size_t k, std::size_t K)
{
    const cplx x0 = a[k];
    Jet num = jet_constant(1.0, x0, K);
    for (std::size_t j = 0; j < b.size(); ++j) {
        num = jet_mul(num, jet_pow_int(jet_from_linear(b[j], x0, K), spec.n[j] + 1));
    }
    Jet den = jet_constant(1.0, x0, K);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (i != k) {
            den = jet_mul(den, jet_pow_int(jet_from_linear(a[i], x0, K), spec.m[i] - 1));
        }
    }
    return jet_div(num, den);
}

}

/// Right-hand side of the critical-point/pole system for given critical-value velocities.
/**
 * adot_l = H_l^(m_l-1)(a_l)/(m_l-1)! Adot_l + sum_{k != l} G_kl^(m_k-2)(a_k)/(m_k-2)! Adot_k and
 * bdot_j = sum_k I_kj^(m_k-2)(a_k)/(m_k-2)! Adot_k with G_kl = H_k/(x - a_l), I_kj = H_k/(x - b_j).
 * \p collision_threshold is the minimum allowed gap between any two parameters.
 */
inline RationalRates rational_rhs(const RationalFamilyState &state, const RationalFamilySpec &spec,
                                  const std::vector<cplx> &Adot, double collision_threshold = 0.0)
{
    const std::size_t M = state.a.size(), N = state.b.size();
    if (Adot.size() != M) {
        throw std::invalid_argument("one critical-value velocity per critical point is required");
    }
    detail::check_collision(state.a, state.b, collision_threshold);
    RationalRates r{std::vector<cplx>(M, cplx(0.0)), std::vector<cplx>(N, cplx(0.0))};
    for (std::size_t k = 0; k < M; ++k) {
        if (Adot[k] == cplx(0.0)) {
            continue;
        }
        const std::size_t mk = static_cast<std::size_t>(spec.m[k]);
        const Jet H = detail::h_jet(spec, state.a, state.b, k, mk - 1);
        r.adot[k] += H.coeffs[mk - 1] * Adot[k];
        for (std::size_t l = 0; l < M; ++l) {
            if (l != k) {
                const Jet G = jet_div(H, jet_from_linear(state.a[l], state.a[k], mk - 1));
                r.adot[l] += G.coeffs[mk - 2] * Adot[k];
            }
        }
        for (std::size_t j = 0; j < N; ++j) {
            const Jet I = jet_div(H, jet_from_linear(state.b[j], state.a[k], mk - 1));
            r.bdot[j] += I.coeffs[mk - 2] * Adot[k];
        }
    }
    return r;
}

/// Result of solve_rational_family().
struct RationalSolution
{
    std::vector<RationalFamilyState> checkpoints;
    RationalFamilyState endpoint;
    /// Largest gauge residual seen on accepted steps.
    double max_gauge_residual = 0.0;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
};

/// Integrates the family from t = 0 to t = 1.
/**
 * When sum(m_l - 1) != sum(n_j + 1) the family is translation invariant and the state is
 * re-centred after every accepted step so that the gauge relation holds exactly; otherwise the
 * relation is conserved by the flow and only monitored.
 */
inline RationalSolution solve_rational_family(const RationalFamilySpec &spec, const IntegratorConfig &cfg = {},
                                              std::vector<double> checkpoints = {})
{
    validate(spec);
    const std::size_t M = spec.a0.size();
    const double threshold = 1e-8 * parameter_scale(spec.a0, spec.b0);
    const int ms = critical_order_sum(spec), ns = pole_order_sum(spec);

    auto unpack = [&](double t, const State &y) {
        RationalFamilyState s;
        s.t = t;
        s.a.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(M));
        s.b.assign(y.begin() + static_cast<std::ptrdiff_t>(M), y.end());
        return s;
    };
    auto rhs = [&](double t, const State &y) {
        const auto s = unpack(t, y);
        const auto r = rational_rhs(s, spec, path_derivatives(spec.paths, t), threshold);
        State out(r.adot);
        out.insert(out.end(), r.bdot.begin(), r.bdot.end());
        return out;
    };

    RationalSolution sol;
    auto on_accept = [&](double t, State &y) {
        auto s = unpack(t, y);
        const cplx g = gauge_residual(spec, s.a, s.b);
        if (ms != ns) {
            const cplx delta = g / static_cast<double>(ms - ns);
            for (auto &v : y) {
                v -= delta;
            }
        }
        sol.max_gauge_residual = std::max(sol.max_gauge_residual, std::abs(g));
    };

    State y0(spec.a0);
    y0.insert(y0.end(), spec.b0.begin(), spec.b0.end());
    const auto traj = integrate(rhs, y0, 0.0, 1.0, cfg, std::move(checkpoints), on_accept);
    for (const auto &p : traj.points) {
        sol.checkpoints.push_back(unpack(p.t, p.y));
    }
    sol.endpoint = unpack(1.0, traj.final_state);
    sol.accepted_steps = traj.accepted;
    sol.rejected_steps = traj.rejected;
    return sol;
}

/// R'(z) = prod (z - a_l)^(m_l - 1) / prod (z - b_j)^(n_j + 1).
inline cplx rational_derivative(cplx z, const RationalFamilyState &state, const RationalFamilySpec &spec)
{
    cplx num = 1.0, den = 1.0;
    for (std::size_t l = 0; l < state.a.size(); ++l) {
        num *= std::pow(z - state.a[l], spec.m[l] - 1);
    }
    for (std::size_t j = 0; j < state.b.size(); ++j) {
        den *= std::pow(z - state.b[j], spec.n[j] + 1);
    }
    return num / den;
}

/// Integral of R' along the polyline through \p points.
inline cplx rational_polyline_integral(const std::vector<cplx> &points, const RationalFamilyState &state,
                                       const RationalFamilySpec &spec, const QuadratureOptions &opt = {})
{
    return integrate_polyline([&](cplx z) { return rational_derivative(z, state, spec); }, points, opt);
}

namespace detail
{

// Integral of R' from infinity to Z for a family whose R' decays like z^(m - n) with m - n <= 0,
// computed from the expansion R'(z) = z^(m-n) F(1/z); for m = n the constant 1 is excluded.
inline cplx rational_tail(cplx Z, const RationalFamilyState &state, const RationalFamilySpec &spec, int p)
{
    constexpr std::size_t K = 80;
    Jet F = jet_constant(1.0, 0.0, K);
    auto linear = [&](cplx c) {
        Jet j = jet_constant(1.0, 0.0, K);
        j.coeffs[1] = -c;
        return j;
    };
    for (std::size_t l = 0; l < state.a.size(); ++l) {
        F = jet_mul(F, jet_pow_int(linear(state.a[l]), spec.m[l] - 1));
    }
    for (std::size_t j = 0; j < state.b.size(); ++j) {
        F = jet_mul(F, jet_pow_int(linear(state.b[j]), -(spec.n[j] + 1)));
    }
    const cplx W = 1.0 / Z;
    cplx acc = 0.0;
    // For p = 0 the k = 1 term is the residue at infinity, which vanishes by the gauge relation.
    const std::size_t k0 = p == 0 ? 2 : 0;
    for (std::size_t k = k0; k <= K; ++k) {
        const int e = static_cast<int>(k) + p - 1;
        acc -= F.coeffs[k] * std::pow(W, e) / static_cast<double>(e);
    }
    return acc;
}

}

/// Critical values A_l = R(a_l) by contour quadrature of R'.
/**
 * Contours are polylines that keep a clearance of 0.1 * scale from the poles (reduced when an
 * endpoint is closer than that to a pole). Integrals from infinity start on a circle of radius
 * 4 * max|parameter| and the remaining tail is summed from the Laurent expansion at infinity.
 */
inline std::vector<cplx> critical_values_quadrature(const RationalFamilyState &state,
                                                    const RationalFamilySpec &spec,
                                                    const QuadratureOptions &opt = {})
{
    const int ms = critical_order_sum(spec), ns = pole_order_sum(spec);
    const std::size_t M = state.a.size();
    const double scale = parameter_scale(state.a, state.b);
    double clearance = 0.1 * scale;
    double rmax = 0.0;
    for (const cplx a : state.a) {
        rmax = std::max(rmax, std::abs(a));
        for (const cplx b : state.b) {
            clearance = std::min(clearance, 0.5 * std::abs(a - b));
        }
    }
    for (const cplx b : state.b) {
        rmax = std::max(rmax, std::abs(b));
    }
    const double R0 = 4.0 * std::max(rmax, scale);

    std::vector<cplx> out(M);
    for (std::size_t l = 0; l < M; ++l) {
        if (ms > ns) {
            const auto poly = route_polyline(state.a[0], state.a[l], state.b, clearance);
            out[l] = rational_polyline_integral(poly, state, spec, opt);
            continue;
        }
        const cplx dir = std::abs(state.a[l]) > 0.0 ? state.a[l] / std::abs(state.a[l]) : cplx(1.0);
        const cplx Z = R0 * dir;
        const auto poly = route_polyline(Z, state.a[l], state.b, clearance);
        const cplx inner = rational_polyline_integral(poly, state, spec, opt);
        if (ms == ns) {
            out[l] = Z + detail::rational_tail(Z, state, spec, 0) + inner;
        } else {
            out[l] = detail::rational_tail(Z, state, spec, ns - ms) + inner;
        }
    }
    return out;
}

}
