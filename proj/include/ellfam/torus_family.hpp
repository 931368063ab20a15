#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "integrator.hpp"
#include "lattice.hpp"
#include "period_derivatives.hpp"
#include "quadrature.hpp"
#include "target_path.hpp"

namespace ellfam
{

/// Critical points a_0..a_n, scale c and period omega2 of f'(z) = c prod sigma(z - a_k) / sigma(z)^(n+1).
/**
 * The lattice is (1, omega2); the family has a single pole of order n at the origin.
 */
struct TorusFamilyState
{
    double t = 0.0;
    std::vector<cplx> a;
    cplx c;
    cplx omega2;

    std::size_t order() const noexcept
    {
        return a.size() - 1;
    }
};

/// paths[k - 1] drives the critical value A_k, k = 1..n; A_0 is identically 0.
struct TorusFamilySpec
{
    int n = 0;
    TorusFamilyState initial;
    std::vector<TargetPath> paths;
};

/// Output of torus_rhs().
struct TorusRates
{
    std::vector<cplx> adot; // a_1..a_n
    cplx a0dot;
    cplx cdot;
    cplx omega2dot;
    std::vector<cplx> gamma; // gamma_1..gamma_n
    std::vector<cplx> D;     // D_0..D_n
};

/// Reuses LatticeInvariants while omega2 is bit-for-bit unchanged.
class TorusLatticeCache
{
    public:
        explicit TorusLatticeCache(double tol = 1e-12) : m_tol(tol) {}

        const LatticeInvariants &get(cplx omega2)
        {
            if (!(omega2.imag() > 0.05)) {
                throw LatticeDegenerate("Im(omega2) = " + std::to_string(omega2.imag()) + " is at or below 0.05");
            }
            const auto key = std::make_pair(std::bit_cast<std::uint64_t>(omega2.real()),
                                            std::bit_cast<std::uint64_t>(omega2.imag()));
            if (!m_inv || key != m_key) {
                m_inv = std::make_unique<LatticeInvariants>(invariants(make_lattice(1.0, omega2), m_tol));
                m_key = key;
                ++m_builds;
            }
            return *m_inv;
        }

        std::size_t builds() const noexcept
        {
            return m_builds;
        }

    private:
        double m_tol;
        std::pair<std::uint64_t, std::uint64_t> m_key{};
        std::unique_ptr<LatticeInvariants> m_inv;
        std::size_t m_builds = 0;
};

namespace detail
{

inline void check_torus_state(const TorusFamilyState &s, const LatticeInvariants &inv)
{
    const std::size_t N = s.a.size();
    for (std::size_t i = 0; i < N; ++i) {
        if (std::abs(reduce_to_cell(s.a[i], inv.lattice).z) < 1e-8) {
            throw ParameterCollision("critical point a_" + std::to_string(i) + " reached the pole");
        }
        for (std::size_t j = i + 1; j < N; ++j) {
            if (std::abs(s.a[i] - s.a[j]) < 1e-8) {
                throw ParameterCollision("critical points a_" + std::to_string(i) + " and a_" +
                                         std::to_string(j) + " collided");
            }
        }
    }
}

inline cplx torus_D(const TorusFamilyState &s, const LatticeInvariants &inv, std::size_t k)
{
    const double n1 = static_cast<double>(s.a.size());
    cplx acc = std::log(s.c) - n1 * log_sigma(s.a[k], inv);
    for (std::size_t j = 0; j < s.a.size(); ++j) {
        if (j != k) {
            acc += log_sigma(s.a[k] - s.a[j], inv);
        }
    }
    return std::exp(acc);
}

}

/// Right-hand side of the critical-point / scale / period system for critical-value velocities Adot_1..Adot_n.
inline TorusRates torus_rhs(const TorusFamilyState &s, const std::vector<cplx> &Adot, const LatticeInvariants &inv)
{
    const std::size_t N = s.a.size();
    if (N < 2 || Adot.size() != N - 1) {
        throw std::invalid_argument("torus state needs a_0..a_n and n critical-value velocities");
    }
    detail::check_torus_state(s, inv);
    const std::size_t n = N - 1;
    const double dn = static_cast<double>(n);
    TorusRates r;
    r.D.resize(N);
    for (std::size_t k = 0; k < N; ++k) {
        r.D[k] = detail::torus_D(s, inv, k);
    }
    r.gamma.assign(n, 0.0);
    cplx gsum = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        if (Adot[k - 1] == cplx(0.0)) {
            continue;
        }
        if (std::abs(r.D[k]) < 1e-12 * std::abs(s.c)) {
            throw DegenerateCriticalPoint("critical point a_" + std::to_string(k) + " is not simple");
        }
        r.gamma[k - 1] = Adot[k - 1] / r.D[k];
        gsum += r.gamma[k - 1];
    }

    std::vector<cplx> zeta_a(N), wp_a(N);
    for (std::size_t j = 0; j < N; ++j) {
        zeta_a[j] = zeta_w(s.a[j], inv);
        wp_a[j] = wp(s.a[j], inv);
    }
    // zeta(a_i - a_l), antisymmetric in (i, l).
    std::vector<std::vector<cplx>> zd(N, std::vector<cplx>(N, 0.0));
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t l = i + 1; l < N; ++l) {
            zd[i][l] = zeta_w(s.a[i] - s.a[l], inv);
            zd[l][i] = -zd[i][l];
        }
    }

    r.adot.assign(n, 0.0);
    for (std::size_t l = 1; l <= n; ++l) {
        cplx acc = 0.0;
        for (std::size_t k = 1; k <= n; ++k) {
            if (k != l) {
                acc += r.gamma[k - 1] * (zd[k][l] - zeta_a[k] + inv.eta1 * s.a[l]);
            }
        }
        cplx self = inv.eta1 * s.a[l] + dn * zeta_a[l];
        for (std::size_t q = 0; q < N; ++q) {
            if (q != l) {
                self += zd[q][l];
            }
        }
        r.adot[l - 1] = acc + r.gamma[l - 1] * self;
    }
    r.a0dot = 0.0;
    for (const cplx v : r.adot) {
        r.a0dot -= v;
    }
    r.omega2dot = 2.0 * pi * imag_unit * gsum;

    cplx lc = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
        const cplx aj_dot = j == 0 ? r.a0dot : r.adot[j - 1];
        lc -= zeta_a[j] * aj_dot;
        if (r.omega2dot != cplx(0.0)) {
            lc -= r.omega2dot * dlnsigma_domega(s.a[j], inv, 2);
        }
    }
    for (std::size_t k = 1; k <= n; ++k) {
        lc += dn * r.gamma[k - 1] * (wp_a[k] + inv.eta1);
    }
    r.cdot = s.c * lc;
    return r;
}

/// h(z) = fdot(z)/f'(z) = sum_k gamma_k [zeta(z - a_k) + zeta(a_k) - eta1 z].
inline cplx torus_h(cplx z, const TorusFamilyState &s, const TorusRates &r, const LatticeInvariants &inv)
{
    cplx acc = 0.0;
    for (std::size_t k = 1; k < s.a.size(); ++k) {
        acc += r.gamma[k - 1] * (zeta_w(z - s.a[k], inv) + zeta_w(s.a[k], inv) - inv.eta1 * z);
    }
    return acc;
}

/// f'(z) = c prod sigma(z - a_k) / sigma(z)^(n+1) on the lattice (1, omega2).
inline cplx torus_fprime(cplx z, const TorusFamilyState &s, const LatticeInvariants &inv)
{
    for (const cplx a : s.a) {
        if (std::abs(reduce_to_cell(z - a, inv.lattice).z) <= inv.pole_radius) {
            return 0.0;
        }
    }
    cplx acc = -static_cast<double>(s.a.size()) * log_sigma(z, inv);
    for (const cplx a : s.a) {
        acc += log_sigma(z - a, inv);
    }
    return s.c * std::exp(acc);
}

/// Lattice points of (1, omega2) within \p radius of \p center.
inline std::vector<cplx> nearby_lattice_points(cplx center, double radius, const Lattice &lat)
{
    std::vector<cplx> out;
    const auto r = reduce_to_cell(center, lat);
    const double h = lat.omega2.imag() / std::abs(lat.omega2) * std::abs(lat.omega1);
    const int span = static_cast<int>(std::ceil(radius / std::min(h, std::abs(lat.omega1)))) + 2;
    for (int i = -span; i <= span; ++i) {
        for (int j = -span; j <= span; ++j) {
            const cplx p = detail::lattice_vector(lat, r.m1 + i, r.m2 + j);
            if (std::abs(p - center) <= radius) {
                out.push_back(p);
            }
        }
    }
    return out;
}

/// Integral of f' along a polyline from \p from to \p to that keeps 0.05 away from lattice points.
inline cplx torus_integral(cplx from, cplx to, const TorusFamilyState &s, const LatticeInvariants &inv,
                           const QuadratureOptions &opt = {}, double clearance = 0.05)
{
    const cplx mid = 0.5 * (from + to);
    const auto obstacles = nearby_lattice_points(mid, 0.5 * std::abs(to - from) + 4.0 * clearance + 1.0, inv.lattice);
    const auto poly = route_polyline(from, to, obstacles, clearance);
    return integrate_polyline([&](cplx z) { return torus_fprime(z, s, inv); }, poly, opt);
}

/// Critical values A_k = f(a_k) with f(a_0) = 0.
inline std::vector<cplx> torus_critical_values(const TorusFamilyState &s, double tol = 1e-12)
{
    if (!(s.omega2.imag() > 0.05)) {
        throw LatticeDegenerate("Im(omega2) is at or below 0.05");
    }
    const auto inv = invariants(make_lattice(1.0, s.omega2), 1e-12);
    QuadratureOptions opt;
    opt.tol = tol;
    std::vector<cplx> out(s.a.size(), 0.0);
    for (std::size_t k = 1; k < s.a.size(); ++k) {
        out[k] = torus_integral(s.a[0], s.a[k], s, inv, opt);
    }
    return out;
}

/// Initial state of the family starting at f = wp^2 - 4 wp on the square lattice (1, i).
inline TorusFamilyState torus_initial_p2m4p(double tol = 1e-12)
{
    const auto inv = invariants(make_lattice(1.0, imag_unit), tol);
    TorusFamilyState s;
    s.omega2 = imag_unit;
    cplx a3 = wp_inverse(2.0, inv);
    // Pick the representative with real part 1/2 and positive imaginary part.
    if (a3.imag() < 0.0) {
        a3 = -a3;
    }
    a3 = cplx(0.5, a3.imag());
    s.a = {-0.5 * (1.0 + imag_unit), 0.5, 0.5 * imag_unit, a3, -a3};
    const cplx e1 = inv.e1;
    const cplx fpp = (2.0 * e1 - 4.0) * (6.0 * e1 * e1 - inv.g2 / 2.0);
    cplx lg = 5.0 * log_sigma(s.a[1], inv);
    for (std::size_t j = 0; j < s.a.size(); ++j) {
        if (j != 1) {
            lg -= log_sigma(s.a[1] - s.a[j], inv);
        }
    }
    s.c = fpp * std::exp(lg);
    return s;
}

/// Critical values of the initial wp^2 - 4 wp state: (0, e1^2 - 4 e1, e2^2 - 4 e2, -4, -4).
inline std::vector<cplx> torus_initial_p2m4p_values(double tol = 1e-12)
{
    const auto inv = invariants(make_lattice(1.0, imag_unit), tol);
    auto f = [](cplx w) { return w * w - 4.0 * w; };
    return {f(inv.e3), f(inv.e1), f(inv.e2), -4.0, -4.0};
}

/// Result of solve_torus_family().
struct TorusSolution
{
    std::vector<TorusFamilyState> checkpoints;
    TorusFamilyState endpoint;
    /// Largest |sum a_k| seen on accepted steps.
    double max_gauge_residual = 0.0;
    std::size_t accepted_steps = 0;
    std::size_t lattice_builds = 0;
};

inline void validate(const TorusFamilySpec &spec)
{
    if (spec.n < 1) {
        throw ValidationError("torus family order n must be at least 1");
    }
    if (spec.initial.a.size() != static_cast<std::size_t>(spec.n) + 1) {
        throw ValidationError("initial state must list critical points a_0..a_n");
    }
    if (spec.paths.size() != static_cast<std::size_t>(spec.n)) {
        throw ValidationError("one target path is required for each of A_1..A_n");
    }
    if (!(spec.initial.omega2.imag() > 0.0)) {
        throw ValidationError("orientation violated: Im(omega2) must be positive");
    }
    if (spec.initial.c == cplx(0.0)) {
        throw ValidationError("scale c must be nonzero");
    }
    cplx sum = 0.0;
    for (const cplx a : spec.initial.a) {
        sum += a;
    }
    if (!(std::abs(sum) < 1e-8)) {
        throw ValidationError("gauge relation violated: sum of critical points must be 0");
    }
    const auto inv = invariants(make_lattice(1.0, spec.initial.omega2), 1e-12);
    try {
        detail::check_torus_state(spec.initial, inv);
    } catch (const ParameterCollision &e) {
        throw ValidationError(std::string("critical points must be distinct and away from the pole: ") + e.what());
    }
}

/// Integrates the torus family from t = 0 to t = 1.
inline TorusSolution solve_torus_family(const TorusFamilySpec &spec, const IntegratorConfig &cfg = {},
                                        std::vector<double> checkpoints = {})
{
    validate(spec);
    const std::size_t N = spec.initial.a.size();
    TorusLatticeCache cache(1e-12);
    auto unpack = [&](double t, const State &y) {
        TorusFamilyState s;
        s.t = t;
        s.a.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(N));
        s.c = y[N];
        s.omega2 = y[N + 1];
        return s;
    };
    auto rhs = [&](double t, const State &y) {
        const auto s = unpack(t, y);
        const auto &inv = cache.get(s.omega2);
        const auto r = torus_rhs(s, path_derivatives(spec.paths, t), inv);
        State out(N + 2);
        out[0] = r.a0dot;
        for (std::size_t l = 1; l < N; ++l) {
            out[l] = r.adot[l - 1];
        }
        out[N] = r.cdot;
        out[N + 1] = r.omega2dot;
        return out;
    };
    TorusSolution sol;
    auto on_accept = [&](double, State &y) {
        cplx sum = 0.0;
        for (std::size_t k = 0; k < N; ++k) {
            sum += y[k];
        }
        sol.max_gauge_residual = std::max(sol.max_gauge_residual, std::abs(sum));
    };
    State y0(spec.initial.a);
    y0.push_back(spec.initial.c);
    y0.push_back(spec.initial.omega2);
    const auto traj = integrate(rhs, y0, 0.0, 1.0, cfg, std::move(checkpoints), on_accept);
    for (const auto &p : traj.points) {
        sol.checkpoints.push_back(unpack(p.t, p.y));
    }
    sol.endpoint = unpack(1.0, traj.final_state);
    sol.accepted_steps = traj.accepted;
    sol.lattice_builds = cache.builds();
    return sol;
}

}
