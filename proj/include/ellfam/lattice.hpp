#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"

namespace ellfam
{

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx imag_unit{0.0, 1.0};

/// A period lattice with Im(omega2/omega1) > 0.
struct Lattice
{
    cplx omega1;
    cplx omega2;
};

/// Builds a lattice, flipping the sign of \p omega2 when the input orientation is reversed.
inline Lattice make_lattice(cplx omega1, cplx omega2)
{
    if (omega1 == cplx(0.0) || omega2 == cplx(0.0)) {
        throw CollinearPeriods("periods must be nonzero");
    }
    const cplx tau = omega2 / omega1;
    if (!std::isfinite(tau.real()) || !std::isfinite(tau.imag()) ||
        std::abs(tau.imag()) <= 8.0 * std::numeric_limits<double>::epsilon() * std::abs(tau)) {
        throw CollinearPeriods("omega2/omega1 is real");
    }
    if (tau.imag() < 0.0) {
        omega2 = -omega2;
    }
    return {omega1, omega2};
}

/// Real coordinates (x, y) of z in the basis (omega1, omega2).
inline std::array<double, 2> basis_coordinates(cplx z, const Lattice &lat)
{
    const cplx a = lat.omega1, b = lat.omega2;
    const double x = (z * std::conj(b)).imag() / (a * std::conj(b)).imag();
    const double y = (z * std::conj(a)).imag() / (b * std::conj(a)).imag();
    return {x, y};
}

/// Result of reduce_to_cell(): z = z + m1*omega1 + m2*omega2 for the original argument.
struct CellPoint
{
    cplx z;
    std::int64_t m1 = 0;
    std::int64_t m2 = 0;
};

/// Reduces z to the half-open centred cell {x*omega1 + y*omega2 : x, y in [-1/2, 1/2)}.
inline CellPoint reduce_to_cell(cplx z, const Lattice &lat)
{
    auto [x, y] = basis_coordinates(z, lat);
    auto m1 = static_cast<std::int64_t>(std::floor(x + 0.5));
    auto m2 = static_cast<std::int64_t>(std::floor(y + 0.5));
    cplx zr = z - static_cast<double>(m1) * lat.omega1 - static_cast<double>(m2) * lat.omega2;
    // Rounding in the subtraction can push a coordinate just outside the half-open range.
    for (int pass = 0; pass < 2; ++pass) {
        auto [xr, yr] = basis_coordinates(zr, lat);
        bool moved = false;
        if (xr >= 0.5) {
            ++m1;
            zr -= lat.omega1;
            moved = true;
        } else if (xr < -0.5) {
            --m1;
            zr += lat.omega1;
            moved = true;
        }
        if (yr >= 0.5) {
            ++m2;
            zr -= lat.omega2;
            moved = true;
        } else if (yr < -0.5) {
            --m2;
            zr += lat.omega2;
            moved = true;
        }
        if (!moved) {
            break;
        }
    }
    return {zr, m1, m2};
}

/// Options for point evaluation of the Weierstrass functions.
struct EvalOptions
{
    /// Target absolute accuracy; must not be tighter than the invariants' tolerance.
    double tol = 1e-10;
    /// Radius below which the Laurent expansions are used; 0 selects the lattice default.
    double near_origin_radius = 0.0;
};

/// Weierstrass invariants of a lattice, plus the row data used by the evaluators.
struct LatticeInvariants
{
    Lattice lattice;
    cplx g2;
    cplx g3;
    cplx eta1;
    cplx eta2;
    cplx e1;
    cplx e2;
    cplx e3;
    /// Number of omega2-rows kept in every accelerated series.
    int trunc_radius = 0;
    double tol = 0.0;

    // Evaluation data.
    cplx scale;                   // pi / omega1
    std::vector<cplx> row_shift;  // pi * n * omega2 / omega1, n = 1..trunc_radius
    std::vector<cplx> row_csc2;   // csc^2(row_shift[n])
    std::array<cplx, 14> laurent; // c_k of wp(z) = 1/z^2 + sum_k c_k z^(2k-2), k >= 2
    double near_radius = 0.0;
    double pole_radius = 0.0;
};

namespace detail
{

inline constexpr int max_rows = 200000;
inline constexpr int laurent_terms = 13;

struct CscCot
{
    cplx csc2;
    cplx cot;
};

// csc^2 and cot, written in terms of exp(+-2ix) away from the real axis so that
// arguments with a large imaginary part neither overflow nor cancel.
inline CscCot csc2_cot(cplx x)
{
    if (x.imag() > 1.0) {
        const cplx q = std::exp(cplx(0.0, 2.0) * x);
        const cplx d = 1.0 - q;
        return {-4.0 * q / (d * d), imag_unit * (q + 1.0) / (q - 1.0)};
    }
    if (x.imag() < -1.0) {
        const cplx q = std::exp(cplx(0.0, -2.0) * x);
        const cplx d = 1.0 - q;
        return {-4.0 * q / (d * d), imag_unit * (1.0 + q) / d};
    }
    const cplx s = std::sin(x);
    return {1.0 / (s * s), std::cos(x) / s};
}

inline cplx laurent_wp(cplx z, const LatticeInvariants &inv)
{
    const cplx z2 = z * z;
    cplx acc = 0.0, p = z2;
    for (int k = 2; k <= laurent_terms; ++k) {
        acc += inv.laurent[k] * p;
        p *= z2;
    }
    return 1.0 / z2 + acc;
}

inline cplx laurent_wp_prime(cplx z, const LatticeInvariants &inv)
{
    const cplx z2 = z * z;
    cplx acc = 0.0, p = z;
    for (int k = 2; k <= laurent_terms; ++k) {
        acc += static_cast<double>(2 * k - 2) * inv.laurent[k] * p;
        p *= z2;
    }
    return -2.0 / (z2 * z) + acc;
}

inline cplx laurent_zeta(cplx z, const LatticeInvariants &inv)
{
    const cplx z2 = z * z;
    cplx acc = 0.0, p = z2 * z;
    for (int k = 2; k <= laurent_terms; ++k) {
        acc += inv.laurent[k] * p / static_cast<double>(2 * k - 1);
        p *= z2;
    }
    return 1.0 / z - acc;
}

// The *_series functions accept any non-lattice z; callers normally pass a reduced point.
inline cplx series_wp(cplx z, const LatticeInvariants &inv)
{
    const cplx u = z * inv.scale;
    cplx acc = -1.0 / 3.0 + csc2_cot(u).csc2;
    for (std::size_t n = 0; n < inv.row_shift.size(); ++n) {
        const cplx v = inv.row_shift[n];
        acc += csc2_cot(u - v).csc2 + csc2_cot(u + v).csc2 - 2.0 * inv.row_csc2[n];
    }
    return inv.scale * inv.scale * acc;
}

inline cplx series_wp_prime(cplx z, const LatticeInvariants &inv)
{
    const cplx u = z * inv.scale;
    auto term = [](cplx x) {
        const auto t = csc2_cot(x);
        return t.csc2 * t.cot;
    };
    cplx acc = term(u);
    for (const cplx v : inv.row_shift) {
        acc += term(u - v) + term(u + v);
    }
    return -2.0 * inv.scale * inv.scale * inv.scale * acc;
}

inline cplx series_zeta(cplx z, const LatticeInvariants &inv)
{
    const cplx u = z * inv.scale;
    cplx acc = csc2_cot(u).cot;
    for (const cplx v : inv.row_shift) {
        acc += csc2_cot(u - v).cot + csc2_cot(u + v).cot;
    }
    return inv.eta1 * z / inv.lattice.omega1 + inv.scale * acc;
}

// Product formula sigma(z) = (omega1/pi) sin(u) exp(eta1 z^2 / (2 omega1)) prod (1 - sin^2 u csc^2 v_n),
// summed as principal logarithms. Only exp() of the result is branch independent.
inline cplx series_log_sigma(cplx z, const LatticeInvariants &inv)
{
    const cplx u = z * inv.scale;
    const cplx s = std::sin(u);
    const cplx s2 = s * s;
    cplx acc = inv.eta1 * z * z / (2.0 * inv.lattice.omega1) + std::log(s / inv.scale);
    for (const cplx c2 : inv.row_csc2) {
        acc += std::log(1.0 - s2 * c2);
    }
    return acc;
}

inline double near_radius(const LatticeInvariants &inv, const EvalOptions &opt)
{
    if (opt.near_origin_radius > 0.0) {
        return opt.near_origin_radius;
    }
    return inv.near_radius;
}

inline void check_options(const LatticeInvariants &inv, const EvalOptions &opt)
{
    if (!(opt.tol > 0.0)) {
        throw ToleranceUnreachable("evaluation tolerance must be positive");
    }
    if (opt.tol < inv.tol) {
        throw ToleranceUnreachable("evaluation tolerance is tighter than the invariants' tolerance");
    }
}

inline cplx raw_wp(cplx z, const LatticeInvariants &inv, double r_near)
{
    return std::abs(z) < r_near ? laurent_wp(z, inv) : series_wp(z, inv);
}

inline cplx raw_wp_prime(cplx z, const LatticeInvariants &inv, double r_near)
{
    return std::abs(z) < r_near ? laurent_wp_prime(z, inv) : series_wp_prime(z, inv);
}

inline cplx raw_zeta(cplx z, const LatticeInvariants &inv, double r_near)
{
    return std::abs(z) < r_near ? laurent_zeta(z, inv) : series_zeta(z, inv);
}

inline CellPoint reduce_checked(cplx z, const LatticeInvariants &inv)
{
    const auto r = reduce_to_cell(z, inv.lattice);
    if (std::abs(r.z) <= inv.pole_radius) {
        throw PoleAtLatticePoint("argument is a lattice point");
    }
    return r;
}

inline cplx lattice_vector(const Lattice &lat, std::int64_t m1, std::int64_t m2)
{
    return static_cast<double>(m1) * lat.omega1 + static_cast<double>(m2) * lat.omega2;
}

inline cplx eta_of(const LatticeInvariants &inv, std::int64_t m1, std::int64_t m2)
{
    return static_cast<double>(m1) * inv.eta1 + static_cast<double>(m2) * inv.eta2;
}

}

/// Computes g2, g3, the quasi-periods eta1, eta2 and the half-period values e1, e2, e3.
/**
 * The Eisenstein sums are summed row by row: each row of lattice points parallel to omega1 is
 * collapsed in closed form (cosecant identities), so only the rows in the omega2 direction are
 * truncated. The row count is chosen from the geometric tail bound so that the discarded rows
 * contribute less than \p tol relative to the leading terms.
 */
inline LatticeInvariants invariants(const Lattice &lat, double tol = 1e-12)
{
    if (!(tol > 0.0)) {
        throw ToleranceUnreachable("tolerance must be positive");
    }
    LatticeInvariants inv;
    inv.lattice = lat;
    inv.tol = tol;
    const cplx tau = lat.omega2 / lat.omega1;
    const double im_tau = tau.imag();
    const double rows_needed = (std::log(400.0 / tol) / (pi * im_tau) - 1.0) / 2.0 + 1.0;
    if (!(rows_needed < detail::max_rows)) {
        throw ToleranceUnreachable("lattice too flat: " + std::to_string(rows_needed) +
                                   " rows needed for the requested tolerance");
    }
    const int rows = std::max(2, static_cast<int>(std::ceil(rows_needed)));
    inv.trunc_radius = rows;
    inv.scale = pi / lat.omega1;
    inv.row_shift.resize(rows);
    inv.row_csc2.resize(rows);
    cplx sum_s = 0.0, sum_g4 = 0.0, sum_g6 = 0.0;
    for (int n = 1; n <= rows; ++n) {
        const cplx v = pi * static_cast<double>(n) * tau;
        const cplx s = detail::csc2_cot(v).csc2;
        inv.row_shift[n - 1] = v;
        inv.row_csc2[n - 1] = s;
        sum_s += s;
        sum_g4 += 3.0 * s * s - 2.0 * s;
        sum_g6 += 15.0 * s * s * s - 15.0 * s * s + 2.0 * s;
    }
    const double pi2 = pi * pi, pi4 = pi2 * pi2, pi6 = pi4 * pi2;
    const cplx w2 = lat.omega1 * lat.omega1, w4 = w2 * w2, w6 = w4 * w2;
    // Row n = 0 contributes 2 zeta(4) and 2 zeta(6); rows +-n contribute equally.
    const cplx G4 = (pi4 / 45.0 + 2.0 * pi4 * sum_g4 / 3.0) / w4;
    const cplx G6 = (2.0 * pi6 / 945.0 + 2.0 * pi6 * sum_g6 / 15.0) / w6;
    inv.g2 = 60.0 * G4;
    inv.g3 = 140.0 * G6;
    inv.eta1 = pi2 / lat.omega1 * (1.0 / 3.0 + 2.0 * sum_s);

    inv.laurent.fill(0.0);
    inv.laurent[2] = inv.g2 / 20.0;
    inv.laurent[3] = inv.g3 / 28.0;
    for (int k = 4; k <= detail::laurent_terms; ++k) {
        cplx acc = 0.0;
        for (int m = 2; m <= k - 2; ++m) {
            acc += inv.laurent[m] * inv.laurent[k - m];
        }
        inv.laurent[k] = 3.0 * acc / static_cast<double>((2 * k + 1) * (k - 3));
    }

    const double a1 = std::abs(lat.omega1), a2 = std::abs(lat.omega2);
    inv.near_radius = 0.1 * std::min({a1, a2, std::abs(lat.omega1 + lat.omega2),
                                      std::abs(lat.omega1 - lat.omega2)});
    inv.pole_radius = 1e-13 * std::max(a1, a2);

    // eta2 comes from its own series evaluation, so the Legendre relation is a genuine check.
    inv.eta2 = 2.0 * detail::raw_zeta(lat.omega2 / 2.0, inv, inv.near_radius);
    inv.e1 = detail::raw_wp(lat.omega1 / 2.0, inv, inv.near_radius);
    inv.e2 = detail::raw_wp(lat.omega2 / 2.0, inv, inv.near_radius);
    inv.e3 = detail::raw_wp((lat.omega1 + lat.omega2) / 2.0, inv, inv.near_radius);

    const double mag = std::max({1.0, std::abs(inv.e1), std::abs(inv.e2), std::abs(inv.e3)});
    const double check = 100.0 * tol * mag * mag * mag;
    const cplx legendre = inv.eta1 * lat.omega2 - inv.eta2 * lat.omega1 - 2.0 * pi * imag_unit;
    if (std::abs(legendre) > 100.0 * tol * std::max(1.0, std::abs(inv.eta1 * lat.omega2))) {
        throw ToleranceUnreachable("Legendre relation not satisfied to tolerance");
    }
    for (const cplx e : {inv.e1, inv.e2, inv.e3}) {
        if (std::abs(4.0 * e * e * e - inv.g2 * e - inv.g3) > check) {
            throw ToleranceUnreachable("half-period value is not a root of 4w^3 - g2 w - g3");
        }
    }
    if (std::abs(inv.e1 + inv.e2 + inv.e3) > 100.0 * tol * mag ||
        std::abs(inv.e1 - inv.e2) <= tol || std::abs(inv.e1 - inv.e3) <= tol ||
        std::abs(inv.e2 - inv.e3) <= tol) {
        throw ToleranceUnreachable("half-period values e1, e2, e3 are inconsistent");
    }
    return inv;
}

/// Weierstrass P function.
inline cplx wp(cplx z, const LatticeInvariants &inv, const EvalOptions &opt = {})
{
    detail::check_options(inv, opt);
    const auto r = detail::reduce_checked(z, inv);
    return detail::raw_wp(r.z, inv, detail::near_radius(inv, opt));
}

/// Derivative of the Weierstrass P function.
inline cplx wp_prime(cplx z, const LatticeInvariants &inv, const EvalOptions &opt = {})
{
    detail::check_options(inv, opt);
    const auto r = detail::reduce_checked(z, inv);
    return detail::raw_wp_prime(r.z, inv, detail::near_radius(inv, opt));
}

/// Weierstrass zeta function, continued from the centred cell by zeta(z + w) = zeta(z) + eta(w).
inline cplx zeta_w(cplx z, const LatticeInvariants &inv, const EvalOptions &opt = {})
{
    detail::check_options(inv, opt);
    const auto r = detail::reduce_checked(z, inv);
    return detail::raw_zeta(r.z, inv, detail::near_radius(inv, opt)) + detail::eta_of(inv, r.m1, r.m2);
}

/// Logarithm of the Weierstrass sigma function.
/**
 * The value is exact modulo 2*pi*i: the real part is ln|sigma(z)| and exp() of the result is
 * sigma(z). For arguments outside the centred cell the quasi-periodicity law of sigma is applied
 * to the reduced value.
 */
inline cplx log_sigma(cplx z, const LatticeInvariants &inv, const EvalOptions &opt = {})
{
    detail::check_options(inv, opt);
    const auto r = detail::reduce_checked(z, inv);
    cplx acc = detail::series_log_sigma(r.z, inv);
    if (r.m1 != 0 || r.m2 != 0) {
        const cplx w = detail::lattice_vector(inv.lattice, r.m1, r.m2);
        acc += detail::eta_of(inv, r.m1, r.m2) * (r.z + w / 2.0);
        const std::int64_t parity = (r.m1 + r.m2 + r.m1 * r.m2) & 1;
        if (parity != 0) {
            acc += pi * imag_unit;
        }
    }
    return acc;
}

/// Weierstrass sigma function; returns 0 at lattice points.
inline cplx sigma(cplx z, const LatticeInvariants &inv, const EvalOptions &opt = {})
{
    detail::check_options(inv, opt);
    const auto r = reduce_to_cell(z, inv.lattice);
    if (r.z == cplx(0.0)) {
        return 0.0;
    }
    return std::exp(log_sigma(z, inv, opt));
}

/// One solution z* of wp(z) = w in the centred cell; the other solution is -z* modulo the lattice.
inline cplx wp_inverse(cplx w, const LatticeInvariants &inv, const EvalOptions &opt = {})
{
    detail::check_options(inv, opt);
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) {
        throw NoConvergence("wp_inverse requires a finite value");
    }
    const double r_near = detail::near_radius(inv, opt);
    const double target = 1e-13 * std::max(1.0, std::abs(w));
    cplx best = 0.0;
    double best_res = std::numeric_limits<double>::infinity();
    constexpr int seeds = 6;
    for (int i = 0; i < seeds && best_res > target; ++i) {
        for (int j = 0; j < seeds && best_res > target; ++j) {
            const double x = -0.5 + (i + 0.5) / seeds, y = -0.5 + (j + 0.5) / seeds;
            cplx z = x * inv.lattice.omega1 + y * inv.lattice.omega2;
            for (int it = 0; it < 100; ++it) {
                z = reduce_to_cell(z, inv.lattice).z;
                if (std::abs(z) <= inv.pole_radius) {
                    break;
                }
                const cplx f = detail::raw_wp(z, inv, r_near) - w;
                const double res = std::abs(f);
                if (res < best_res) {
                    best_res = res;
                    best = z;
                }
                if (res <= target) {
                    break;
                }
                const cplx d = detail::raw_wp_prime(z, inv, r_near);
                if (d == cplx(0.0)) {
                    break;
                }
                const cplx step = f / d;
                z -= step;
                if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
                    break;
                }
            }
        }
    }
    if (!(best_res <= 1e-9 * std::max(1.0, std::abs(w)))) {
        throw NoConvergence("Newton iteration for wp(z) = w failed from every seed");
    }
    return best;
}

}
