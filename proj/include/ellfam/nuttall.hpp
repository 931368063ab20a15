#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "errors.hpp"
#include "lattice.hpp"
#include "quadrature.hpp"

namespace ellfam
{

/// e^{2 pi i / 3}
inline const cplx rho = std::polar(1.0, 2.0 * pi / 3.0);

/// Branch triple normalized to the cube roots of unity.
struct TriangleConfig
{
    cplx a1, a2, a3;
    /// Anharmonic ratio (a3 - a2)/(a3 - a1).
    cplx gamma;
    /// Image of infinity under T.
    cplx z0;
    /// T(z) = (A z + B)/(C z + D), stored as {A, B, C, D}.
    std::array<cplx, 4> mobius;

    cplx apply(cplx z) const
    {
        return (mobius[0] * z + mobius[1]) / (mobius[2] * z + mobius[3]);
    }
};

namespace detail
{

using Mat2 = std::array<cplx, 4>;

inline Mat2 matmul(const Mat2 &x, const Mat2 &y)
{
    return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2],
            x[2] * y[1] + x[3] * y[3]};
}

inline Mat2 adjugate(const Mat2 &x)
{
    return {x[3], -x[1], -x[2], x[0]};
}

// z -> ((z - p)(q - r)) / ((z - r)(q - p)): p -> 0, q -> 1, r -> infinity.
inline Mat2 cross_ratio_map(cplx p, cplx q, cplx r)
{
    return {q - r, -p * (q - r), q - p, -r * (q - p)};
}

}

/// Relabels the triple so that a1, a3, a2 run counter-clockwise and builds the Mobius map T.
inline TriangleConfig normalize_triangle(cplx a1, cplx a2, cplx a3)
{
    const double scale = std::max({std::abs(a1 - a2), std::abs(a2 - a3), std::abs(a1 - a3)});
    const double area = ((a3 - a1) * std::conj(a2 - a1)).imag();
    if (!(scale > 0.0) || std::abs(area) <= 1e-12 * scale * scale) {
        throw DegenerateTriangle("branch points are coincident or collinear");
    }
    if (area > 0.0) {
        std::swap(a2, a3);
    }
    TriangleConfig t;
    t.a1 = a1;
    t.a2 = a2;
    t.a3 = a3;
    const auto src = detail::cross_ratio_map(a1, a2, a3);
    const auto dst = detail::cross_ratio_map(1.0, rho, std::conj(rho));
    t.mobius = detail::matmul(detail::adjugate(dst), src);
    t.gamma = (a3 - a2) / (a3 - a1);
    t.z0 = t.mobius[0] / t.mobius[2];
    return t;
}

/// Weierstrass data for the hexagonal lattice (sqrt 3, sqrt 3 e^{i pi/3}) plus the point alpha.
struct NuttallContext
{
    cplx alpha;
    LatticeInvariants inv;
};

inline const LatticeInvariants &hexagonal_invariants()
{
    static const LatticeInvariants inv =
        invariants(make_lattice(std::sqrt(3.0), std::sqrt(3.0) * std::polar(1.0, pi / 3.0)), 1e-12);
    return inv;
}

inline NuttallContext make_nuttall_context(cplx alpha)
{
    return {alpha, hexagonal_invariants()};
}

/// Centre sqrt(3)/3 of the fundamental triangle.
inline constexpr double nuttall_z1 = 0.57735026918962576451;

/// Uniformizer pi(z) = -prod sigma(z - rho^k z1) / sigma(z + rho^k z1).
inline cplx uniformizer_pi(cplx z, const NuttallContext &ctx)
{
    const auto &inv = ctx.inv;
    cplx acc = 0.0;
    bool zero = false;
    for (int k = 0; k < 3; ++k) {
        const cplx p = std::pow(rho, k) * nuttall_z1;
        if (std::abs(reduce_to_cell(z + p, inv.lattice).z) <= 1e-12) {
            throw PoleHit("uniformizer evaluated at a pole");
        }
        if (std::abs(reduce_to_cell(z - p, inv.lattice).z) <= inv.pole_radius) {
            zero = true;
            continue;
        }
        acc += log_sigma(z - p, inv) - log_sigma(z + p, inv);
    }
    if (zero) {
        return 0.0;
    }
    return -std::exp(acc);
}

/// pi'(z)/pi(z) = sum zeta(z - rho^k z1) - zeta(z + rho^k z1).
inline cplx uniformizer_log_derivative(cplx z, const NuttallContext &ctx)
{
    cplx acc = 0.0;
    for (int k = 0; k < 3; ++k) {
        const cplx p = std::pow(rho, k) * nuttall_z1;
        acc += zeta_w(z - p, ctx.inv) - zeta_w(z + p, ctx.inv);
    }
    return acc;
}

/// -2 pi / Gamma(1/3)^3.
inline double schwarz_christoffel_constant()
{
    const double g = std::tgamma(1.0 / 3.0);
    return -2.0 * pi / (g * g * g);
}

/// Inverse of the uniformizer on the closed unit disk: z = z1 + C1 int_0^w (1 - s^3)^(-2/3) ds.
inline cplx schwarz_christoffel_inverse(cplx w, const NuttallContext & = make_nuttall_context(0.0))
{
    if (std::abs(w) > 1.0 + 1e-12) {
        throw BranchPathCrossesSingularity("point lies outside the unit disk where the branch is defined");
    }
    for (int k = 0; k < 3; ++k) {
        if (segment_distance(std::pow(rho, k), 0.0, w) < 1e-6) {
            throw BranchPathCrossesSingularity("integration path passes a cube root of unity");
        }
    }
    if (w == cplx(0.0)) {
        return nuttall_z1;
    }
    const cplx w3 = w * w * w;
    QuadratureOptions opt;
    opt.tol = 1e-13;
    opt.max_depth = 60;
    // Integrate in s along [0, 1] with the path w * s; grade towards s = 1 where 1 - s^3 w^3 may be small.
    auto f = [&](cplx s) { return std::pow(1.0 - s * s * s * w3, -2.0 / 3.0); };
    cplx acc = 0.0;
    double lo = 0.0;
    for (double hi : {0.5, 0.75, 0.875, 0.9375, 0.96875, 0.984375, 1.0}) {
        acc += integrate_segment(f, lo, hi, opt);
        lo = hi;
    }
    return nuttall_z1 + schwarz_christoffel_constant() * w * acc;
}

/// Solves pi(z) = w by Newton iteration started from the Schwarz-Christoffel inverse.
inline cplx uniformizer_preimage(cplx w, const NuttallContext &ctx)
{
    cplx z = schwarz_christoffel_inverse(w, ctx);
    for (int it = 0; it < 50; ++it) {
        const cplx p = uniformizer_pi(z, ctx);
        const cplx f = p - w;
        if (std::abs(f) < 1e-14 * std::max(1.0, std::abs(w))) {
            break;
        }
        const cplx step = f / (p * uniformizer_log_derivative(z, ctx));
        z -= step;
        if (std::abs(step) < 1e-15) {
            break;
        }
    }
    if (std::abs(uniformizer_pi(z, ctx) - w) > 1e-9 * std::max(1.0, std::abs(w))) {
        throw NoConvergence("Newton iteration for the uniformizer preimage failed");
    }
    return z;
}

/// Context for the triangle \p tri: alpha is the preimage of z0 under the uniformizer.
inline NuttallContext nuttall_context_from_triangle(const TriangleConfig &tri)
{
    auto ctx = make_nuttall_context(0.0);
    ctx.alpha = uniformizer_preimage(tri.z0, ctx);
    return ctx;
}

namespace detail
{

inline double ln_abs_sigma(cplx z, const LatticeInvariants &inv)
{
    return log_sigma(z, inv).real();
}

inline void check_not_singular(cplx z, const NuttallContext &ctx)
{
    for (int k = 0; k < 3; ++k) {
        if (std::abs(reduce_to_cell(z - std::pow(rho, k) * ctx.alpha, ctx.inv.lattice).z) <= ctx.inv.pole_radius) {
            throw SingularPoint("u evaluated at a logarithmic singularity");
        }
    }
}

}

/// u(z) = Re(-2 ln sigma(z - alpha) + ln sigma(z - rho alpha) + ln sigma(z - rho^2 alpha)) - sqrt 3 eta1 Re(conj(alpha) z).
inline double u_value(cplx z, const NuttallContext &ctx)
{
    detail::check_not_singular(z, ctx);
    const auto &inv = ctx.inv;
    const cplx a = ctx.alpha;
    return -2.0 * detail::ln_abs_sigma(z - a, inv) + detail::ln_abs_sigma(z - rho * a, inv) +
           detail::ln_abs_sigma(z - std::conj(rho) * a, inv) -
           std::sqrt(3.0) * (inv.eta1 * std::conj(a) * z).real();
}

/// The harmonic function whose zero set is Gamma_12 (real alpha); vanishes on the real axis.
inline double g_value(cplx z, const NuttallContext &ctx)
{
    detail::check_not_singular(z, ctx);
    const auto &inv = ctx.inv;
    return detail::ln_abs_sigma(z - std::conj(rho) * ctx.alpha, inv) -
           detail::ln_abs_sigma(z - rho * ctx.alpha, inv) - (inv.eta1 * ctx.alpha).real() * z.imag();
}

/// A solution of the critical-point equation of g, reduced modulo the lattice.
struct CriticalPoint
{
    cplx z;
    int multiplicity = 1;
    /// True when some lattice translate lies on the real axis.
    bool real = false;
};

/// Solutions of zeta(z - rho^2 alpha) - zeta(z - rho alpha) + i eta1 alpha = 0 in one period cell.
/**
 * Real solutions are reported by their representative in [-alpha/2, -alpha/2 + sqrt 3).
 */
inline std::vector<CriticalPoint> critical_points(double alpha, const NuttallContext &ctx)
{
    if (!(alpha > 0.0 && alpha < std::sqrt(3.0) / 2.0)) {
        throw std::invalid_argument("alpha must lie in (0, sqrt(3)/2)");
    }
    const auto &inv = ctx.inv;
    const cplx p1 = std::conj(rho) * alpha, p2 = rho * alpha;
    const cplx target = -imag_unit * inv.eta1 * alpha;
    auto F = [&](cplx z) { return zeta_w(z - p1, inv) - zeta_w(z - p2, inv) - target; };
    auto dF = [&](cplx z) { return wp(z - p2, inv) - wp(z - p1, inv); };

    std::vector<cplx> roots;
    constexpr int grid = 12;
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            cplx z = (-0.5 + (i + 0.5) / grid) * inv.lattice.omega1 + (-0.5 + (j + 0.5) / grid) * inv.lattice.omega2;
            bool ok = false;
            try {
                for (int it = 0; it < 200; ++it) {
                    const cplx f = F(z);
                    const cplx d = dF(z);
                    if (!std::isfinite(std::abs(f)) || d == cplx(0.0)) {
                        break;
                    }
                    cplx step = f / d;
                    const double cap = 0.25 * std::abs(inv.lattice.omega1);
                    if (std::abs(step) > cap) {
                        step *= cap / std::abs(step);
                    }
                    z = reduce_to_cell(z - step, inv.lattice).z;
                    if (std::abs(step) < 1e-14) {
                        ok = true;
                        break;
                    }
                }
                ok = ok || std::abs(F(z)) < 1e-10;
                ok = ok && std::abs(F(z)) < 1e-8;
            } catch (const PoleAtLatticePoint &) {
                ok = false;
            }
            if (!ok) {
                continue;
            }
            bool dup = false;
            for (const cplx r : roots) {
                if (std::abs(reduce_to_cell(z - r, inv.lattice).z) < 1e-6) {
                    dup = true;
                    break;
                }
            }
            if (!dup) {
                roots.push_back(z);
            }
        }
    }

    const double s3 = std::sqrt(3.0);
    const double ystep = inv.lattice.omega2.imag();
    std::vector<CriticalPoint> out;
    for (cplx z : roots) {
        CriticalPoint cp;
        // Shift by multiples of omega2 so that Im z is closest to 0, then by omega1 into the window.
        const double k = std::round(z.imag() / ystep);
        z -= k * inv.lattice.omega2;
        cp.real = std::abs(z.imag()) < 1e-7;
        if (cp.real) {
            z = cplx(z.real(), 0.0);
            const double lo = -alpha / 2.0;
            z -= s3 * std::floor((z.real() - lo) / s3);
        }
        cp.z = z;
        cp.multiplicity = std::abs(dF(z)) < 1e-4 * std::max(1.0, std::abs(wp(z - p1, inv))) ? 2 : 1;
        out.push_back(cp);
    }
    std::sort(out.begin(), out.end(), [](const CriticalPoint &x, const CriticalPoint &y) {
        return x.z.real() != y.z.real() ? x.z.real() < y.z.real() : x.z.imag() < y.z.imag();
    });
    return out;
}

/// psi(alpha) = Im zeta((sqrt 3 / 2)(1 - i alpha)) - eta1 alpha / 2.
inline double psi(double alpha, const NuttallContext &ctx)
{
    const double s3 = std::sqrt(3.0);
    return zeta_w(s3 / 2.0 * cplx(1.0, -alpha), ctx.inv).imag() - ctx.inv.eta1.real() * alpha / 2.0;
}

/// The unique zero of psi in (0, sqrt 3 / 2], by bisection to 1e-12.
inline double psi_root(const NuttallContext &ctx)
{
    const double top = std::sqrt(3.0) / 2.0;
    constexpr int samples = 64;
    double lo = 0.0, hi = 0.0;
    double prev_a = top / samples, prev = psi(prev_a, ctx);
    bool found = false;
    for (int i = 2; i <= samples; ++i) {
        const double a = top * i / samples;
        const double v = psi(a, ctx);
        if (prev > 0.0 && v <= 0.0) {
            lo = prev_a;
            hi = a;
            found = true;
            break;
        }
        prev_a = a;
        prev = v;
    }
    if (!found) {
        throw NoConvergence("psi has no sign change on (0, sqrt(3)/2]");
    }
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        if (psi(mid, ctx) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}
