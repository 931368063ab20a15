#pragma once

#include <complex>
#include <stdexcept>

#include "errors.hpp"
#include "lattice.hpp"

namespace ellfam
{

namespace detail
{

struct PointValues
{
    cplx wp;
    cplx wp_prime;
    cplx zeta;
};

inline PointValues point_values(cplx z, const LatticeInvariants &inv, const EvalOptions &opt)
{
    return {wp(z, inv, opt), wp_prime(z, inv, opt), zeta_w(z, inv, opt)};
}

inline void check_which(int which)
{
    if (which != 1 && which != 2) {
        throw std::invalid_argument("period index must be 1 or 2");
    }
}

}

/// Partial derivative of zeta(z; omega1, omega2) with respect to omega_which at fixed z.
inline cplx dzeta_domega(cplx z, const LatticeInvariants &inv, int which, const EvalOptions &opt = {})
{
    detail::check_which(which);
    const auto v = detail::point_values(z, inv, opt);
    // The derivative in omega1 is built from (omega2, eta2) and vice versa.
    const cplx w = which == 1 ? inv.lattice.omega2 : inv.lattice.omega1;
    const cplx eta = which == 1 ? inv.eta2 : inv.eta1;
    const cplx bracket = 0.5 * w * v.wp_prime + (w * v.zeta - eta * z) * v.wp + eta * v.zeta -
                         w * inv.g2 / 12.0 * z;
    const cplx sign = which == 1 ? 1.0 : -1.0;
    return sign * bracket / (2.0 * pi * imag_unit);
}

/// Partial derivative of ln sigma(z; omega1, omega2) with respect to omega_which at fixed z.
inline cplx dlnsigma_domega(cplx z, const LatticeInvariants &inv, int which,
                            const EvalOptions &opt = {})
{
    detail::check_which(which);
    const auto v = detail::point_values(z, inv, opt);
    const cplx w = which == 1 ? inv.lattice.omega2 : inv.lattice.omega1;
    const cplx eta = which == 1 ? inv.eta2 : inv.eta1;
    const cplx z2term = w * inv.g2 / 24.0 * z * z;
    const cplx bracket = 0.5 * w * (v.wp - v.zeta * v.zeta) + eta * (z * v.zeta - 1.0) - z2term;
    const cplx sign = which == 1 ? 1.0 : -1.0;
    return sign * bracket / (2.0 * pi * imag_unit);
}

/// Partial derivative of wp(z; omega1, omega2) with respect to omega_which at fixed z.
inline cplx dwp_domega(cplx z, const LatticeInvariants &inv, int which, const EvalOptions &opt = {})
{
    detail::check_which(which);
    const auto v = detail::point_values(z, inv, opt);
    const cplx w = which == 1 ? inv.lattice.omega2 : inv.lattice.omega1;
    const cplx eta = which == 1 ? inv.eta2 : inv.eta1;
    const cplx bracket = 2.0 * w * v.wp * v.wp - 2.0 * eta * v.wp + (w * v.zeta - eta * z) * v.wp_prime -
                         w * inv.g2 / 3.0;
    const cplx sign = which == 1 ? -1.0 : 1.0;
    return sign * bracket / (2.0 * pi * imag_unit);
}

}
