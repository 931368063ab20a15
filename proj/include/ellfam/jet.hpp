#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "errors.hpp"

namespace ellfam
{

using cplx = std::complex<double>;

/// Truncated Taylor expansion of an analytic germ: coeffs[j] = f^(j)(center) / j!.
struct Jet
{
    cplx center;
    std::vector<cplx> coeffs;

    std::size_t order() const noexcept
    {
        return coeffs.size() - 1;
    }
};

namespace detail
{

inline void check_compatible(const Jet &f, const Jet &g)
{
    if (f.coeffs.empty() || g.coeffs.empty()) {
        throw std::invalid_argument("jet must have at least one coefficient");
    }
    if (f.center != g.center) {
        throw std::invalid_argument("jets expanded at different centers");
    }
}

}

/// Constant germ c at \p center, truncated at order K.
inline Jet jet_constant(cplx c, cplx center, std::size_t K)
{
    Jet j{center, std::vector<cplx>(K + 1, cplx(0.0))};
    j.coeffs[0] = c;
    return j;
}

/// Germ of x - a at \p center, truncated at order K.
inline Jet jet_from_linear(cplx a, cplx center, std::size_t K)
{
    Jet j = jet_constant(center - a, center, K);
    if (K >= 1) {
        j.coeffs[1] = 1.0;
    }
    return j;
}

inline Jet jet_add(const Jet &f, const Jet &g)
{
    detail::check_compatible(f, g);
    const std::size_t K = std::min(f.order(), g.order());
    Jet r{f.center, std::vector<cplx>(K + 1)};
    for (std::size_t i = 0; i <= K; ++i) {
        r.coeffs[i] = f.coeffs[i] + g.coeffs[i];
    }
    return r;
}

inline Jet jet_scale(const Jet &f, cplx s)
{
    Jet r = f;
    for (auto &c : r.coeffs) {
        c *= s;
    }
    return r;
}

/// Cauchy product truncated at the smaller of the two orders.
inline Jet jet_mul(const Jet &f, const Jet &g)
{
    detail::check_compatible(f, g);
    const std::size_t K = std::min(f.order(), g.order());
    Jet r{f.center, std::vector<cplx>(K + 1, cplx(0.0))};
    for (std::size_t i = 0; i <= K; ++i) {
        for (std::size_t j = 0; i + j <= K; ++j) {
            r.coeffs[i + j] += f.coeffs[i] * g.coeffs[j];
        }
    }
    return r;
}

/// Quotient f/g; g must have a nonzero constant term.
inline Jet jet_div(const Jet &f, const Jet &g)
{
    detail::check_compatible(f, g);
    if (std::abs(g.coeffs[0]) <= 1e-300) {
        throw DivisionByZeroGerm("divisor germ vanishes at the expansion point");
    }
    const std::size_t K = std::min(f.order(), g.order());
    Jet r{f.center, std::vector<cplx>(K + 1)};
    for (std::size_t k = 0; k <= K; ++k) {
        cplx acc = f.coeffs[k];
        for (std::size_t j = 1; j <= k; ++j) {
            acc -= g.coeffs[j] * r.coeffs[k - j];
        }
        r.coeffs[k] = acc / g.coeffs[0];
    }
    return r;
}

/// Integer power by repeated squaring; negative powers go through jet_div.
inline Jet jet_pow_int(const Jet &f, int p)
{
    if (f.coeffs.empty()) {
        throw std::invalid_argument("jet must have at least one coefficient");
    }
    Jet result = jet_constant(1.0, f.center, f.order());
    Jet base = f;
    unsigned e = static_cast<unsigned>(p < 0 ? -static_cast<long>(p) : p);
    while (e != 0) {
        if (e & 1U) {
            result = jet_mul(result, base);
        }
        e >>= 1U;
        if (e != 0) {
            base = jet_mul(base, base);
        }
    }
    if (p < 0) {
        return jet_div(jet_constant(1.0, f.center, f.order()), result);
    }
    return result;
}

/// j-th derivative at the center, j! * coeffs[j].
inline cplx jet_deriv(const Jet &f, std::size_t j)
{
    if (j > f.order()) {
        throw std::out_of_range("derivative order exceeds jet order");
    }
    double fact = 1.0;
    for (std::size_t i = 2; i <= j; ++i) {
        fact *= static_cast<double>(i);
    }
    return fact * f.coeffs[j];
}

}
