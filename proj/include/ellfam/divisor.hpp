#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "lattice.hpp"

namespace ellfam
{

/// Elliptic function with a prescribed principal divisor, known up to a constant factor.
/**
 * Evaluates prod sigma(z - a_k) / prod sigma(z - b*_k), where b*_k = b_k except for the last
 * pole, which is shifted by the lattice vector sum(b_k - a_k) so that zeros and poles sum to the
 * same value. The multiplicative constant is left to the caller (\p normalization stays 1).
 */
class DivisorFunction
{
    public:
        DivisorFunction(std::vector<cplx> zeros, std::vector<cplx> poles, LatticeInvariants inv,
                        EvalOptions opt)
            : m_zeros(std::move(zeros)), m_poles(std::move(poles)), m_inv(std::move(inv)), m_opt(opt)
        {}

        /// log of the value; the imaginary part is defined modulo 2*pi.
        cplx log_value(cplx z) const
        {
            cplx acc = 0.0;
            for (const cplx a : m_zeros) {
                acc += log_sigma(z - a, m_inv, m_opt);
            }
            for (const cplx b : m_poles) {
                acc -= log_sigma(z - b, m_inv, m_opt);
            }
            return acc;
        }

        cplx operator()(cplx z) const
        {
            for (const cplx b : m_poles) {
                if (std::abs(reduce_to_cell(z - b, m_inv.lattice).z) <= m_inv.pole_radius) {
                    throw PoleAtLatticePoint("evaluation at a pole of the divisor function");
                }
            }
            for (const cplx a : m_zeros) {
                if (std::abs(reduce_to_cell(z - a, m_inv.lattice).z) <= m_inv.pole_radius) {
                    return 0.0;
                }
            }
            return normalization * std::exp(log_value(z));
        }

        const std::vector<cplx> &zeros() const noexcept
        {
            return m_zeros;
        }
        /// Poles after the lattice correction of the last one.
        const std::vector<cplx> &poles() const noexcept
        {
            return m_poles;
        }

        cplx normalization = 1.0;
        bool normalization_pending = true;

    private:
        std::vector<cplx> m_zeros;
        std::vector<cplx> m_poles;
        LatticeInvariants m_inv;
        EvalOptions m_opt;
};

/// Builds the elliptic function with zeros \p zeros and poles \p poles (with multiplicity).
inline DivisorFunction elliptic_from_divisor(const std::vector<cplx> &zeros, std::vector<cplx> poles,
                                             const LatticeInvariants &inv, const EvalOptions &opt = {})
{
    if (zeros.size() != poles.size()) {
        throw DivisorMismatch("divisor has " + std::to_string(zeros.size()) + " zeros and " +
                              std::to_string(poles.size()) + " poles");
    }
    cplx shift = 0.0;
    for (std::size_t k = 0; k < zeros.size(); ++k) {
        shift += poles[k] - zeros[k];
    }
    const auto r = reduce_to_cell(shift, inv.lattice);
    const double scale = std::max(std::abs(inv.lattice.omega1), std::abs(inv.lattice.omega2));
    if (std::abs(r.z) > opt.tol * std::max(1.0, scale)) {
        throw NotPrincipal("zeros and poles do not sum to the same point modulo the lattice");
    }
    if (!poles.empty()) {
        poles.back() -= detail::lattice_vector(inv.lattice, r.m1, r.m2);
    }
    return DivisorFunction(zeros, std::move(poles), inv, opt);
}

}
