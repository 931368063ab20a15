#include "support.hpp"

using namespace ellfam;
using namespace testing_support;

namespace
{

enum class Fn { zeta, lnsigma, wp };

cplx value(Fn fn, cplx z, const LatticeInvariants &inv)
{
    switch (fn) {
    case Fn::zeta: return zeta_w(z, inv);
    case Fn::wp: return wp(z, inv);
    default: return log_sigma(z, inv);
    }
}

cplx analytic(Fn fn, cplx z, const LatticeInvariants &inv, int which)
{
    switch (fn) {
    case Fn::zeta: return dzeta_domega(z, inv, which);
    case Fn::wp: return dwp_domega(z, inv, which);
    default: return dlnsigma_domega(z, inv, which);
    }
}

// Central difference in omega_which with z held fixed.
cplx finite_difference(Fn fn, cplx z, const Lattice &lat, int which, double h)
{
    const cplx d1 = which == 1 ? h : 0.0, d2 = which == 2 ? h : 0.0;
    const auto plus = invariants({lat.omega1 + d1, lat.omega2 + d2});
    const auto minus = invariants({lat.omega1 - d1, lat.omega2 - d2});
    if (fn == Fn::lnsigma) {
        return std::log(sigma(z, plus) / sigma(z, minus)) / (2.0 * h);
    }
    return (value(fn, z, plus) - value(fn, z, minus)) / (2.0 * h);
}

double relative(cplx a, cplx b)
{
    return std::abs(a - b) / std::max(std::abs(b), 1e-2);
}

struct Sample
{
    Lattice lat;
    cplx z;
};

std::vector<Sample> samples(int count)
{
    std::vector<Sample> out;
    for (int k = 0; k < count; ++k) {
        const auto lat = random_tame_lattice();
        out.push_back({lat, random_cell_point(lat, 0.2 * min_period(lat))});
    }
    return out;
}

}

TEST(PeriodDerivatives, MatchFiniteDifferences)
{
    for (const auto &s : samples(10)) {
        const auto inv = invariants(s.lat);
        for (Fn fn : {Fn::zeta, Fn::lnsigma, Fn::wp}) {
            for (int which : {1, 2}) {
                const cplx fd = finite_difference(fn, s.z, s.lat, which, 1e-5);
                EXPECT_LT(relative(fd, analytic(fn, s.z, inv, which)), 1e-6)
                    << "function " << static_cast<int>(fn) << " omega" << which << " z = " << s.z;
            }
        }
    }
}

TEST(PeriodDerivatives, FiniteDifferenceErrorShrinksWithStep)
{
    for (const auto &s : samples(5)) {
        const auto inv = invariants(s.lat);
        for (Fn fn : {Fn::zeta, Fn::lnsigma, Fn::wp}) {
            const cplx exact = analytic(fn, s.z, inv, 2);
            const double e4 = relative(finite_difference(fn, s.z, s.lat, 2, 1e-4), exact);
            const double e5 = relative(finite_difference(fn, s.z, s.lat, 2, 1e-5), exact);
            const double e6 = relative(finite_difference(fn, s.z, s.lat, 2, 1e-6), exact);
            EXPECT_LT(e4, 1e-6);
            EXPECT_LT(e5, 1e-6);
            EXPECT_LT(e6, 1e-6);
            // Truncation error is quadratic in the step while it dominates rounding.
            const double e2 = relative(finite_difference(fn, s.z, s.lat, 2, 1e-2), exact);
            const double e3 = relative(finite_difference(fn, s.z, s.lat, 2, 1e-3), exact);
            EXPECT_LT(e3, 0.05 * e2) << e2 << " " << e3;
        }
    }
}

TEST(PeriodDerivatives, EulerHomogeneityRelations)
{
    for (const auto &s : samples(50)) {
        const auto inv = invariants(s.lat);
        const cplx w1 = s.lat.omega1, w2 = s.lat.omega2, z = s.z;
        const cplx rz = z * (-wp(z, inv)) + w1 * dzeta_domega(z, inv, 1) + w2 * dzeta_domega(z, inv, 2);
        EXPECT_LT(std::abs(rz + zeta_w(z, inv)), 1e-8);
        const cplx rs = z * zeta_w(z, inv) + w1 * dlnsigma_domega(z, inv, 1) + w2 * dlnsigma_domega(z, inv, 2);
        EXPECT_LT(std::abs(rs - 1.0), 1e-8);
        const cplx rp = z * wp_prime(z, inv) + w1 * dwp_domega(z, inv, 1) + w2 * dwp_domega(z, inv, 2);
        EXPECT_LT(std::abs(rp + 2.0 * wp(z, inv)), 1e-8);
    }
}

TEST(PeriodDerivatives, Parity)
{
    for (const auto &s : samples(10)) {
        const auto inv = invariants(s.lat);
        for (int which : {1, 2}) {
            EXPECT_LT(std::abs(dzeta_domega(-s.z, inv, which) + dzeta_domega(s.z, inv, which)), 1e-9);
            EXPECT_LT(std::abs(dlnsigma_domega(-s.z, inv, which) - dlnsigma_domega(s.z, inv, which)), 1e-9);
        }
    }
}

TEST(PeriodDerivatives, ZDerivativeOfZetaRateIsMinusWpRate)
{
    const double h = 1e-5;
    for (const auto &s : samples(10)) {
        const auto inv = invariants(s.lat);
        for (int which : {1, 2}) {
            const cplx fd = (dzeta_domega(s.z + h, inv, which) - dzeta_domega(s.z - h, inv, which)) / (2.0 * h);
            EXPECT_LT(relative(fd, -dwp_domega(s.z, inv, which)), 1e-6);
        }
    }
}

TEST(PeriodDerivatives, RejectsBadIndex)
{
    const auto inv = invariants(make_lattice(1.0, imag_unit));
    EXPECT_THROW(dwp_domega(0.3, inv, 3), std::invalid_argument);
}
