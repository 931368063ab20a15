#include "support.hpp"

using namespace ellfam;
using namespace testing_support;

namespace
{

const Lattice hex = make_lattice(std::sqrt(3.0), std::sqrt(3.0) * std::polar(1.0, pi / 3.0));
const Lattice square = make_lattice(1.0, imag_unit);

}

TEST(MakeLattice, KeepsPositivelyOrientedBasis)
{
    const auto lat = make_lattice(std::sqrt(3.0), std::sqrt(3.0) * std::polar(1.0, pi / 3.0));
    EXPECT_EQ(lat.omega1, cplx(std::sqrt(3.0)));
    EXPECT_EQ(lat.omega2, std::sqrt(3.0) * std::polar(1.0, pi / 3.0));
}

TEST(MakeLattice, FlipsNegativelyOrientedSecondPeriod)
{
    const auto lat = make_lattice(1.0, -imag_unit);
    EXPECT_EQ(lat.omega2, imag_unit);
}

TEST(MakeLattice, RejectsRealRatio)
{
    EXPECT_THROW(make_lattice(1.0, 2.0), CollinearPeriods);
    EXPECT_THROW(make_lattice(0.0, imag_unit), CollinearPeriods);
}

TEST(Invariants, HexagonalEtaValues)
{
    const auto inv = invariants(hex);
    EXPECT_CNEAR(inv.eta1, 2.0 * pi / 3.0, 1e-10);
    EXPECT_CNEAR(inv.eta2, 2.0 * pi / 3.0 * std::polar(1.0, -pi / 3.0), 1e-10);
}

TEST(Invariants, HexagonalG2VanishesSquareG3Vanishes)
{
    EXPECT_LT(std::abs(invariants(hex).g2), 1e-10);
    EXPECT_LT(std::abs(invariants(square).g3), 1e-10);
}

TEST(Invariants, SquareLatticeReferenceValues)
{
    // g2(1, i) = Gamma(1/4)^8 / (16 pi^2), e1 = sqrt(g2) / 2.
    const double g = std::tgamma(0.25);
    const double g2 = std::pow(g, 8) / (16.0 * pi * pi);
    const auto inv = invariants(square);
    EXPECT_NEAR(inv.g2.real(), g2, 1e-9 * g2);
    EXPECT_NEAR(inv.e1.real(), std::sqrt(g2) / 2.0, 1e-9);
    EXPECT_CNEAR(inv.e1 + inv.e2 + inv.e3, 0.0, 1e-10);
}

TEST(Invariants, LegendreRelationOnRandomLattices)
{
    for (int k = 0; k < 20; ++k) {
        const auto inv = invariants(random_lattice());
        const cplx r = inv.eta1 * inv.lattice.omega2 - inv.eta2 * inv.lattice.omega1 - 2.0 * pi * imag_unit;
        EXPECT_LT(std::abs(r), 1e-10) << "lattice " << inv.lattice.omega1 << ", " << inv.lattice.omega2;
    }
}

TEST(Invariants, RejectsUnreachableTolerance)
{
    EXPECT_THROW(invariants(make_lattice(1.0, cplx(0.0, 1e-6))), ToleranceUnreachable);
    EXPECT_THROW(invariants(square, 0.0), ToleranceUnreachable);
}

TEST(ReduceToCell, OriginAndPeriod)
{
    auto r = reduce_to_cell(0.0, square);
    EXPECT_EQ(r.z, cplx(0.0));
    EXPECT_EQ(r.m1, 0);
    EXPECT_EQ(r.m2, 0);
    r = reduce_to_cell(square.omega1, square);
    EXPECT_LT(std::abs(r.z), 1e-15);
    EXPECT_EQ(r.m1, 1);
    EXPECT_EQ(r.m2, 0);
}

TEST(ReduceToCell, ReconstructsAndSelectsUniqueTranslate)
{
    for (int k = 0; k < 200; ++k) {
        const auto lat = random_lattice();
        const cplx z = random_disk(6.0 * std::abs(lat.omega1));
        const auto r = reduce_to_cell(z, lat);
        const cplx back = r.z + static_cast<double>(r.m1) * lat.omega1 + static_cast<double>(r.m2) * lat.omega2;
        EXPECT_LT(std::abs(z - back), 1e-12 * std::max(1.0, std::abs(z)));
        const auto [x, y] = basis_coordinates(r.z, lat);
        EXPECT_GE(x, -0.5);
        EXPECT_LT(x, 0.5);
        EXPECT_GE(y, -0.5);
        EXPECT_LT(y, 0.5);
        int inside = 0;
        for (int a = -3; a <= 3; ++a) {
            for (int b = -3; b <= 3; ++b) {
                const auto [u, v] = basis_coordinates(r.z + static_cast<double>(a) * lat.omega1 +
                                                          static_cast<double>(b) * lat.omega2,
                                                      lat);
                inside += (u >= -0.5 && u < 0.5 && v >= -0.5 && v < 0.5) ? 1 : 0;
            }
        }
        EXPECT_EQ(inside, 1);
    }
}

TEST(Wp, HalfPeriodValues)
{
    for (int k = 0; k < 5; ++k) {
        const auto inv = invariants(random_tame_lattice());
        const auto &lat = inv.lattice;
        EXPECT_LT(rel_err(wp(lat.omega1 / 2.0, inv), inv.e1), 1e-10);
        EXPECT_LT(rel_err(wp(lat.omega2 / 2.0, inv), inv.e2), 1e-10);
        EXPECT_LT(rel_err(wp((lat.omega1 + lat.omega2) / 2.0, inv), inv.e3), 1e-10);
    }
}

TEST(Wp, Parity)
{
    for (int k = 0; k < 5; ++k) {
        const auto inv = invariants(random_tame_lattice());
        for (int i = 0; i < 20; ++i) {
            const cplx z = random_cell_point(inv.lattice, 0.05);
            EXPECT_LT(rel_err(wp(-z, inv), wp(z, inv)), 1e-10);
            EXPECT_LT(rel_err(wp_prime(-z, inv), -wp_prime(z, inv)), 1e-10);
            EXPECT_LT(rel_err(zeta_w(-z, inv), -zeta_w(z, inv)), 1e-10);
            EXPECT_LT(rel_err(sigma(-z, inv), -sigma(z, inv)), 1e-10);
        }
    }
}

TEST(Wp, DifferentialEquationResidual)
{
    for (int k = 0; k < 5; ++k) {
        const auto inv = invariants(random_tame_lattice());
        const double rmin = 0.25 * min_period(inv.lattice);
        for (int i = 0; i < 100; ++i) {
            const cplx z = random_cell_point(inv.lattice, rmin);
            const cplx p = wp(z, inv), dp = wp_prime(z, inv);
            EXPECT_LT(std::abs(dp * dp - 4.0 * p * p * p + inv.g2 * p + inv.g3), 1e-9) << "z = " << z;
        }
    }
}

TEST(Wp, SquareLatticePointWithValueTwo)
{
    const auto inv = invariants(square);
    EXPECT_CNEAR(wp(cplx(0.5, 0.292496), inv), 2.0, 1e-5);
}

TEST(Wp, Homogeneity)
{
    for (int k = 0; k < 10; ++k) {
        const auto lat = random_tame_lattice();
        const cplx s = std::polar(uniform(0.5, 2.0), uniform(-pi, pi));
        const auto inv = invariants(lat);
        const auto inv_s = invariants(make_lattice(s * lat.omega1, s * lat.omega2));
        const cplx z = random_cell_point(lat, 0.1);
        EXPECT_LT(rel_err(wp(s * z, inv_s), wp(z, inv) / (s * s)), 1e-9);
    }
}

TEST(Wp, PoleRaises)
{
    const auto inv = invariants(square);
    EXPECT_THROW(wp(0.0, inv), PoleAtLatticePoint);
    EXPECT_THROW(wp(cplx(1.0, 1.0), inv), PoleAtLatticePoint);
    EXPECT_THROW(zeta_w(imag_unit, inv), PoleAtLatticePoint);
}

TEST(Wp, RejectsTolTighterThanInvariants)
{
    const auto inv = invariants(square, 1e-10);
    EvalOptions opt;
    opt.tol = 1e-12;
    EXPECT_THROW(wp(0.3, inv, opt), ToleranceUnreachable);
}

TEST(Zeta, QuasiPeriodicity)
{
    for (int k = 0; k < 5; ++k) {
        const auto inv = invariants(random_tame_lattice());
        for (int i = 0; i < 10; ++i) {
            const cplx z = random_cell_point(inv.lattice, 0.05);
            EXPECT_CNEAR(zeta_w(z + inv.lattice.omega1, inv) - zeta_w(z, inv), inv.eta1, 1e-10);
            EXPECT_CNEAR(zeta_w(z + inv.lattice.omega2, inv) - zeta_w(z, inv), inv.eta2, 1e-10);
        }
    }
}

TEST(Zeta, HalfPeriodAdditivity)
{
    const auto inv = invariants(random_tame_lattice());
    const auto &lat = inv.lattice;
    EXPECT_CNEAR(zeta_w((lat.omega1 + lat.omega2) / 2.0, inv),
                 zeta_w(lat.omega1 / 2.0, inv) + zeta_w(lat.omega2 / 2.0, inv), 1e-10);
}

TEST(Zeta, DerivativeIsMinusWp)
{
    const double h = 1e-5;
    for (int k = 0; k < 5; ++k) {
        const auto inv = invariants(random_tame_lattice());
        for (int i = 0; i < 10; ++i) {
            const cplx z = random_cell_point(inv.lattice, 0.2);
            const cplx fd = (zeta_w(z + h, inv) - zeta_w(z - h, inv)) / (2.0 * h);
            EXPECT_LT(rel_err(fd, -wp(z, inv)), 1e-6);
        }
    }
}

TEST(Sigma, NormalizedAtOrigin)
{
    const auto inv = invariants(random_tame_lattice());
    EXPECT_LT(std::abs(sigma(1e-6, inv) / 1e-6 - 1.0), 1e-9);
}

TEST(Sigma, QuasiPeriodicity)
{
    for (int k = 0; k < 5; ++k) {
        const auto inv = invariants(random_tame_lattice());
        for (int i = 0; i < 10; ++i) {
            const cplx z = random_cell_point(inv.lattice, 0.05);
            const cplx s = sigma(z, inv);
            const cplx s1 = sigma(z + inv.lattice.omega1, inv);
            const cplx s2 = sigma(z + inv.lattice.omega2, inv);
            EXPECT_LE(std::abs(s1 + s * std::exp(inv.eta1 * (z + inv.lattice.omega1 / 2.0))), 1e-9 * std::abs(s1));
            EXPECT_LE(std::abs(s2 + s * std::exp(inv.eta2 * (z + inv.lattice.omega2 / 2.0))), 1e-9 * std::abs(s2));
        }
    }
}

TEST(Sigma, LogDerivativeIsZeta)
{
    const double h = 1e-5;
    for (int k = 0; k < 5; ++k) {
        const auto inv = invariants(random_tame_lattice());
        for (int i = 0; i < 10; ++i) {
            const cplx z = random_cell_point(inv.lattice, 0.2);
            for (const cplx step : {cplx(h), cplx(0.0, h)}) {
                const cplx fd = (log_sigma(z + step, inv) - log_sigma(z - step, inv)) / (2.0 * step);
                EXPECT_LT(rel_err(fd, zeta_w(z, inv)), 1e-6);
            }
        }
    }
}

TEST(WpInverse, HalfPeriod)
{
    const auto inv = invariants(random_tame_lattice());
    const cplx z = wp_inverse(inv.e1, inv);
    const cplx d1 = reduce_to_cell(z - inv.lattice.omega1 / 2.0, inv.lattice).z;
    EXPECT_LT(std::abs(d1), 1e-6);
}

TEST(WpInverse, SquareLatticeValueTwo)
{
    const auto inv = invariants(square);
    const cplx z = wp_inverse(2.0, inv);
    const cplx ref(0.5, 0.292496);
    const double d = std::min(std::abs(reduce_to_cell(z - ref, inv.lattice).z),
                              std::abs(reduce_to_cell(z + ref, inv.lattice).z));
    EXPECT_LT(d, 1e-6);
}

TEST(WpInverse, SolutionsPairUpToLatticePoint)
{
    const auto inv = invariants(random_tame_lattice());
    for (int k = 0; k < 20; ++k) {
        const cplx w = random_disk(10.0);
        const cplx z = wp_inverse(w, inv);
        EXPECT_LT(std::abs(wp(z, inv) - w), 1e-9 * std::max(1.0, std::abs(w)));
        // Newton from many seeds finds no solution other than z and -z modulo the lattice.
        std::vector<cplx> roots;
        for (int s = 0; s < 16; ++s) {
            cplx x = random_cell_point(inv.lattice, 0.1);
            for (int it = 0; it < 60; ++it) {
                x = reduce_to_cell(x - (wp(x, inv) - w) / wp_prime(x, inv), inv.lattice).z;
            }
            if (std::abs(wp(x, inv) - w) < 1e-9 * std::max(1.0, std::abs(w))) {
                roots.push_back(x);
            }
        }
        for (const cplx x : roots) {
            const double dp = std::abs(reduce_to_cell(x - z, inv.lattice).z);
            const double dm = std::abs(reduce_to_cell(x + z, inv.lattice).z);
            EXPECT_LT(std::min(dp, dm), 1e-7);
        }
        EXPECT_LT(std::abs(reduce_to_cell(z + (-z), inv.lattice).z), 1e-12);
    }
}

TEST(ResidueTheorem, BoundaryIntegralOfEllipticFunctionVanishes)
{
    for (int k = 0; k < 3; ++k) {
        const auto inv = invariants(random_tame_lattice());
        const auto &lat = inv.lattice;
        const cplx a = 0.1 * lat.omega1 + 0.2 * lat.omega2;
        const cplx b = -0.15 * lat.omega1 + 0.05 * lat.omega2;
        auto f = [&](cplx z) { return zeta_w(z - a, inv) - zeta_w(z - b, inv); };
        const cplx c0 = -0.5 * lat.omega1 - 0.5 * lat.omega2 + 0.013 * (lat.omega1 + lat.omega2);
        const std::vector<cplx> box{c0, c0 + lat.omega1, c0 + lat.omega1 + lat.omega2, c0 + lat.omega2, c0};
        QuadratureOptions opt;
        opt.tol = 1e-13;
        EXPECT_LT(std::abs(integrate_polyline(f, box, opt)), 1e-8);
    }
}
