#include "support.hpp"

using namespace ellfam;
using namespace testing_support;

TEST(Quadrature, GaussLegendreIntegratesPolynomialsExactly)
{
    const auto rule = gauss_legendre(8);
    for (int p = 0; p <= 15; ++p) {
        double acc = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            acc += rule.weights[i] * std::pow(rule.nodes[i], p);
        }
        const double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
        EXPECT_NEAR(acc, exact, 1e-14) << "degree " << p;
    }
}

TEST(Quadrature, SegmentOfEntireFunction)
{
    auto f = [](cplx z) { return std::exp(z); };
    const cplx a(0.3, -1.0), b(-2.0, 4.0);
    EXPECT_CNEAR(integrate_segment(f, a, b), std::exp(b) - std::exp(a), 1e-12);
}

TEST(Quadrature, ClosedLoopAroundSimplePole)
{
    auto f = [](cplx z) { return 1.0 / (z - cplx(0.1, 0.2)); };
    const std::vector<cplx> square{cplx(-1, -1), cplx(1, -1), cplx(1, 1), cplx(-1, 1), cplx(-1, -1)};
    EXPECT_CNEAR(integrate_polyline(f, square), 2.0 * pi * imag_unit, 1e-10);
}

TEST(Quadrature, RoutedPolylineKeepsClearance)
{
    const std::vector<cplx> obstacles{0.0, cplx(0.5, 0.01), cplx(-0.4, -0.02)};
    const double clearance = 0.1;
    const auto poly = route_polyline(cplx(-2.0, 0.0), cplx(2.0, 0.0), obstacles, clearance);
    EXPECT_EQ(poly.front(), cplx(-2.0, 0.0));
    EXPECT_EQ(poly.back(), cplx(2.0, 0.0));
    for (std::size_t i = 1; i < poly.size(); ++i) {
        for (const cplx p : obstacles) {
            EXPECT_GE(segment_distance(p, poly[i - 1], poly[i]), clearance);
        }
    }
    // The detour does not change the integral of a function analytic off the obstacles' small discs.
    auto f = [](cplx z) { return std::sin(z) * z; };
    EXPECT_CNEAR(integrate_polyline(f, poly), integrate_segment(f, cplx(-2.0, 0.0), cplx(2.0, 0.0)), 1e-10);
}

TEST(Quadrature, BlockedRouteThrows)
{
    std::vector<cplx> wall;
    for (int k = -40; k <= 40; ++k) {
        wall.push_back(cplx(0.0, 0.05 * k));
    }
    EXPECT_THROW(route_polyline(cplx(-1.0, 0.0), cplx(1.0, 0.0), wall, 0.1, 3), ContourBlocked);
}
