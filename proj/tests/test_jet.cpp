#include "support.hpp"

using namespace ellfam;
using namespace testing_support;

namespace
{

Jet random_jet(cplx center, std::size_t K, bool invertible = false)
{
    Jet j{center, std::vector<cplx>(K + 1)};
    for (auto &c : j.coeffs) {
        c = random_disk(1.0);
    }
    if (invertible) {
        j.coeffs[0] += 2.0;
    }
    return j;
}

double max_rel_diff(const Jet &f, const Jet &g)
{
    double scale = 1.0, diff = 0.0;
    for (std::size_t k = 0; k < f.coeffs.size(); ++k) {
        scale = std::max(scale, std::abs(g.coeffs[k]));
        diff = std::max(diff, std::abs(f.coeffs[k] - g.coeffs[k]));
    }
    return diff / scale;
}

}

TEST(Jet, SquareOfLinear)
{
    const Jet f = jet_add(jet_constant(1.0, 0.0, 4), jet_from_linear(0.0, 0.0, 4));
    const Jet sq = jet_mul(f, f);
    const std::vector<cplx> expect{1.0, 2.0, 1.0, 0.0, 0.0};
    ASSERT_EQ(sq.coeffs.size(), expect.size());
    for (std::size_t k = 0; k < expect.size(); ++k) {
        EXPECT_CNEAR(sq.coeffs[k], expect[k], 1e-15);
    }
}

TEST(Jet, GeometricSeries)
{
    const Jet one_minus_x = jet_scale(jet_from_linear(1.0, 0.0, 3), -1.0);
    const Jet r = jet_div(jet_constant(1.0, 0.0, 3), one_minus_x);
    for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_CNEAR(r.coeffs[k], 1.0, 1e-15);
    }
}

TEST(Jet, RationalExpressionMatchesSymbolicDerivatives)
{
    // (x - b)^4 / (x - a)^2 at x0 = 1 with a = -1, b = 0: derivatives 1/4, 3/4, 11/8, 3/4.
    const Jet num = jet_pow_int(jet_from_linear(0.0, 1.0, 3), 4);
    const Jet den = jet_pow_int(jet_from_linear(-1.0, 1.0, 3), 2);
    const Jet f = jet_div(num, den);
    const std::vector<double> expect{0.25, 0.75, 11.0 / 8.0, 0.75};
    for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_CNEAR(jet_deriv(f, k), expect[k], 1e-14);
    }
    const Jet g = jet_mul(num, jet_pow_int(jet_from_linear(-1.0, 1.0, 3), -2));
    EXPECT_LT(max_rel_diff(g, f), 1e-14);
}

TEST(Jet, AlgebraicLaws)
{
    for (int trial = 0; trial < 50; ++trial) {
        const cplx c = random_disk(2.0);
        const std::size_t K = 12;
        const Jet f = random_jet(c, K), g = random_jet(c, K), h = random_jet(c, K);
        EXPECT_LT(max_rel_diff(jet_mul(jet_mul(f, g), h), jet_mul(f, jet_mul(g, h))), 1e-12);
        EXPECT_LT(max_rel_diff(jet_add(jet_add(f, g), h), jet_add(f, jet_add(g, h))), 1e-12);
        EXPECT_LT(max_rel_diff(jet_mul(f, jet_add(g, h)), jet_add(jet_mul(f, g), jet_mul(f, h))), 1e-12);
        EXPECT_LT(max_rel_diff(jet_mul(f, g), jet_mul(g, f)), 1e-12);
        const Jet inv = random_jet(c, K, true);
        EXPECT_LT(max_rel_diff(jet_mul(jet_div(f, inv), inv), f), 1e-12);
    }
}

TEST(Jet, Errors)
{
    const Jet x = jet_from_linear(0.0, 0.0, 3);
    EXPECT_THROW(jet_div(jet_constant(1.0, 0.0, 3), x), DivisionByZeroGerm);
    EXPECT_THROW(jet_add(x, jet_constant(1.0, 1.0, 3)), std::invalid_argument);
    EXPECT_THROW(jet_deriv(x, 4), std::out_of_range);
}
