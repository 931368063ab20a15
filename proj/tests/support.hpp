#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include <ellfam/ellfam.hpp>

namespace testing_support
{

using ellfam::cplx;

inline std::mt19937_64 &rng()
{
    static std::mt19937_64 gen(20261016);
    return gen;
}

inline double uniform(double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline cplx random_disk(double r)
{
    return std::polar(std::sqrt(uniform(0.0, 1.0)) * r, uniform(0.0, 2.0 * ellfam::pi));
}

// Lattice with 0.2 < |tau| < 5 and Im tau > 0.05, random scale and rotation.
inline ellfam::Lattice random_lattice()
{
    cplx tau;
    do {
        tau = std::polar(std::exp(uniform(std::log(0.2), std::log(5.0))), uniform(0.0, ellfam::pi));
    } while (!(tau.imag() > 0.05));
    const cplx w1 = std::polar(uniform(0.5, 2.0), uniform(-ellfam::pi, ellfam::pi));
    return ellfam::make_lattice(w1, w1 * tau);
}

// Moderately shaped lattice for tests that sample many points.
inline ellfam::Lattice random_tame_lattice()
{
    cplx tau;
    do {
        tau = cplx(uniform(-0.5, 0.5), uniform(0.6, 2.0));
    } while (std::abs(tau) < 0.8);
    const cplx w1 = std::polar(uniform(0.7, 1.5), uniform(-ellfam::pi, ellfam::pi));
    return ellfam::make_lattice(w1, w1 * tau);
}

inline double min_period(const ellfam::Lattice &lat)
{
    return std::min({std::abs(lat.omega1), std::abs(lat.omega2), std::abs(lat.omega1 + lat.omega2),
                     std::abs(lat.omega1 - lat.omega2)});
}

// Point of the centred cell with |z| >= rmin.
inline cplx random_cell_point(const ellfam::Lattice &lat, double rmin = 0.0)
{
    while (true) {
        const cplx z = uniform(-0.5, 0.5) * lat.omega1 + uniform(-0.5, 0.5) * lat.omega2;
        if (std::abs(z) >= rmin) {
            return z;
        }
    }
}

inline double rel_err(cplx a, cplx b)
{
    return std::abs(a - b) / std::max(1.0, std::abs(b));
}

}

#define EXPECT_CNEAR(a, b, tol) EXPECT_LE(std::abs(cplx(a) - cplx(b)), (tol)) << #a " = " << (a) << ", " #b " = " << (b)
