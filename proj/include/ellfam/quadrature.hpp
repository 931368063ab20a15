#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"

namespace ellfam
{

using cplx = std::complex<double>;

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule
{
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Computes an n-point Gauss-Legendre rule by Newton iteration on P_n.
inline GaussLegendreRule gauss_legendre(std::size_t n)
{
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double dn = static_cast<double>(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (dn + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double dk = static_cast<double>(k);
                const double p2 = ((2.0 * dk - 1.0) * x * p1 - (dk - 1.0) * p0) / dk;
                p0 = p1;
                p1 = p2;
            }
            dp = dn * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

/// Shared 32-point rule.
inline const GaussLegendreRule &gauss_legendre_32()
{
    static const GaussLegendreRule rule = gauss_legendre(32);
    return rule;
}

/// Options for adaptive segment quadrature.
struct QuadratureOptions
{
    double tol = 1e-10;
    int max_depth = 40;
};

namespace detail
{

template <typename F>
cplx gl_segment(F &&f, cplx a, cplx b)
{
    const auto &rule = gauss_legendre_32();
    const cplx mid = 0.5 * (a + b), half = 0.5 * (b - a);
    cplx acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        acc += rule.weights[i] * f(mid + rule.nodes[i] * half);
    }
    return acc * half;
}

template <typename F>
cplx adaptive_segment(F &&f, cplx a, cplx b, cplx whole, const QuadratureOptions &opt, int depth)
{
    const cplx m = 0.5 * (a + b);
    const cplx left = gl_segment(f, a, m), right = gl_segment(f, m, b);
    const cplx split = left + right;
    if (std::abs(split - whole) <= opt.tol * std::max(1.0, std::abs(split))) {
        return split;
    }
    if (depth >= opt.max_depth) {
        throw NoConvergence("adaptive quadrature did not converge");
    }
    return adaptive_segment(f, a, m, left, opt, depth + 1) + adaptive_segment(f, m, b, right, opt, depth + 1);
}

}

/// Integral of f along the straight segment from a to b by adaptive 32-point Gauss-Legendre.
template <typename F>
cplx integrate_segment(F &&f, cplx a, cplx b, const QuadratureOptions &opt = {})
{
    if (a == b) {
        return 0.0;
    }
    return detail::adaptive_segment(f, a, b, detail::gl_segment(f, a, b), opt, 0);
}

/// Integral of f along the polyline through \p points.
template <typename F>
cplx integrate_polyline(F &&f, const std::vector<cplx> &points, const QuadratureOptions &opt = {})
{
    cplx acc = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        acc += integrate_segment(f, points[i - 1], points[i], opt);
    }
    return acc;
}

/// Distance from p to the segment [a, b].
inline double segment_distance(cplx p, cplx a, cplx b)
{
    const cplx d = b - a;
    const double len2 = std::norm(d);
    if (len2 == 0.0) {
        return std::abs(p - a);
    }
    double s = ((p - a) * std::conj(d)).real() / len2;
    s = std::clamp(s, 0.0, 1.0);
    return std::abs(p - (a + s * d));
}

/// Builds a polyline from \p from to \p to keeping at least \p clearance from every obstacle.
/**
 * Segments passing too close to an obstacle are split by a waypoint displaced perpendicular to
 * the segment, on the side away from the obstacle. Endpoints themselves are exempt.
 */
inline std::vector<cplx> route_polyline(cplx from, cplx to, const std::vector<cplx> &obstacles,
                                        double clearance, int max_depth = 8)
{
    struct Router
    {
        const std::vector<cplx> &obs;
        double clearance;
        int max_depth;
        std::vector<cplx> out;

        bool blocked_by(cplx a, cplx b, cplx &hit) const
        {
            double best = clearance;
            bool found = false;
            for (const cplx p : obs) {
                if (std::abs(p - a) < 1e-300 || std::abs(p - b) < 1e-300) {
                    continue;
                }
                const double d = segment_distance(p, a, b);
                if (d < best) {
                    best = d;
                    hit = p;
                    found = true;
                }
            }
            return found;
        }

        bool near_obstacle(cplx q) const
        {
            for (const cplx p : obs) {
                if (std::abs(p - q) < clearance) {
                    return true;
                }
            }
            return false;
        }

        bool route(cplx a, cplx b, int depth)
        {
            cplx hit;
            if (!blocked_by(a, b, hit)) {
                out.push_back(b);
                return true;
            }
            if (depth >= max_depth) {
                return false;
            }
            const cplx d = b - a;
            const double len = std::abs(d);
            if (len == 0.0) {
                return false;
            }
            const cplx normal = d * cplx(0.0, 1.0) / len;
            const double s = std::clamp(((hit - a) * std::conj(d)).real() / (len * len), 0.0, 1.0);
            const cplx foot = a + s * d;
            double side = ((foot - hit) * std::conj(normal)).real() >= 0.0 ? 1.0 : -1.0;
            for (int attempt = 0; attempt < 2; ++attempt, side = -side) {
                for (double k : {2.0, 3.0, 4.5}) {
                    const cplx wpnt = hit + side * k * clearance * normal;
                    if (near_obstacle(wpnt)) {
                        continue;
                    }
                    const std::size_t mark = out.size();
                    if (route(a, wpnt, depth + 1) && route(wpnt, b, depth + 1)) {
                        return true;
                    }
                    out.resize(mark);
                }
            }
            return false;
        }
    };
    Router r{obstacles, clearance, max_depth, {from}};
    if (!r.route(from, to, 0)) {
        throw ContourBlocked("no polyline keeps the required clearance from the singular points");
    }
    return r.out;
}

}
