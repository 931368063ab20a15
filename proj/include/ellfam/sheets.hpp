#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <vector>

#include "nuttall.hpp"

namespace ellfam
{

/// Rectangle [x0, x1] x [y0, y1] in the z-plane.
struct Bounds
{
    double x0 = -1.5, x1 = 1.5, y0 = -1.5, y1 = 1.5;
};

using Polyline = std::vector<cplx>;

/// Label grid and boundary contours produced by classify_sheets().
struct SheetField
{
    Bounds bounds;
    std::size_t nx = 0, ny = 0;
    /// Row-major labels in {0, 1, 2}; row index follows y.
    std::vector<std::uint8_t> labels;
    /// Zero sets of u(z rho^j) - u(z rho^k) for (j, k) = (0,1), (0,2), (1,2).
    std::array<std::vector<Polyline>, 3> contours;

    cplx node(std::size_t i, std::size_t j) const
    {
        const double x = bounds.x0 + (bounds.x1 - bounds.x0) * static_cast<double>(i) / static_cast<double>(nx - 1);
        const double y = bounds.y0 + (bounds.y1 - bounds.y0) * static_cast<double>(j) / static_cast<double>(ny - 1);
        return {x, y};
    }
    std::uint8_t label(std::size_t i, std::size_t j) const { return labels[j * nx + i]; }
};

inline constexpr std::array<std::array<int, 2>, 3> sheet_pairs{{{0, 1}, {0, 2}, {1, 2}}};

/// The triple (u(z), u(z rho), u(z rho^2)) from three sigma evaluations.
inline std::array<double, 3> u_triple(cplx z, const NuttallContext &ctx)
{
    const auto &inv = ctx.inv;
    const cplx a = ctx.alpha;
    const double L0 = detail::ln_abs_sigma(z - a, inv);
    const double L1 = detail::ln_abs_sigma(z - rho * a, inv);
    const double L2 = detail::ln_abs_sigma(z - std::conj(rho) * a, inv);
    const double c = std::sqrt(3.0);
    const cplx lin = inv.eta1 * std::conj(a) * z;
    return {-2.0 * L0 + L1 + L2 - c * lin.real(), -2.0 * L2 + L0 + L1 - c * (lin * rho).real(),
            -2.0 * L1 + L2 + L0 - c * (lin * std::conj(rho)).real()};
}

/// Number of the other two values that exceed u(z): 0 on the upper sheet, 2 on the lower one.
/**
 * Differences below a rounding-level tolerance count as ties, so points on a boundary curve get
 * the same label whichever rotated copy of the triple is evaluated.
 */
inline std::uint8_t sheet_label(const std::array<double, 3> &u)
{
    const double tol = 1e-12 * std::max({1.0, std::abs(u[0]), std::abs(u[1]), std::abs(u[2])});
    return static_cast<std::uint8_t>((u[1] > u[0] + tol ? 1 : 0) + (u[2] > u[0] + tol ? 1 : 0));
}

/// Label of z rho^n predicted from the triple at z.
inline std::uint8_t rotated_label(const std::array<double, 3> &u, int n)
{
    const auto k = static_cast<std::size_t>(((n % 3) + 3) % 3);
    return sheet_label({u[k], u[(k + 1) % 3], u[(k + 2) % 3]});
}

/// Sign of \p d with a symmetric tie band of half-width \p tol.
inline int pair_relation(double d, double tol)
{
    return d > tol ? 1 : (d < -tol ? -1 : 0);
}

namespace detail
{

// Nodes that coincide with a singularity are moved by a fraction of a pixel.
inline cplx nudge_off_singularity(cplx z, const NuttallContext &ctx, double pixel)
{
    for (int attempt = 0; attempt < 4; ++attempt) {
        bool hit = false;
        for (int k = 0; k < 3; ++k) {
            if (std::abs(reduce_to_cell(z - std::pow(rho, k) * ctx.alpha, ctx.inv.lattice).z) <= 1e-9) {
                hit = true;
            }
        }
        if (!hit) {
            return z;
        }
        z += cplx(0.5 * pixel, 0.25 * pixel);
    }
    return z;
}

template <typename Body>
void parallel_rows(std::size_t rows, unsigned threads, Body &&body)
{
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(rows, 1)));
    if (threads <= 1) {
        for (std::size_t r = 0; r < rows; ++r) {
            body(r);
        }
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex m;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t r = t; r < rows; r += threads) {
                    body(r);
                }
            } catch (...) {
                std::lock_guard lock(m);
                failure = std::current_exception();
            }
        });
    }
    for (auto &th : pool) {
        th.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

inline cplx edge_point(cplx p, cplx q, double fp, double fq)
{
    const double s = fp / (fp - fq);
    return p + std::clamp(s, 0.0, 1.0) * (q - p);
}

// Marching squares on a node grid; returns linked polylines.
inline std::vector<Polyline> marching_squares(const std::vector<double> &f, std::size_t nx, std::size_t ny,
                                              const SheetField &grid)
{
    // Edge ids: horizontal edge from node (i, j) is 2 * (j * nx + i); vertical is that + 1.
    auto hid = [&](std::size_t i, std::size_t j) { return 2 * (j * nx + i); };
    auto vid = [&](std::size_t i, std::size_t j) { return 2 * (j * nx + i) + 1; };
    std::map<std::size_t, cplx> points;
    std::vector<std::array<std::size_t, 2>> segments;
    auto val = [&](std::size_t i, std::size_t j) { return f[j * nx + i]; };
    auto crossing = [&](std::size_t id) {
        auto it = points.find(id);
        if (it != points.end()) {
            return;
        }
        const std::size_t node = id / 2;
        const std::size_t i = node % nx, j = node / nx;
        const std::size_t i2 = (id % 2 == 0) ? i + 1 : i, j2 = (id % 2 == 0) ? j : j + 1;
        points[id] = edge_point(grid.node(i, j), grid.node(i2, j2), val(i, j), val(i2, j2));
    };
    for (std::size_t j = 0; j + 1 < ny; ++j) {
        for (std::size_t i = 0; i + 1 < nx; ++i) {
            const double v00 = val(i, j), v10 = val(i + 1, j), v11 = val(i + 1, j + 1), v01 = val(i, j + 1);
            const int code = (v00 > 0) | ((v10 > 0) << 1) | ((v11 > 0) << 2) | ((v01 > 0) << 3);
            if (code == 0 || code == 15) {
                continue;
            }
            const std::size_t bottom = hid(i, j), right = vid(i + 1, j), top = hid(i, j + 1), left = vid(i, j);
            std::vector<std::array<std::size_t, 2>> segs;
            switch (code) {
            case 1: case 14: segs = {{left, bottom}}; break;
            case 2: case 13: segs = {{bottom, right}}; break;
            case 3: case 12: segs = {{left, right}}; break;
            case 4: case 11: segs = {{right, top}}; break;
            case 6: case 9: segs = {{bottom, top}}; break;
            case 7: case 8: segs = {{left, top}}; break;
            case 5: case 10: {
                const bool centre = (v00 + v10 + v11 + v01) > 0;
                if ((code == 5) == centre) {
                    segs = {{left, top}, {bottom, right}};
                } else {
                    segs = {{left, bottom}, {right, top}};
                }
                break;
            }
            default: break;
            }
            for (const auto &s : segs) {
                crossing(s[0]);
                crossing(s[1]);
                segments.push_back(s);
            }
        }
    }

    std::map<std::size_t, std::vector<std::size_t>> incident;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        incident[segments[s][0]].push_back(s);
        incident[segments[s][1]].push_back(s);
    }
    std::vector<bool> used(segments.size(), false);
    std::vector<Polyline> lines;
    auto walk = [&](std::size_t start_seg, std::size_t start_pt) {
        Polyline line{points[start_pt]};
        std::size_t seg = start_seg, pt = start_pt;
        while (true) {
            used[seg] = true;
            pt = segments[seg][0] == pt ? segments[seg][1] : segments[seg][0];
            line.push_back(points[pt]);
            std::size_t next = segments.size();
            for (std::size_t cand : incident[pt]) {
                if (!used[cand]) {
                    next = cand;
                    break;
                }
            }
            if (next == segments.size()) {
                break;
            }
            seg = next;
        }
        return line;
    };
    // Open chains first, starting from endpoints of degree one.
    for (const auto &[pt, segs] : incident) {
        if (segs.size() == 1 && !used[segs[0]]) {
            lines.push_back(walk(segs[0], pt));
        }
    }
    for (std::size_t s = 0; s < segments.size(); ++s) {
        if (!used[s]) {
            lines.push_back(walk(s, segments[s][0]));
        }
    }
    return lines;
}

}

/// Options for classify_sheets().
struct SheetOptions
{
    std::size_t nx = 400, ny = 400;
    /// Worker threads; 0 selects the hardware concurrency.
    unsigned threads = 0;
    bool contours = true;
};

/// Labels every node of a regular grid over \p bounds with its sheet and traces the boundary contours.
inline SheetField classify_sheets(const NuttallContext &ctx, const Bounds &bounds, const SheetOptions &opt = {})
{
    if (opt.nx < 2 || opt.ny < 2 || !(bounds.x1 > bounds.x0) || !(bounds.y1 > bounds.y0)) {
        throw std::invalid_argument("sheet grid needs at least 2 x 2 nodes over a non-empty rectangle");
    }
    SheetField field;
    field.bounds = bounds;
    field.nx = opt.nx;
    field.ny = opt.ny;
    field.labels.assign(opt.nx * opt.ny, 0);
    std::array<std::vector<double>, 3> diffs;
    for (auto &d : diffs) {
        d.assign(opt.nx * opt.ny, 0.0);
    }
    const double pixel = std::min((bounds.x1 - bounds.x0) / static_cast<double>(opt.nx - 1),
                                  (bounds.y1 - bounds.y0) / static_cast<double>(opt.ny - 1));
    detail::parallel_rows(opt.ny, opt.threads, [&](std::size_t j) {
        for (std::size_t i = 0; i < opt.nx; ++i) {
            const cplx z = detail::nudge_off_singularity(field.node(i, j), ctx, pixel);
            const auto u = u_triple(z, ctx);
            const std::size_t idx = j * opt.nx + i;
            field.labels[idx] = sheet_label(u);
            for (std::size_t p = 0; p < 3; ++p) {
                diffs[p][idx] = u[sheet_pairs[p][0]] - u[sheet_pairs[p][1]];
            }
        }
    });
    if (opt.contours) {
        for (std::size_t p = 0; p < 3; ++p) {
            field.contours[p] = detail::marching_squares(diffs[p], opt.nx, opt.ny, field);
        }
    }
    return field;
}

/// Number of nodes whose label differs from all four axis neighbours.
inline std::size_t speckle_count(const SheetField &f)
{
    std::size_t count = 0;
    for (std::size_t j = 1; j + 1 < f.ny; ++j) {
        for (std::size_t i = 1; i + 1 < f.nx; ++i) {
            const auto l = f.label(i, j);
            if (l != f.label(i - 1, j) && l != f.label(i + 1, j) && l != f.label(i, j - 1) && l != f.label(i, j + 1)) {
                ++count;
            }
        }
    }
    return count;
}

/// True when u(z) is strictly inside sheet \p label by more than \p tie for both comparisons.
inline bool strictly_in_sheet(const std::array<double, 3> &u, std::uint8_t label, double tie)
{
    const double d1 = u[0] - u[1], d2 = u[0] - u[2];
    switch (label) {
    case 0: return d1 > tie && d2 > tie;
    case 2: return d1 < -tie && d2 < -tie;
    default: return (d1 > tie && d2 < -tie) || (d1 < -tie && d2 > tie);
    }
}

/// Connected components of one sheet label on the torus C / Lambda, sampled on an n x n grid.
/**
 * Nodes are s omega1 + t omega2 with s, t in [0, 1); 4-connectivity wraps around both periods.
 * Nodes within \p tie of a boundary curve belong to no component, and two neighbouring nodes are
 * joined only when the midpoint of the edge between them is also strictly inside the sheet.
 */
inline std::size_t torus_component_count(const NuttallContext &ctx, std::uint8_t label, std::size_t n = 240,
                                         double tie = 1e-8, unsigned threads = 0)
{
    if (n < 4) {
        throw std::invalid_argument("torus grid needs at least 4 x 4 nodes");
    }
    const auto &lat = ctx.inv.lattice;
    const double pixel = std::abs(lat.omega1) / static_cast<double>(n);
    auto at = [&](double s, double t) {
        const cplx z = detail::nudge_off_singularity(
            s / static_cast<double>(n) * lat.omega1 + t / static_cast<double>(n) * lat.omega2, ctx, pixel);
        return strictly_in_sheet(u_triple(z, ctx), label, tie);
    };
    // Per node: bit 0 node inside, bit 1 edge to the right inside, bit 2 edge upwards inside.
    std::vector<std::uint8_t> flags(n * n, 0);
    detail::parallel_rows(n, threads, [&](std::size_t j) {
        for (std::size_t i = 0; i < n; ++i) {
            const double s = static_cast<double>(i) + 0.5, t = static_cast<double>(j) + 0.5;
            if (!at(s, t)) {
                continue;
            }
            flags[j * n + i] = 1 | (at(s + 0.5, t) ? 2 : 0) | (at(s, t + 0.5) ? 4 : 0);
        }
    });
    std::vector<std::size_t> parent(n * n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    auto unite = [&](std::size_t a, std::size_t b) { parent[find(a)] = find(b); };
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t a = j * n + i;
            if (!(flags[a] & 1)) {
                continue;
            }
            const std::size_t right = j * n + (i + 1) % n, up = ((j + 1) % n) * n + i;
            if ((flags[a] & 2) && (flags[right] & 1)) {
                unite(a, right);
            }
            if ((flags[a] & 4) && (flags[up] & 1)) {
                unite(a, up);
            }
        }
    }
    std::size_t count = 0;
    for (std::size_t a = 0; a < n * n; ++a) {
        if ((flags[a] & 1) && find(a) == a) {
            ++count;
        }
    }
    return count;
}

}
