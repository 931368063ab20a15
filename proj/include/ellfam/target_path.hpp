#pragma once

#include <complex>
#include <vector>

namespace ellfam
{

using cplx = std::complex<double>;

/// Affine path A(t) = start + t * delta on [0, 1].
struct TargetPath
{
    cplx start;
    cplx delta;

    cplx operator()(double t) const
    {
        return start + t * delta;
    }
    cplx derivative(double) const
    {
        return delta;
    }
    cplx end() const
    {
        return start + delta;
    }
};

inline std::vector<cplx> path_derivatives(const std::vector<TargetPath> &paths, double t)
{
    std::vector<cplx> out;
    out.reserve(paths.size());
    for (const auto &p : paths) {
        out.push_back(p.derivative(t));
    }
    return out;
}

/// The same paths traversed from their end points back to their starts.
inline std::vector<TargetPath> reversed(const std::vector<TargetPath> &paths)
{
    std::vector<TargetPath> out;
    out.reserve(paths.size());
    for (const auto &p : paths) {
        out.push_back({p.end(), -p.delta});
    }
    return out;
}

}
