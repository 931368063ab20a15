#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ellfam
{

/// Base class of every error raised by the library.
/**
 * Each concrete error carries a stable name (e.g. \p "PoleAtLatticePoint") that the command line
 * tool prints on standard error.
 */
class Error : public std::runtime_error
{
    public:
        Error(std::string name, const std::string &what)
            : std::runtime_error(what), m_name(std::move(name))
        {}
        const std::string &name() const noexcept
        {
            return m_name;
        }
    private:
        std::string m_name;
};

#define ELLFAM_DEFINE_ERROR(cls)                                                                   \
    class cls : public Error                                                                       \
    {                                                                                              \
        public:                                                                                    \
            explicit cls(const std::string &what) : Error(#cls, what) {}                           \
    };

// Lattices and Weierstrass functions.
ELLFAM_DEFINE_ERROR(CollinearPeriods)
ELLFAM_DEFINE_ERROR(ToleranceUnreachable)
ELLFAM_DEFINE_ERROR(PoleAtLatticePoint)
ELLFAM_DEFINE_ERROR(NoConvergence)
ELLFAM_DEFINE_ERROR(DivisorMismatch)
ELLFAM_DEFINE_ERROR(NotPrincipal)

// Jets and the integrator.
ELLFAM_DEFINE_ERROR(DivisionByZeroGerm)
ELLFAM_DEFINE_ERROR(StepUnderflow)
ELLFAM_DEFINE_ERROR(MaxStepsExceeded)
ELLFAM_DEFINE_ERROR(RhsFailure)

// Family solvers.
ELLFAM_DEFINE_ERROR(ParameterCollision)
ELLFAM_DEFINE_ERROR(ContourBlocked)
ELLFAM_DEFINE_ERROR(DegenerateCriticalPoint)
ELLFAM_DEFINE_ERROR(LatticeDegenerate)

// Nuttall partition.
ELLFAM_DEFINE_ERROR(DegenerateTriangle)
ELLFAM_DEFINE_ERROR(PoleHit)
ELLFAM_DEFINE_ERROR(BranchPathCrossesSingularity)
ELLFAM_DEFINE_ERROR(SingularPoint)

// Configuration and output.
ELLFAM_DEFINE_ERROR(ParseError)
ELLFAM_DEFINE_ERROR(SchemaError)
ELLFAM_DEFINE_ERROR(ValidationError)
ELLFAM_DEFINE_ERROR(IoError)

#undef ELLFAM_DEFINE_ERROR

}
