#pragma once

#include "errors.hpp"
#include "lattice.hpp"
#include "divisor.hpp"
#include "period_derivatives.hpp"
#include "jet.hpp"
#include "quadrature.hpp"
#include "integrator.hpp"
#include "target_path.hpp"
#include "rational_family.hpp"
#include "torus_family.hpp"
#include "nuttall.hpp"
#include "sheets.hpp"
#include "io.hpp"
