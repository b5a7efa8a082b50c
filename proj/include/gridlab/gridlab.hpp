#pragma once

#include "gridlab/audit.hpp"
#include "gridlab/cover.hpp"
#include "gridlab/errors.hpp"
#include "gridlab/evasive.hpp"
#include "gridlab/evasive_ci.hpp"
#include "gridlab/generators.hpp"
#include "gridlab/grid.hpp"
#include "gridlab/gridio.hpp"
#include "gridlab/nof.hpp"
#include "gridlab/norms.hpp"
#include "gridlab/parallel.hpp"
#include "gridlab/rng.hpp"
#include "gridlab/scalar.hpp"
#include "gridlab/simplex.hpp"
#include "gridlab/spread.hpp"

namespace gridlab {
inline constexpr const char* kVersion = "0.1.0";
}
