#pragma once

#include "schurlab/amenlab.hpp"
#include "schurlab/compactification.hpp"
#include "schurlab/errors.hpp"
#include "schurlab/funcspace.hpp"
#include "schurlab/group.hpp"
#include "schurlab/io.hpp"
#include "schurlab/matrix.hpp"
#include "schurlab/parallel.hpp"
#include "schurlab/percolation.hpp"
#include "schurlab/posdef.hpp"
#include "schurlab/rng.hpp"
#include "schurlab/schur.hpp"

namespace schurlab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace schurlab
