#pragma once

#include "gridflow/errors.hpp"
#include "gridflow/field_io.hpp"
#include "gridflow/grid.hpp"
#include "gridflow/line_search.hpp"
#include "gridflow/models.hpp"
#include "gridflow/polynomial.hpp"
#include "gridflow/problems.hpp"
#include "gridflow/psd.hpp"
#include "gridflow/random.hpp"
#include "gridflow/spectral.hpp"
