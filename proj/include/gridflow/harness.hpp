#pragma once

#include "gridflow/harness/cli.hpp"
#include "gridflow/harness/complexity.hpp"
#include "gridflow/harness/config.hpp"
#include "gridflow/harness/convergence.hpp"
#include "gridflow/harness/evolve.hpp"
#include "gridflow/harness/output.hpp"
