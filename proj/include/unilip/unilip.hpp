#pragma once

// Umbrella header for the univariate Lipschitz global optimization library.

#include "unilip/bench.hpp"
#include "unilip/core.hpp"
#include "unilip/engine.hpp"
#include "unilip/expr.hpp"
#include "unilip/linear.hpp"
#include "unilip/oracle.hpp"
#include "unilip/smooth.hpp"
#include "unilip/solve.hpp"
#include "unilip/testbed.hpp"
