#pragma once

// Umbrella header.

#include "graphot/builtins.hpp"
#include "graphot/entropy.hpp"
#include "graphot/graph.hpp"
#include "graphot/io.hpp"
#include "graphot/means.hpp"
#include "graphot/oracles.hpp"
#include "graphot/prox.hpp"
#include "graphot/solver.hpp"
#include "graphot/time_grid.hpp"
#include "graphot/validate.hpp"
