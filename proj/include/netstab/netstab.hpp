#pragma once

#include "netstab/error.hpp"
#include "netstab/linalg.hpp"
#include "netstab/graph.hpp"
#include "netstab/models.hpp"
#include "netstab/assembly.hpp"
#include "netstab/stability.hpp"
#include "netstab/sim.hpp"
#include "netstab/scenario.hpp"
#include "netstab/builtin_scenarios.hpp"
