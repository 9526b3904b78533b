#pragma once
// rsl.hpp -- umbrella header: the whole rigid-formation simulation library.

#include "rsl/analysis.hpp"
#include "rsl/control.hpp"
#include "rsl/csv.hpp"
#include "rsl/errors.hpp"
#include "rsl/graph.hpp"
#include "rsl/linalg.hpp"
#include "rsl/mat.hpp"
#include "rsl/motion.hpp"
#include "rsl/rng.hpp"
#include "rsl/scenario.hpp"
#include "rsl/sim.hpp"
