#pragma once

// Umbrella header for the whole library.

#include "perc/arms.hpp"
#include "perc/backbone.hpp"
#include "perc/clusters.hpp"
#include "perc/configuration.hpp"
#include "perc/crossings.hpp"
#include "perc/experiments.hpp"
#include "perc/io.hpp"
#include "perc/lattice.hpp"
#include "perc/lowest_crossing.hpp"
#include "perc/oracle.hpp"
#include "perc/pivotal.hpp"
#include "perc/rng.hpp"
#include "perc/stats.hpp"
#include "perc/union_find.hpp"
#include "perc/version.hpp"

