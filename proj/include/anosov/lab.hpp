// Umbrella header.
#pragma once

#include "anosov/cohomology.hpp"
#include "anosov/core.hpp"
#include "anosov/cutoff.hpp"
#include "anosov/grid.hpp"
#include "anosov/lp.hpp"
#include "anosov/mls.hpp"
#include "anosov/orbits.hpp"
#include "anosov/report.hpp"
#include "anosov/source_lab.hpp"
#include "anosov/surface.hpp"
#include "anosov/systems.hpp"
#include "anosov/thresholds.hpp"
