#pragma once

#include "gdc/controller.hpp"
#include "gdc/eigen.hpp"
#include "gdc/error.hpp"
#include "gdc/game.hpp"
#include "gdc/io.hpp"
#include "gdc/measurement.hpp"
#include "gdc/rng.hpp"
#include "gdc/simulation.hpp"
#include "gdc/stats.hpp"
#include "gdc/svg.hpp"
#include "gdc/sweep.hpp"
#include "gdc/version.hpp"
