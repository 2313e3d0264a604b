#pragma once

#include "spdelab/analysis.hpp"
#include "spdelab/config.hpp"
#include "spdelab/experiments.hpp"
#include "spdelab/grid.hpp"
#include "spdelab/io.hpp"
#include "spdelab/models.hpp"
#include "spdelab/noise.hpp"
#include "spdelab/operators.hpp"
#include "spdelab/optimize.hpp"
#include "spdelab/stepper.hpp"
#include "spdelab/version.hpp"
