// Umbrella header for the fractional-order dynamical systems toolkit.
#pragma once

#include "fods/coefficients.hpp"
#include "fods/feedback.hpp"
#include "fods/mpc.hpp"
#include "fods/mvar.hpp"
#include "fods/observer.hpp"
#include "fods/pole_placement.hpp"
#include "fods/presets.hpp"
#include "fods/random.hpp"
#include "fods/separation.hpp"
#include "fods/simulation.hpp"
#include "fods/spectrum.hpp"
#include "fods/types.hpp"
