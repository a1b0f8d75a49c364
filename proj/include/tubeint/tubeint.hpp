#pragma once

#include "tubeint/commands.hpp"
#include "tubeint/csv.hpp"
#include "tubeint/ermakov.hpp"
#include "tubeint/error.hpp"
#include "tubeint/integrate.hpp"
#include "tubeint/invariant.hpp"
#include "tubeint/model.hpp"
#include "tubeint/perturb.hpp"
#include "tubeint/resonance.hpp"
#include "tubeint/rk4.hpp"
#include "tubeint/spline.hpp"
#include "tubeint/trig_series.hpp"
