#pragma once

// Umbrella header for the inequality-index library.

#include "tlim/error.hpp"
#include "tlim/index.hpp"
#include "tlim/sample.hpp"
#include "tlim/inequality.hpp"
#include "tlim/asymptotics.hpp"
#include "tlim/closed_forms.hpp"
#include "tlim/model.hpp"
#include "tlim/feasibility.hpp"
#include "tlim/population.hpp"
#include "tlim/random.hpp"
#include "tlim/harness.hpp"
#include "tlim/csv.hpp"
#include "tlim/report.hpp"
