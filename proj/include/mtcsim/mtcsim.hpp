// mtcsim.hpp : umbrella header.
#pragma once

#include "mtcsim/alarm_field.hpp"
#include "mtcsim/analytics.hpp"
#include "mtcsim/atpf.hpp"
#include "mtcsim/config.hpp"
#include "mtcsim/geometry.hpp"
#include "mtcsim/point_process.hpp"
#include "mtcsim/quadrature.hpp"
#include "mtcsim/random.hpp"
#include "mtcsim/results_io.hpp"
#include "mtcsim/sim_engine.hpp"
#include "mtcsim/traffic_models.hpp"
