#pragma once

// Convenience umbrella. Individual headers stay includable on their own.

#include "swarm/analysis.hpp"
#include "swarm/config.hpp"
#include "swarm/csv.hpp"
#include "swarm/entropy.hpp"
#include "swarm/errors.hpp"
#include "swarm/flow.hpp"
#include "swarm/functionals.hpp"
#include "swarm/generators.hpp"
#include "swarm/landscape.hpp"
#include "swarm/metropolis.hpp"
#include "swarm/particles.hpp"
#include "swarm/rng.hpp"
#include "swarm/run.hpp"
#include "swarm/schedule.hpp"
#include "swarm/stationary.hpp"
