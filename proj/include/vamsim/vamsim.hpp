#pragma once

#include "vamsim/channel.hpp"
#include "vamsim/compare.hpp"
#include "vamsim/config.hpp"
#include "vamsim/engine.hpp"
#include "vamsim/geometry.hpp"
#include "vamsim/io.hpp"
#include "vamsim/metrics.hpp"
#include "vamsim/redundancy.hpp"
#include "vamsim/rng.hpp"
#include "vamsim/scenario.hpp"
#include "vamsim/vam.hpp"
