#pragma once

// Umbrella header for the intersection congestion-control simulator.

#include "vanetsim/config.hpp"
#include "vanetsim/config_io.hpp"
#include "vanetsim/engine.hpp"
#include "vanetsim/errors.hpp"
#include "vanetsim/event_queue.hpp"
#include "vanetsim/geometry.hpp"
#include "vanetsim/ledger.hpp"
#include "vanetsim/metrics.hpp"
#include "vanetsim/mobility.hpp"
#include "vanetsim/packet.hpp"
#include "vanetsim/protocol.hpp"
#include "vanetsim/radio.hpp"
#include "vanetsim/reports.hpp"
#include "vanetsim/rng.hpp"
#include "vanetsim/road_network.hpp"
#include "vanetsim/sim_time.hpp"
#include "vanetsim/sweep.hpp"
