#pragma once
// Umbrella header.

#include "tracekit/analytic.hpp"
#include "tracekit/bitstring.hpp"
#include "tracekit/channels.hpp"
#include "tracekit/config.hpp"
#include "tracekit/csv.hpp"
#include "tracekit/hardpairs.hpp"
#include "tracekit/harness.hpp"
#include "tracekit/meanstats.hpp"
#include "tracekit/reconstruct.hpp"
#include "tracekit/rng.hpp"
