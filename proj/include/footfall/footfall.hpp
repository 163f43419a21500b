#pragma once

// Umbrella header: probe-log ingestion, footfall cleaning, gap imputation,
// series utilities, information-theoretic flow analysis, route complexity
// scoring, and the synthetic-world test generator.

#include "footfall/clean.hpp"
#include "footfall/config.hpp"
#include "footfall/csv.hpp"
#include "footfall/errors.hpp"
#include "footfall/flow.hpp"
#include "footfall/impute.hpp"
#include "footfall/info_theory.hpp"
#include "footfall/pipeline.hpp"
#include "footfall/probe_log.hpp"
#include "footfall/route.hpp"
#include "footfall/rng.hpp"
#include "footfall/series_ops.hpp"
#include "footfall/synth.hpp"
#include "footfall/time.hpp"
