#pragma once

// Everything: model, convex engine, MNL bisection, B&B, baselines, oracle,
// generator, sweeps and reports.

#include "logitprice/baselines.hpp"
#include "logitprice/bnb.hpp"
#include "logitprice/convex.hpp"
#include "logitprice/errors.hpp"
#include "logitprice/generator.hpp"
#include "logitprice/instance_io.hpp"
#include "logitprice/intervals.hpp"
#include "logitprice/mnl.hpp"
#include "logitprice/model.hpp"
#include "logitprice/oracle.hpp"
#include "logitprice/polytope.hpp"
#include "logitprice/report.hpp"
#include "logitprice/rng.hpp"
#include "logitprice/sweep.hpp"
