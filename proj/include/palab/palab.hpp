#pragma once

#include "palab/csv.hpp"
#include "palab/ctbp.hpp"
#include "palab/errors.hpp"
#include "palab/estimator.hpp"
#include "palab/experiments.hpp"
#include "palab/generator.hpp"
#include "palab/pa_function.hpp"
#include "palab/rng.hpp"
#include "palab/stats.hpp"
#include "palab/theory.hpp"
#include "palab/tree.hpp"
#include "palab/weighted_sampler.hpp"
