#pragma once

// Synthetic cohort generation, control-referenced z-scores and dataset I/O.

#include "biobench/datagen/generate.hpp"
#include "biobench/datagen/io.hpp"
#include "biobench/datagen/presets.hpp"
#include "biobench/datagen/types.hpp"
#include "biobench/datagen/zscore.hpp"
