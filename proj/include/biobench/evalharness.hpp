#pragma once

#include "biobench/eval/algorithms.hpp"
#include "biobench/eval/config.hpp"
#include "biobench/eval/grid.hpp"
#include "biobench/eval/kmeans.hpp"
#include "biobench/eval/matching.hpp"
#include "biobench/eval/report.hpp"
