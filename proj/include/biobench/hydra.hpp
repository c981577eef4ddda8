#pragma once

// Max-margin polytope clustering of patients against a control reference.

#include "biobench/hydra/dpp.hpp"
#include "biobench/hydra/hydra.hpp"
#include "biobench/hydra/svm.hpp"
