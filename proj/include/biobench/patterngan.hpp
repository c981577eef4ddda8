#pragma once

// Desk-scale adversarial pattern models: categorical mappings (SmileGAN-lite)
// and continuous R-index decomposition (SurrealGAN-lite).

#include "biobench/gan/common.hpp"
#include "biobench/gan/grad_check.hpp"
#include "biobench/gan/params.hpp"
#include "biobench/gan/smile.hpp"
#include "biobench/gan/surreal.hpp"
