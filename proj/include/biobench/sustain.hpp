#pragma once

#include "biobench/sustain/events.hpp"
#include "biobench/sustain/fit.hpp"
#include "biobench/sustain/mcmc.hpp"
#include "biobench/sustain/probe.hpp"
