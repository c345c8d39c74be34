#pragma once

#include "qmcmc/analysis.hpp"
#include "qmcmc/bottleneck.hpp"
#include "qmcmc/chain.hpp"
#include "qmcmc/error.hpp"
#include "qmcmc/freefermion.hpp"
#include "qmcmc/log.hpp"
#include "qmcmc/problems.hpp"
#include "qmcmc/quantum.hpp"
#include "qmcmc/rng.hpp"
#include "qmcmc/schedule.hpp"
#include "qmcmc/spin.hpp"
