#pragma once

#include "hlmc/core.hpp"
#include "hlmc/exp_weights.hpp"
#include "hlmc/hierarchy.hpp"
#include "hlmc/params.hpp"
#include "hlmc/hlmc_policy.hpp"
#include "hlmc/baselines.hpp"
#include "hlmc/adversaries.hpp"
#include "hlmc/oracles.hpp"
#include "hlmc/doubling.hpp"
#include "hlmc/policy_factory.hpp"
#include "hlmc/experiment.hpp"
#include "hlmc/spectrum.hpp"
#include "hlmc/config.hpp"
