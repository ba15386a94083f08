#pragma once

#include "mdb/baim_lucb.hpp"
#include "mdb/bounds.hpp"
#include "mdb/core_model.hpp"
#include "mdb/environment.hpp"
#include "mdb/errors.hpp"
#include "mdb/harness.hpp"
#include "mdb/policies.hpp"
#include "mdb/rng.hpp"
#include "mdb/sbm_ucb.hpp"
