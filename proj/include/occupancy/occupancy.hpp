#pragma once

#include "approx.hpp"
#include "compensated_sum.hpp"
#include "error.hpp"
#include "exact.hpp"
#include "model.hpp"
#include "moments.hpp"
#include "rng.hpp"
#include "sampling.hpp"
#include "sim.hpp"
#include "special.hpp"
#include "welford.hpp"
