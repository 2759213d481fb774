#ifndef QUADMIX_QUADMIX_HPP
#define QUADMIX_QUADMIX_HPP

#include "quadmix/io.hpp"
#include "quadmix/lp.hpp"
#include "quadmix/measures.hpp"
#include "quadmix/quadrants.hpp"
#include "quadmix/requirements.hpp"
#include "quadmix/scenarios.hpp"
#include "quadmix/seeding.hpp"
#include "quadmix/stats.hpp"
#include "quadmix/synthesis.hpp"
#include "quadmix/types.hpp"
#include "quadmix/valuation.hpp"

#endif  // QUADMIX_QUADMIX_HPP
