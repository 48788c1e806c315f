#pragma once

// Umbrella header: the whole library except the CLI driver.

#include "locsim/error.hpp"
#include "locsim/finite_analysis.hpp"
#include "locsim/group_element.hpp"
#include "locsim/partition_poset.hpp"
#include "locsim/pingpong.hpp"
#include "locsim/sim_structure.hpp"
#include "locsim/similarity.hpp"
#include "locsim/space.hpp"
#include "locsim/text_format.hpp"
