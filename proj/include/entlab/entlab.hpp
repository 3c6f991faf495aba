#pragma once

// Umbrella header for the library. JSON helpers live in entlab/io.hpp.

#include "entlab/block_code.hpp"
#include "entlab/core.hpp"
#include "entlab/counting.hpp"
#include "entlab/cover_entropy.hpp"
#include "entlab/dim_entropy.hpp"
#include "entlab/fractal.hpp"
#include "entlab/lowering.hpp"
#include "entlab/parallel.hpp"
#include "entlab/schedule.hpp"
#include "entlab/subshift.hpp"
#include "entlab/tower.hpp"
