#pragma once

// Umbrella header for the sqint library.

#include "sqint/core.hpp"
#include "sqint/group.hpp"
#include "sqint/multiplier.hpp"
#include "sqint/state.hpp"
#include "sqint/representation.hpp"
#include "sqint/measures.hpp"
#include "sqint/induced.hpp"
#include "sqint/transforms.hpp"
#include "sqint/io.hpp"
