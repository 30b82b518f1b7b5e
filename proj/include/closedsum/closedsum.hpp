#pragma once

#include <closedsum/blockmodel.hpp>
#include <closedsum/generators.hpp>
#include <closedsum/images.hpp>
#include <closedsum/margins.hpp>
#include <closedsum/numerics.hpp>
#include <closedsum/paircalc.hpp>
#include <closedsum/pairs.hpp>
#include <closedsum/reduction.hpp>
#include <closedsum/subspaces.hpp>
#include <closedsum/systems.hpp>

namespace closedsum {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace closedsum
