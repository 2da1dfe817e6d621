#pragma once

#include "pcascade/cascade/children.hpp"
#include "pcascade/cascade/martingale.hpp"
#include "pcascade/cascade/tree.hpp"
#include "pcascade/cascade/ulam.hpp"
