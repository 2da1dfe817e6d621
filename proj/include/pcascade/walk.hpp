#pragma once

#include "pcascade/walk/batched.hpp"
#include "pcascade/walk/dp.hpp"
#include "pcascade/walk/extended.hpp"
#include "pcascade/walk/forest.hpp"
#include "pcascade/walk/jumps.hpp"
#include "pcascade/walk/run.hpp"
#include "pcascade/walk/step_law.hpp"
