#pragma once

#include "pcascade/analytic.hpp"
#include "pcascade/cascade.hpp"
#include "pcascade/identities.hpp"
#include "pcascade/offspring.hpp"
#include "pcascade/walk.hpp"
