#pragma once

#include "pcascade/offspring/law.hpp"
#include "pcascade/offspring/weights.hpp"
