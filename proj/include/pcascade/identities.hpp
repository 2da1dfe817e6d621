#pragma once

#include "pcascade/identities/conditional.hpp"
#include "pcascade/identities/estimate.hpp"
#include "pcascade/identities/parallel.hpp"
#include "pcascade/identities/report.hpp"
#include "pcascade/identities/suites.hpp"
