#pragma once

#include "pcascade/analytic/biggins.hpp"
#include "pcascade/analytic/extended_real.hpp"
#include "pcascade/analytic/levy.hpp"
#include "pcascade/analytic/nesting.hpp"
#include "pcascade/analytic/parameters.hpp"
#include "pcascade/analytic/psi.hpp"
#include "pcascade/analytic/quadrature.hpp"
#include "pcascade/analytic/special.hpp"
