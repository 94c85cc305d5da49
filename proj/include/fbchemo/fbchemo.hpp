#pragma once

#include "analytic.hpp"
#include "config.hpp"
#include "convergence.hpp"
#include "diagnostics.hpp"
#include "driver.hpp"
#include "elliptic.hpp"
#include "errors.hpp"
#include "freeboundary.hpp"
#include "output.hpp"
#include "parabolic.hpp"
#include "params.hpp"
#include "state.hpp"
