#pragma once

#include "zenomatch/continuous.hpp"
#include "zenomatch/errors.hpp"
#include "zenomatch/io.hpp"
#include "zenomatch/matcher.hpp"
#include "zenomatch/params.hpp"
#include "zenomatch/pulsed.hpp"
#include "zenomatch/quadrature.hpp"
#include "zenomatch/sweep.hpp"
#include "zenomatch/three_level.hpp"
#include "zenomatch/version.hpp"
