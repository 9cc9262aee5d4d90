#pragma once

#include "manifold_gdp/calibration.hpp"
#include "manifold_gdp/experiments.hpp"
#include "manifold_gdp/gdp.hpp"
#include "manifold_gdp/geometry.hpp"
#include "manifold_gdp/mechanisms.hpp"
#include "manifold_gdp/normal.hpp"
#include "manifold_gdp/rng.hpp"
#include "manifold_gdp/samplers.hpp"
#include "manifold_gdp/version.hpp"
