#pragma once

#include "mdk/error.hpp"
#include "mdk/exact.hpp"
#include "mdk/lattice.hpp"
#include "mdk/polynomial.hpp"
#include "mdk/potential.hpp"
#include "mdk/coamoeba.hpp"
#include "mdk/dimer.hpp"
#include "mdk/parallel.hpp"
#include "mdk/verify.hpp"
#include "mdk/serialize.hpp"
#include "mdk/svg.hpp"
