#pragma once

#include <fanbranch/cone_geometry.hpp>
#include <fanbranch/cover.hpp>
#include <fanbranch/exact_linalg.hpp>
#include <fanbranch/fan.hpp>
#include <fanbranch/io.hpp>
#include <fanbranch/klyachko.hpp>
#include <fanbranch/monodromy.hpp>
#include <fanbranch/pl.hpp>
#include <fanbranch/sweep.hpp>
