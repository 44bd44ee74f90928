#pragma once

#include "fc/error.hpp"
#include "fc/fluctuation.hpp"
#include "fc/harness.hpp"
#include "fc/io.hpp"
#include "fc/property.hpp"
#include "fc/series.hpp"
#include "fc/stats.hpp"
#include "fc/warping.hpp"
