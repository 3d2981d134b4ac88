#pragma once

// Umbrella header for the pricing and calibration library.

#include "qbs/calibration.hpp"
#include "qbs/errors.hpp"
#include "qbs/market_data.hpp"
#include "qbs/normal.hpp"
#include "qbs/path.hpp"
#include "qbs/pricing.hpp"
#include "qbs/root_finding.hpp"
#include "qbs/series.hpp"
#include "qbs/volatility.hpp"
