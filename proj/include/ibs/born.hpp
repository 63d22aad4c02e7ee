#pragma once

#include "ibs/born/methods.hpp"
#include "ibs/born/model.hpp"
#include "ibs/born/polynomial.hpp"
#include "ibs/born/reversion.hpp"
#include "ibs/born/series.hpp"
#include "ibs/born/trace.hpp"
