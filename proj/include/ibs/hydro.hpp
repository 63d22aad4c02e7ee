#pragma once

#include "ibs/hydro/aquifer.hpp"
#include "ibs/hydro/pipeline.hpp"
#include "ibs/hydro/recovery.hpp"
