#pragma once

#include "ibs/numerics/errors.hpp"
#include "ibs/numerics/grid.hpp"
#include "ibs/numerics/io.hpp"
#include "ibs/numerics/noise.hpp"
#include "ibs/numerics/quadrature.hpp"
#include "ibs/numerics/sparse.hpp"
#include "ibs/numerics/svd.hpp"
#include "ibs/numerics/transfer.hpp"
#include "ibs/numerics/types.hpp"
